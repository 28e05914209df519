"""Multiple ergodic averages under the Cesàro, prime, Λ and W-tricked schemes.

An average has the form ``(1/Z_N) Σ_n c_n ∏_j (∏_i T_i^{m_{ij}(x_n)}) f_j``
where the scheme fixes the sample points ``x_n``, weights ``c_n`` and
normalizer ``Z_N``:

============  ==================  ================  ============
scheme        ``x_n``             ``c_n``           ``Z_N``
============  ==================  ================  ============
cesaro        ``n``               ``1``             ``N``
prime         ``p``               ``1``             ``π(N)``
lambda        ``n``               ``Λ(n)``          ``N``
w_tricked     ``Wn + b``          ``Λ_{w,b}(n)−1``  ``N``
============  ==================  ================  ============

with ``m_{ij}(x) = mult·⌊a_{ij}(x)⌋``.  On torus rotations with
trigonometric-polynomial observables the average is itself a trigonometric
polynomial whose coefficients are exponential sums; it is computed exactly
and its L² norm follows from Parseval.  Otherwise the average is evaluated
on a fixed Halton grid of starting points and the L² norm is the grid
root-mean-square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ..errors import HypothesisViolation, InvalidArgument, InvalidSystem, Unsupported, UnsupportedSet
from ..floors import floor_expr, resolve_floors
from ..hardy.expr import HardyExpr, as_expr
from ..hardy.growth import NEITHER, classify
from ..hardy.parser import parse
from ..numtheory import VonMangoldtTable, WTrick, coprime_residues, primorial_trick, w_tricked_range
from ..poly import RealPoly
from .observables import Observable, TrigPoly, as_observable, product_bound
from .sets import ArcSet, BoxSet, as_set, intersection_measure
from .systems import ErgodicSystem, TorusRotation, sample_grid

SCHEMES = ("cesaro", "prime", "lambda", "w_tricked")

#: Largest number of frequency tuples handled by the Fourier path.
FOURIER_MAX_TERMS = 1 << 14
_CHUNK_ELEMENTS = 1 << 22


# ---------------------------------------------------------------------------
# iterates


@dataclass(frozen=True)
class Iterate:
    """The exponent ``multiplier·⌊func(x)⌋`` of one map in one factor."""

    func: Union[HardyExpr, RealPoly]
    multiplier: int = 1

    @classmethod
    def of(cls, spec) -> Optional["Iterate"]:
        if spec is None or isinstance(spec, Iterate):
            return spec
        if isinstance(spec, str):
            return cls(parse(spec))
        if isinstance(spec, RealPoly):
            return cls(spec)
        if isinstance(spec, tuple) and len(spec) == 2 and isinstance(spec[1], int):
            inner = cls.of(spec[0])
            return cls(inner.func, inner.multiplier * spec[1])
        return cls(as_expr(spec))

    def floors(self, x: np.ndarray) -> tuple[np.ndarray, int]:
        """``(multiplier·⌊func(x)⌋, number of ambiguous floors)``."""
        x = np.asarray(x, dtype=np.int64)
        if isinstance(self.func, RealPoly):
            p = self.func
            from fractions import Fraction

            def exact(i):
                import mpmath

                total = Fraction(0)
                for j, c in enumerate(p.coeffs):
                    ex = p.exact[j] if p.exact is not None and j < len(p.exact) and p.exact[j] is not None else c
                    total += Fraction(ex) * int(x[i]) ** j
                return mpmath.mpf(total.numerator) / total.denominator

            fv = resolve_floors(p(x.astype(np.float64)), exact)
        else:
            fv = floor_expr(self.func, x)
        return fv.floor * self.multiplier, fv.ambiguous_count

    def condition(self) -> str:
        if isinstance(self.func, RealPoly):
            return "far-from-rational-polys" if self.func.has_irrational_nonconstant() else "essentially-rational-poly"
        return classify(self.func).condition


def _is_row(x) -> bool:
    if isinstance(x, list):
        return True
    return isinstance(x, tuple) and not (len(x) == 2 and isinstance(x[1], int))


def _iterate_table(iterates, n_obs: int, n_maps: int) -> list[list[Optional[Iterate]]]:
    if len(iterates) != n_obs:
        raise InvalidArgument(f"{len(iterates)} iterate rows for {n_obs} observables")
    table = []
    for row in iterates:
        row = list(row) if _is_row(row) else [row]
        if len(row) != n_maps:
            raise InvalidArgument(f"each observable needs one iterate per map ({n_maps})")
        table.append([Iterate.of(s) for s in row])
    return table


# ---------------------------------------------------------------------------
# schemes


@dataclass(frozen=True)
class Samples:
    index: np.ndarray
    argument: np.ndarray
    weight: np.ndarray
    scheme: str
    table: Optional[VonMangoldtTable]
    trick: Optional[WTrick]

    def normalizer(self, N: int) -> float:
        if self.scheme == "prime":
            return float(self.table.pi(N))
        return float(N)


def scheme_samples(scheme: str, N: int, table=None, trick=None) -> Samples:
    """Sample points, raw weights and indices for ``n <= N`` under ``scheme``."""
    if scheme not in SCHEMES:
        raise InvalidArgument(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if N < 1:
        raise InvalidArgument(f"N must be >= 1, got {N}")
    if scheme == "cesaro":
        n = np.arange(1, N + 1, dtype=np.int64)
        return Samples(n, n, np.ones(N), scheme, table, trick)
    if table is None:
        raise InvalidArgument(f"scheme {scheme!r} needs a von Mangoldt table")
    if scheme == "prime":
        p = table.primes(N).astype(np.int64)
        return Samples(p, p, np.ones(p.size), scheme, table, trick)
    if scheme == "lambda":
        table.check_range(N)
        n = np.flatnonzero(table.values[: N + 1] > 0).astype(np.int64)
        return Samples(n, n, table.values[n], scheme, table, trick)
    if trick is None:
        raise InvalidArgument("the w_tricked scheme needs a W-trick")
    n = np.arange(1, N + 1, dtype=np.int64)
    weights = w_tricked_range(table, trick, 1, N) - 1.0
    return Samples(n, trick.argument(n), weights, scheme, table, trick)


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class Checkpoint:
    """The average at cutoff ``N``.

    ``value`` is the average evaluated at the base point.  ``norm`` is its L²
    norm over the space.  The average itself is kept as Fourier data
    (``freqs``, ``coeffs``) or as values on the sample grid.
    """

    N: int
    value: complex
    norm: float
    freqs: Optional[np.ndarray] = field(default=None, repr=False)
    coeffs: Optional[np.ndarray] = field(default=None, repr=False)
    grid_values: Optional[np.ndarray] = field(default=None, repr=False)


@dataclass(frozen=True)
class AverageSeries:
    scheme: str
    method: str
    checkpoints: tuple
    w: Optional[int] = None
    b: Optional[int] = None
    ambiguous_floors: int = 0
    bound: Optional[float] = None

    def at(self, N: int) -> Checkpoint:
        for c in self.checkpoints:
            if c.N == N:
                return c
        raise KeyError(N)

    @property
    def last(self) -> Checkpoint:
        return self.checkpoints[-1]


def l2_distance(a: Checkpoint, b: Checkpoint) -> float:
    """``∥a − b∥_{L²}`` for two checkpoints computed by the same method."""
    if a.freqs is not None and b.freqs is not None:
        coeffs: dict = {}
        for F, C, sign in ((a.freqs, a.coeffs, 1.0), (b.freqs, b.coeffs, -1.0)):
            for f, c in zip(map(tuple, F), C):
                coeffs[f] = coeffs.get(f, 0.0) + sign * c
        return float(math.sqrt(sum(abs(v) ** 2 for v in coeffs.values())))
    if a.grid_values is not None and b.grid_values is not None:
        d = a.grid_values[:-1] - b.grid_values[:-1]
        return float(np.sqrt(np.mean(np.abs(d) ** 2)))
    raise InvalidArgument("checkpoints were computed by different methods")


# ---------------------------------------------------------------------------
# engine


def _segments(index: np.ndarray, checkpoints: Sequence[int]):
    start = 0
    for N in checkpoints:
        stop = int(np.searchsorted(index, N, side="right"))
        yield N, start, stop
        start = stop


def _fourier_terms(observables) -> int:
    return int(np.prod([f.coeffs.size for f in observables]))


def _fourier_average(system: TorusRotation, observables, counts, samples: Samples, checkpoints, base_point):
    d = system.dim
    tot_freq = np.zeros((1, d), dtype=np.int64)
    tot_coef = np.ones(1, dtype=np.complex128)
    for f in observables:
        tot_freq = (tot_freq[:, None, :] + f.freqs[None, :, :]).reshape(-1, d)
        tot_coef = (tot_coef[:, None] * f.coeffs[None, :]).ravel()
    uniq, inverse = np.unique(tot_freq, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    T = tot_coef.size
    S = np.zeros(T, dtype=np.complex128)
    x0 = np.zeros(d) if base_point is None else np.asarray(base_point, dtype=np.float64)
    chunk = max(1, _CHUNK_ELEMENTS // max(T, 1))
    out = []
    for N, start, stop in _segments(samples.index, checkpoints):
        for lo in range(start, stop, chunk):
            hi = min(stop, lo + chunk)
            Z = np.ones((hi - lo, 1), dtype=np.complex128)
            for f, cnt in zip(observables, counts):
                shift = system.shifts([c[lo:hi] if c is not None else np.zeros(hi - lo, dtype=np.int64) for c in cnt])
                E = np.exp(2j * np.pi * (shift @ f.freqs.T.astype(np.float64)))
                Z = (Z[:, :, None] * E[:, None, :]).reshape(hi - lo, -1)
            S += samples.weight[lo:hi] @ Z
        C = np.zeros(uniq.shape[0], dtype=np.complex128)
        np.add.at(C, inverse, tot_coef * S / samples.normalizer(N))
        value = complex(np.exp(2j * np.pi * (uniq @ x0)) @ C)
        norm = float(np.sqrt(np.sum(np.abs(C) ** 2)))
        out.append(Checkpoint(int(N), value, norm, uniq, C.copy()))
    return out


def _grid_average(system: ErgodicSystem, observables, counts, samples: Samples, checkpoints, grid, base_point):
    if base_point is None:
        base_point = getattr(system, "base_point", None)
    x0 = np.zeros(system.dim) if base_point is None else np.asarray(base_point, dtype=np.float64)
    pts = np.vstack([grid, x0[None, :]])
    P = pts.shape[0]
    acc = np.zeros(P, dtype=np.complex128)
    chunk = max(1, _CHUNK_ELEMENTS // (4 * P * system.dim))
    out = []
    for N, start, stop in _segments(samples.index, checkpoints):
        for lo in range(start, stop, chunk):
            hi = min(stop, lo + chunk)
            prod = np.ones((hi - lo, P), dtype=np.complex128)
            for f, cnt in zip(observables, counts):
                c = [v[lo:hi] if v is not None else np.zeros(hi - lo, dtype=np.int64) for v in cnt]
                prod *= f(system.points(c, pts))
            acc += samples.weight[lo:hi] @ prod
        vals = acc / samples.normalizer(N)
        norm = float(np.sqrt(np.mean(np.abs(vals[:-1]) ** 2)))
        out.append(Checkpoint(int(N), complex(vals[-1]), norm, grid_values=vals.copy()))
    return out


def multiple_average(
    system: ErgodicSystem,
    observables: Sequence,
    iterates: Sequence,
    scheme: str = "cesaro",
    table: Optional[VonMangoldtTable] = None,
    trick: Optional[WTrick] = None,
    checkpoints: Sequence[int] = (1000,),
    grid: Optional[np.ndarray] = None,
    base_point=None,
    method: str = "auto",
) -> AverageSeries:
    """Running multiple average at each cutoff in ``checkpoints``.

    Args:
        system: the measure-preserving system; its maps must commute.
        observables: ``f_1, …, f_ℓ``.
        iterates: one row per observable; a row lists one iterate per map
            (``None`` for the identity).  Single-map systems accept a bare
            iterate instead of a row.  An iterate is a HardyExpr, text in
            the expression grammar, a RealPoly, an :class:`Iterate`, or a
            pair ``(spec, multiplier)``.
        scheme: one of :data:`SCHEMES`.
        table, trick: needed by the prime, lambda and w_tricked schemes.
        checkpoints: increasing cutoffs ``N``.
        grid: starting points for the grid method (default 10^3 Halton points).
        base_point: point at which ``value`` is reported (default 0).
        method: ``"auto"``, ``"fourier"`` or ``"grid"``.

    Raises:
        InvalidSystem: if the maps do not commute.
        InvalidArgument: on inconsistent inputs.
    """
    system.check_commutation()
    checkpoints = sorted(int(N) for N in checkpoints)
    obs = [as_observable(f, system.dim) for f in observables]
    table_it = _iterate_table(iterates, len(obs), system.n_maps)
    samples = scheme_samples(scheme, checkpoints[-1], table, trick)
    counts = []
    ambiguous = 0
    for row in table_it:
        crow = []
        for it in row:
            if it is None:
                crow.append(None)
            else:
                c, amb = it.floors(samples.argument)
                ambiguous += amb
                crow.append(c)
        counts.append(crow)
    fourier_ok = (
        isinstance(system, TorusRotation)
        and all(isinstance(f, TrigPoly) for f in obs)
        and _fourier_terms(obs) <= FOURIER_MAX_TERMS
    )
    if method == "fourier" and not fourier_ok:
        raise Unsupported("the Fourier method needs a torus rotation and trigonometric polynomials")
    if method == "auto":
        method = "fourier" if fourier_ok else "grid"
    if method == "fourier":
        cps = _fourier_average(system, obs, counts, samples, checkpoints, base_point)
    else:
        grid = sample_grid(system.dim) if grid is None else np.asarray(grid, dtype=np.float64)
        cps = _grid_average(system, obs, counts, samples, checkpoints, grid, base_point)
    bound = product_bound(obs) if scheme in ("cesaro", "prime") else None
    return AverageSeries(
        scheme,
        method,
        tuple(cps),
        None if trick is None else trick.w,
        None if trick is None else trick.b,
        ambiguous,
        bound,
    )


# ---------------------------------------------------------------------------
# comparison with the W-tricked weights


def check_iterate_conditions(iterates) -> None:
    """Raise :class:`HypothesisViolation` if an iterate is neither far from nor
    essentially equal to a real multiple of an integer polynomial."""
    for row in iterates:
        for spec in (row if _is_row(row) else [row]):
            it = Iterate.of(spec)
            if it is not None and it.condition() == NEITHER:
                raise HypothesisViolation(f"iterate {it.func} satisfies neither growth condition")


def comparison_gap(
    system: ErgodicSystem,
    observables: Sequence,
    iterates: Sequence,
    trick: WTrick,
    table: VonMangoldtTable,
    N: int,
    grid: Optional[np.ndarray] = None,
    check: bool = True,
) -> float:
    """L² norm of the ``(Λ_{w,b} − 1)``-weighted multiple average at cutoff ``N``.

    Raises:
        HypothesisViolation: if ``check`` and an iterate fails both growth conditions.
    """
    if check:
        check_iterate_conditions(iterates)
    series = multiple_average(system, observables, iterates, "w_tricked", table, trick, (N,), grid)
    return series.last.norm


@dataclass(frozen=True)
class GapSweep:
    w: int
    N: int
    by_b: dict
    max_gap: float
    argmax_b: int


def comparison_gap_max(
    system, observables, iterates, w: int, table: VonMangoldtTable, N: int, grid=None, check: bool = True
) -> GapSweep:
    """:func:`comparison_gap` for every ``b`` coprime to ``W``, with the maximum."""
    if check:
        check_iterate_conditions(iterates)
    by_b = {}
    for b in coprime_residues(w):
        by_b[b] = comparison_gap(system, observables, iterates, primorial_trick(w, b), table, N, grid, False)
    b_max = max(by_b, key=by_b.get)
    return GapSweep(w, N, by_b, by_b[b_max], b_max)


# ---------------------------------------------------------------------------
# recurrence


@dataclass(frozen=True)
class RecurrenceReport:
    """Average of ``μ(A ∩ T^{-m_1(n)}A ∩ ⋯ ∩ T^{-m_k(n)}A)`` and the floor ``μ(A)^{k+1}``."""

    average: float
    lower_bound: float
    measure: float
    scheme: str
    N: int
    k: int

    @property
    def margin(self) -> float:
        return self.average - self.lower_bound


def recurrence_experiment(
    system: TorusRotation,
    A,
    iterates: Sequence,
    scheme: str = "prime",
    table: Optional[VonMangoldtTable] = None,
    N: int = 10_000,
    trick: Optional[WTrick] = None,
) -> RecurrenceReport:
    """Exact intersection measures along the scheme's samples.

    ``iterates[i]`` gives ``m_i``: one iterate per map, or one bare iterate
    for a single-map system.  ``A`` is a finite union of arcs (circle) or a
    product of arc unions (torus).

    Raises:
        UnsupportedSet: if ``A`` is not of that form or ``system`` is not a torus rotation.
    """
    if not isinstance(system, TorusRotation):
        raise UnsupportedSet("recurrence sets are modelled on torus rotations only")
    system.check_commutation()
    S = as_set(A, system.dim)
    rows = _iterate_table(iterates, len(iterates), system.n_maps)
    samples = scheme_samples(scheme, N, table, trick)
    shifts = []
    for row in rows:
        cnt = []
        for it in row:
            cnt.append(it.floors(samples.argument)[0] if it is not None else np.zeros(samples.index.size, dtype=np.int64))
        shifts.append(system.shifts(cnt))
    shifts = np.stack(shifts, axis=1)  # (n, k, d)
    meas = np.fromiter(
        (intersection_measure(S, shifts[t]) for t in range(shifts.shape[0])), dtype=np.float64, count=shifts.shape[0]
    )
    avg = float(samples.weight @ meas / samples.normalizer(N))
    mu = S.measure
    k = len(rows)
    return RecurrenceReport(avg, mu ** (k + 1), mu, scheme, N, k)


# ---------------------------------------------------------------------------
# nil orbits


@dataclass(frozen=True)
class NilReport:
    """Per-observable averages along ``g^{⌊a(p)⌋} x`` and their Haar integrals."""

    averages: tuple
    haar: tuple
    residuals: tuple
    N: int
    samples: int
    names: tuple

    @property
    def max_residual(self) -> float:
        return max(self.residuals)


def nil_orbit_equidistribution(
    system: ErgodicSystem,
    a,
    observables: Sequence,
    N: int,
    table: Optional[VonMangoldtTable] = None,
    scheme: str = "prime",
    base_point=None,
) -> NilReport:
    """``|E_p F(g^{⌊a(p)⌋} x) − ∫_Y F|`` for each test observable ``F``.

    ``Y`` is the orbit closure of ``x`` (the system's base point by default).
    """
    if scheme not in ("prime", "cesaro"):
        raise InvalidArgument("nil-orbit experiments use the prime or cesaro scheme")
    if system.n_maps != 1:
        raise InvalidSystem("nil-orbit experiments use a single map")
    if base_point is None:
        base_point = getattr(system, "base_point", None)
    x0 = np.zeros(system.dim) if base_point is None else np.asarray(base_point, dtype=np.float64)
    samples = scheme_samples(scheme, N, table)
    m, _ = Iterate.of(a).floors(samples.argument)
    pts = system.points([m], x0[None, :])[:, 0, :]
    avgs, haar, res, names = [], [], [], []
    for f in observables:
        f = as_observable(f, system.dim)
        v = complex(samples.weight @ f(pts) / samples.normalizer(N))
        h = system.haar_integral(f, tuple(x0))
        avgs.append(v)
        haar.append(h)
        res.append(abs(v - h))
        names.append(f.name)
    return NilReport(tuple(avgs), tuple(haar), tuple(res), int(N), int(samples.index.size), tuple(names))


# ---------------------------------------------------------------------------
# short intervals


@dataclass(frozen=True)
class ShortIntervalReport:
    """Both sides of the short-interval inequality and the residual bound.

    ``left = ∥E_{r<=R}(Λ_{w,b}(r)−1)A_r∥`` and
    ``right = E_{r<=R}∥E_{r<=n<=r+L(r)}(Λ_{w,b}(n)−1)A_n∥``.  ``residual``
    bounds ``left − right`` by the triangle inequality:
    ``(1/R)Σ_n |1_{n<=R} − ρ(n)|·|Λ_{w,b}(n)−1|·∥A_n∥`` where ``ρ(n)`` is
    the total window weight received by ``n``.
    """

    left: float
    right: float
    residual: float
    R: int

    @property
    def holds(self) -> bool:
        return self.left <= self.right + self.residual + 1e-12

    @property
    def slack(self) -> float:
        return self.right + self.residual - self.left


def short_interval_average(
    A: Callable[[np.ndarray], np.ndarray],
    table: VonMangoldtTable,
    trick: WTrick,
    L,
    R: int,
    block: int = 64,
) -> ShortIntervalReport:
    """Evaluate both sides of the short-interval inequality.

    Args:
        A: ``A(n) -> values`` for an integer array ``n``; returns shape
            ``(len(n), P)`` giving ``A_n`` on ``P`` sample points (norms are
            grid root-mean-squares), or shape ``(len(n),)`` for constants.
        L: window length as an exponent ``λ`` (``L = t^λ``), an LSpec, or a callable.
        R: outer cutoff.
    """
    from ..equidist import _window_lengths

    if R < 1:
        raise InvalidArgument(f"R must be >= 1, got {R}")
    r = np.arange(1, R + 1, dtype=np.int64)
    lengths = np.maximum(_window_lengths(L, r), 0)
    top = int(np.max(r + lengths))
    n = np.arange(1, top + 1, dtype=np.int64)
    c = w_tricked_range(table, trick, 1, top) - 1.0
    vals = np.asarray(A(n), dtype=np.complex128)
    if vals.ndim == 1:
        vals = vals[:, None]
    norms = np.sqrt(np.mean(np.abs(vals) ** 2, axis=1))
    # window weight received by each n: Σ_{r<=R, r<=n<=r+L(r)} 1/(L(r)+1)
    inv = 1.0 / (lengths + 1.0)
    diff = np.zeros(top + 2)
    np.add.at(diff, r, inv)
    np.add.at(diff, r + lengths + 1, -inv)
    rho = np.cumsum(diff)[1 : top + 1]
    indicator = (n <= R).astype(np.float64)
    residual = float(np.sum(np.abs(indicator - rho) * np.abs(c) * norms) / R)
    P = vals.shape[1]
    left_vec = np.zeros(P, dtype=np.complex128)
    sq = np.zeros(R)
    for lo in range(0, P, block):
        hi = min(P, lo + block)
        weighted = c[:, None] * vals[:, lo:hi]
        left_vec[lo:hi] = weighted[:R].sum(axis=0) / R
        prefix = np.vstack([np.zeros((1, hi - lo)), np.cumsum(weighted, axis=0)])
        win = (prefix[r + lengths] - prefix[r - 1]) * inv[:, None]
        sq += np.sum(np.abs(win) ** 2, axis=1)
    right_total = float(np.mean(np.sqrt(sq / P)))
    left = float(np.sqrt(np.mean(np.abs(left_vec) ** 2)))
    return ShortIntervalReport(left, right_total, residual, int(R))
