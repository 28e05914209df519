"""Discrepancy, Erdős–Turán majorants, Weyl major-arc certificates and
the floor-identity scans on short windows.

Three floor scans are provided:

* :func:`floor_match_fast` compares ``⌊a(N+h)⌋`` with the floor of a Taylor
  model on ``[N, N+L]`` (fast-growing ``a``).
* :func:`floor_match_slow` checks that ``⌊a⌋`` is constant on whole windows
  (sub-fractional ``a``).
* :func:`poly_bad_set` freezes a slowly varying shift ``x(n) ≈ x(r)`` next to
  a polynomial and checks the identity outside an exceptional set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import mpmath
import numpy as np

from .errors import (
    ClassificationUnstable,
    CounterexampleCandidate,
    DegenerateMeasure,
    InvalidArgument,
    MarkerRequired,
    WindowTooEarly,
)
from .floors import floor_expr, resolve_floors
from .hardy.expr import as_expr, log, t
from .hardy.growth import LSpec, classify, compare
from .hardy.taylor import taylor_model
from .numtheory import VonMangoldtTable, WTrick, w_tricked_range
from .poly import RealPoly

#: Smallest constant (0.1 grid) with discrepancy <= C·(1/M + Σ|ν̂(m)|/m) on the
#: property corpus of :func:`et_corpus`.  Recomputed by the test suite.
ET_C_PIN = 0.5

#: Default exponent in the Weyl certificate radius ``δ^{-C}``.
WEYL_C = 10.0

_WEYL_CHUNK = 1 << 20
_WEYL_MAX_Q = 10**9


def e(x):
    """``e(x) = exp(2πix)``."""
    return np.exp(2j * np.pi * np.asarray(x, dtype=np.float64))


# ---------------------------------------------------------------------------
# discrepancy and Erdős–Turán


@dataclass(frozen=True)
class DiscrepancyReport:
    """Empirical count of ``{x_n}`` in the closed interval ``[a, b]``."""

    interval: tuple
    count_in: int
    total: int
    discrepancy: float
    et_majorant: Optional[float] = None
    M: Optional[int] = None


def _fractional(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64).ravel()
    return v - np.floor(v)


def discrepancy(values, a: float, b: float) -> DiscrepancyReport:
    """``|#{n : {x_n} ∈ [a, b]}/N − (b − a)|``.

    Raises:
        InvalidArgument: on an empty sequence or unless ``0 <= a <= b <= 1``.
    """
    if not 0.0 <= a <= b <= 1.0:
        raise InvalidArgument(f"need 0 <= a <= b <= 1, got [{a}, {b}]")
    x = _fractional(values)
    if x.size == 0:
        raise InvalidArgument("discrepancy of an empty sequence")
    count = int(np.count_nonzero((x >= a) & (x <= b)))
    return DiscrepancyReport((a, b), count, int(x.size), abs(count / x.size - (b - a)))


def fourier_coefficients(values, M: int, weights=None) -> np.ndarray:
    """``ν̂(m) = Σ w_n e(−m x_n) / Σ w_n`` for ``m = 1..M``."""
    x = _fractional(values)
    if weights is None:
        w = np.full(x.size, 1.0 / max(x.size, 1))
    else:
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.shape != x.shape:
            raise InvalidArgument("weights and values differ in length")
        total = w.sum()
        if total == 0.0:
            raise DegenerateMeasure("all weights are zero")
        w = w / total
    out = np.empty(M, dtype=np.complex128)
    step = max(1, 4_000_000 // max(x.size, 1))
    for lo in range(0, M, step):
        m = np.arange(lo + 1, min(M, lo + step) + 1)
        out[lo : lo + m.size] = np.exp(-2j * np.pi * np.outer(m, x)) @ w
    return out


def erdos_turan_majorant(values, M: int, C: float = 1.0, weights=None) -> float:
    """``C·(1/M + Σ_{m<=M} |ν̂(m)|/m)`` for the empirical or weighted measure.

    Args:
        values: the points ``x_n`` (reduced mod 1 internally).
        M: truncation, at least 1.
        C: the absolute constant.
        weights: optional nonnegative weights, for instance ``Λ_{w,b}(n)``.

    Raises:
        InvalidArgument: if ``M < 1`` or ``C <= 0``.
        DegenerateMeasure: if every weight is zero.
    """
    if M < 1 or C <= 0:
        raise InvalidArgument(f"need M >= 1 and C > 0, got M={M}, C={C}")
    coeffs = np.abs(fourier_coefficients(values, M, weights))
    return float(C * (1.0 / M + np.sum(coeffs / np.arange(1, M + 1))))


def worst_discrepancy(values) -> float:
    """``sup`` over closed intervals ``[a, b] ⊆ [0, 1]`` of the discrepancy."""
    x = np.sort(_fractional(values))
    n = x.size
    # Closed intervals with endpoints at sample points overshoot by
    # (j - i + 1)/n - (x_j - x_i); open gaps undershoot by (x_j - x_i) - (j - i - 1)/n.
    i = np.arange(n)
    over = (i[None, :] - i[:, None] + 1) / n - (x[None, :] - x[:, None])
    over = np.max(np.where(i[None, :] >= i[:, None], over, -np.inf))
    ext = np.concatenate(([0.0], x, [1.0]))
    gaps = (ext[None, :] - ext[:, None]) - (np.arange(n + 2)[None, :] - np.arange(n + 2)[:, None] - 1) / n
    under = np.max(np.where(np.arange(n + 2)[None, :] > np.arange(n + 2)[:, None], gaps, -np.inf))
    return float(max(over, under, 0.0))


def et_corpus(seed: int = 0) -> list[tuple[str, np.ndarray, int]]:
    """Property corpus ``(name, values, M)`` used to pin :data:`ET_C_PIN`."""
    rng = np.random.default_rng(seed)
    golden = (math.sqrt(5) - 1) / 2
    corpus = []
    for N in (50, 200, 1000):
        x = np.arange(1, N + 1) * golden
        for M in (5, 20, 100):
            corpus.append((f"golden N={N} M={M}", x, M))
        corpus.append((f"iid N={N} M=20", rng.random(N), 20))
        corpus.append((f"grid N={N} M={N // 2}", np.arange(N) / N, N // 2))
    corpus.append(("point mass M=10", np.zeros(10), 10))
    corpus.append(("sqrt2 orbit N=500 M=50", np.arange(1, 501) * math.sqrt(2), 50))
    return corpus


def pin_et_constant(corpus=None, step: float = 0.1) -> float:
    """Smallest multiple of ``step`` with worst discrepancy <= majorant on ``corpus``."""
    corpus = et_corpus() if corpus is None else corpus
    ratio = max(worst_discrepancy(x) / erdos_turan_majorant(x, M, 1.0) for _, x, M in corpus)
    return round(math.ceil(ratio / step - 1e-9) * step, 10)


# ---------------------------------------------------------------------------
# Weyl major arcs


@dataclass(frozen=True)
class WeylVerdict:
    """Outcome of :func:`weyl_major_arc_test`.

    ``q`` is the certifying denominator (``None`` on the minor arc) and
    ``certificates[k-1] = N^k·∥q a_k∥_T`` for ``k = 1..d``.
    """

    magnitude: float
    delta: float
    major_arc: bool
    q: Optional[int]
    certificates: tuple
    radius: float


def _coefficient_fracs(p: RealPoly, k: int, q: np.ndarray) -> np.ndarray:
    exact = p.exact[k] if p.exact is not None and k < len(p.exact) and p.exact[k] is not None else None
    if exact is not None:
        f = Fraction(exact)
        return ((q.astype(object) * f.numerator) % f.denominator).astype(np.float64) / f.denominator
    # The float coefficient is a dyadic rational; exact integer arithmetic mod 1.
    num, den = Fraction(p.coeffs[k]).as_integer_ratio()
    return ((q.astype(object) * num) % den).astype(np.float64) / den


def weyl_major_arc_test(p: RealPoly, N: int, delta: float, C: float = WEYL_C) -> WeylVerdict:
    """Certify a large Weyl sum by a common denominator ``q``.

    Computes ``|E_{n<=N} e(p(n))|``.  Above ``delta`` it searches the least
    ``1 <= q <= δ^{-C}`` with ``N^k ∥q a_k∥_T <= δ^{-C}`` for every ``k``.

    Raises:
        InvalidArgument: unless ``deg p >= 1`` and ``0 < delta < 1``.
        CounterexampleCandidate: if the search is exhausted; the report is attached.
    """
    d = p.degree
    if d < 1 or not 0.0 < delta < 1.0 or N < 1:
        raise InvalidArgument(f"need deg p >= 1, 0 < delta < 1, N >= 1 (deg={d}, delta={delta}, N={N})")
    n = np.arange(1, N + 1)
    magnitude = float(abs(np.mean(np.exp(2j * np.pi * p.frac(n)))))
    radius = delta ** (-C)
    if magnitude <= delta:
        return WeylVerdict(magnitude, delta, False, None, (), radius)
    found = find_major_arc_q(p, N, radius)
    if found is None:
        report = WeylVerdict(magnitude, delta, True, None, (), radius)
        raise CounterexampleCandidate(
            f"|E e(p(n))| = {magnitude:.6g} > {delta} but no q <= {radius:.6g} certifies the major arc", report
        )
    return WeylVerdict(magnitude, delta, True, found[0], found[1], radius)


def find_major_arc_q(p: RealPoly, N: int, radius: float) -> Optional[tuple[int, tuple]]:
    """Least ``1 <= q <= radius`` with ``N^k ∥q a_k∥_T <= radius`` for all ``1 <= k <= deg p``.

    Returns ``(q, certificates)`` or ``None``.  Coefficients are reduced with
    exact integer arithmetic, so ``q·a_k mod 1`` is exact for any ``q``.
    """
    d = p.degree
    qmax = int(min(math.floor(radius), _WEYL_MAX_Q))
    for lo in range(1, qmax + 1, _WEYL_CHUNK):
        q = np.arange(lo, min(qmax, lo + _WEYL_CHUNK - 1) + 1, dtype=np.int64)
        worst = np.zeros(q.size)
        for k in range(1, d + 1):
            f = _coefficient_fracs(p, k, q)
            worst = np.maximum(worst, float(N) ** k * np.minimum(f, 1.0 - f))
        ok = np.flatnonzero(worst <= radius)
        if ok.size:
            qq = int(q[ok[0]])
            certs = []
            for k in range(1, d + 1):
                v = float(_coefficient_fracs(p, k, np.array([qq]))[0])
                certs.append(float(N) ** k * min(v, 1.0 - v))
            return qq, tuple(certs)
    return None


# ---------------------------------------------------------------------------
# floor scans


@dataclass(frozen=True)
class FloorMatchReport:
    """Result of a floor-identity scan on one window ``[N, N+L]``.

    ``mismatch_count`` counts the ``h`` where the identity fails, over the
    ``total - ambiguous_count`` decidable points.  For the polynomial regime
    ``bad_set_size`` and ``weighted_mass`` describe the exceptional set.
    """

    N: int
    L: int
    total: int
    mismatch_count: int
    mismatch_fraction: float
    regime: str
    ambiguous_count: int = 0
    theta: Optional[float] = None
    outside_band: int = 0
    bad_set_size: Optional[int] = None
    bad_fraction: Optional[float] = None
    weighted_mass: Optional[float] = None
    interval_discrepancies: tuple = ()
    mismatches: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64), repr=False)

    def csv_row(self) -> dict:
        return {
            "N": self.N,
            "L": self.L,
            "mismatch_count": self.mismatch_count,
            "fraction": self.mismatch_fraction,
            "bad_set_size": "" if self.bad_set_size is None else self.bad_set_size,
            "weighted_mass": "" if self.weighted_mass is None else self.weighted_mass,
        }


def floor_match_fast(e, N: int, L: int, k: int, intervals: Sequence[tuple] = ()) -> FloorMatchReport:
    """Compare ``⌊e(N+h)⌋`` with ``⌊p_N(h)⌋`` for every ``0 <= h <= L``.

    ``p_N`` is the degree-``k`` Taylor model.  Mismatches can only occur where
    ``{p_N(h)}`` lies within ``θ_N`` of an integer; points outside that band
    are counted in ``outside_band`` (which the remainder bound forces to zero).
    ``intervals`` lists ``(c, d)`` for which the discrepancy of ``{p_N(h)}`` is
    also reported.
    """
    e = as_expr(e)
    model = taylor_model(e, N, L, k)
    h = np.arange(L + 1)
    truth = floor_expr(e, N + h)
    approx = model.floors(h)
    ambiguous = truth.ambiguous | approx.ambiguous
    bad = (truth.floor != approx.floor) & ~ambiguous
    theta = model.theta_float
    band = (approx.frac <= theta) | (approx.frac >= 1.0 - theta)
    decided = int((~ambiguous).sum())
    discs = tuple(discrepancy(approx.frac[~ambiguous], c, d).discrepancy for c, d in intervals)
    return FloorMatchReport(
        N=int(N),
        L=int(L),
        total=int(L + 1),
        mismatch_count=int(bad.sum()),
        mismatch_fraction=float(bad.sum() / max(decided, 1)),
        regime="fast",
        ambiguous_count=int(ambiguous.sum()),
        theta=theta,
        outside_band=int((bad & ~band).sum()),
        interval_discrepancies=discs,
        mismatches=np.flatnonzero(bad),
    )


LLike = Union[LSpec, float, Callable[[np.ndarray], np.ndarray]]


def _window_lengths(L: LLike, N: np.ndarray) -> np.ndarray:
    if isinstance(L, LSpec):
        vals = L(N.astype(np.float64))
    elif callable(L):
        vals = L(N.astype(np.float64))
    else:
        vals = N.astype(np.float64) ** float(L)
    return np.floor(np.asarray(vals, dtype=np.float64) + 1e-12).astype(np.int64)


@dataclass(frozen=True)
class SlowReport:
    """Per-window result of :func:`floor_match_slow` on ``1 <= N <= R``.

    ``good[N-1]`` says whether ``⌊a(N+h)⌋ = ⌊a(N)⌋`` for every ``h ∈ [0, L(N)]``.
    Windows containing an ambiguous point are excluded from the fractions.
    ``curve`` lists ``(R_i, bad fraction on [1, R_i])``.
    """

    R: int
    good: np.ndarray = field(repr=False)
    lengths: np.ndarray = field(repr=False)
    excluded: np.ndarray = field(repr=False)
    bad_fraction: float
    curve: tuple
    hypothesis_met: bool

    def windows(self, lo: int = 1, hi: Optional[int] = None):
        hi = self.R if hi is None else hi
        for N in range(lo, hi + 1):
            yield N, int(self.lengths[N - 1]), bool(self.good[N - 1]), bool(self.excluded[N - 1])


def _slow_hypothesis(e) -> bool:
    try:
        return bool(classify(e).sub_fractional and compare(e, log(t)) == "succ")
    except (ClassificationUnstable, MarkerRequired):
        return False


def floor_match_slow(e, R: int, L: LLike, curve_points: int = 10) -> SlowReport:
    """Scan every window ``[N, N+L(N)]`` for ``1 <= N <= R``.

    Floors of ``e`` are evaluated once on ``[1, R + L(R)]``; a window is good
    when no floor change occurs inside it.  ``hypothesis_met`` records whether
    ``e`` is sub-fractional and ``≻ log t`` on the comparison schedule; the
    scan runs either way.
    """
    if R < 1:
        raise InvalidArgument(f"R must be >= 1, got {R}")
    e = as_expr(e)
    Ns = np.arange(1, R + 1)
    lengths = np.maximum(_window_lengths(L, Ns), 0)
    top = int(np.max(Ns + lengths))
    vals = floor_expr(e, np.arange(1, top + 1))
    change = np.concatenate(([0], (np.diff(vals.floor) != 0).astype(np.int64)))
    amb = vals.ambiguous.astype(np.int64)
    cchange = np.cumsum(change)
    camb = np.concatenate(([0], np.cumsum(amb)))
    # positions are 0-based indices n-1; window covers indices N-1 .. N-1+L.
    lo, hi = Ns - 1, Ns - 1 + lengths
    changes = cchange[hi] - cchange[lo]
    excluded = (camb[hi + 1] - camb[lo]) > 0
    good = changes == 0
    curve = []
    for i in range(1, curve_points + 1):
        Ri = max(1, R * i // curve_points)
        use = ~excluded[:Ri]
        curve.append((Ri, float((~good[:Ri] & use).sum() / max(use.sum(), 1))))
    use = ~excluded
    frac = float((~good & use).sum() / max(use.sum(), 1))
    return SlowReport(R, good, lengths, excluded, frac, tuple(curve), _slow_hypothesis(e))


def _exact_poly_frac(p: RealPoly, n: int) -> Fraction:
    """``{p(n)}`` exactly, reading each float coefficient as the dyadic rational it stores."""
    total = Fraction(0)
    for j, c in enumerate(p.coeffs):
        ex = p.exact[j] if p.exact is not None and j < len(p.exact) and p.exact[j] is not None else Fraction(c)
        total += Fraction(ex) * n**j
    return total - math.floor(total)


def poly_bad_set(
    p: RealPoly,
    x,
    table: VonMangoldtTable,
    trick: WTrick,
    r: int,
    L: int,
    epsilon: float,
    check_precondition: bool = True,
) -> FloorMatchReport:
    """Exceptional set ``B_{r,ε}`` for freezing ``x`` at ``r`` on ``[r, r+L]``.

    ``B = {n : {p(n) + x(r)} ∈ [0, ε] ∪ [1−ε, 1)}``.  The report counts the
    ``n ∉ B`` with ``⌊p(n) + x(n)⌋ ≠ ⌊p(n) + x(r)⌋`` as mismatches, and gives
    ``|B|/L`` and ``(1/L) Σ Λ_{w,b}(n) 1_B(n)``.

    Raises:
        WindowTooEarly: if ``check_precondition`` and ``L·|x'(r)| >= ε``.
        OutOfRange: if ``W(r+L)+b`` exceeds the table.
        InvalidArgument: on bad ``epsilon`` or ``L``.
    """
    if not 0.0 < epsilon <= 0.5 or L < 1:
        raise InvalidArgument(f"need 0 < epsilon <= 1/2 and L >= 1, got {epsilon}, {L}")
    x = as_expr(x)
    drift = float(abs(x.derivative(1).mp(r))) * L
    if check_precondition and drift >= epsilon:
        raise WindowTooEarly(f"L·|x'(r)| = {drift:.6g} is not below epsilon = {epsilon}")
    weights = w_tricked_range(table, trick, r, r + L)
    n = np.arange(r, r + L + 1)
    xr = x.mp(r)
    xr_frac = float(xr - mpmath.floor(xr))
    y = np.mod(p.frac(n) + xr_frac, 1.0)
    in_B = (y <= epsilon) | (y >= 1.0 - epsilon)
    d = x(n.astype(np.float64)) - float(xr)

    def exact(i: int):
        ni = int(n[i])
        yy = mpmath.mpf(_exact_poly_frac(p, ni)) + xr
        yy -= mpmath.floor(yy)
        return yy + (x.mp(ni) - xr)

    z = resolve_floors(y + d, exact)
    mismatch = (z.floor != 0) & ~in_B & ~z.ambiguous
    decided = int((~in_B & ~z.ambiguous).sum())
    return FloorMatchReport(
        N=int(r),
        L=int(L),
        total=int(L + 1),
        mismatch_count=int(mismatch.sum()),
        mismatch_fraction=float(mismatch.sum() / max(decided, 1)),
        regime="poly",
        ambiguous_count=int(z.ambiguous.sum()),
        theta=drift,
        bad_set_size=int(in_B.sum()),
        bad_fraction=float(in_B.sum() / L),
        weighted_mass=float(np.sum(weights * in_B) / L),
        mismatches=n[mismatch],
    )
