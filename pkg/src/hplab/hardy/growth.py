"""Growth comparison, classification and parameter selection by ratio sampling.

Asymptotic relations are decided on the fixed schedule
``t ∈ {10^4, 10^6, 10^8, 10^10}``.  With ``u = log t`` and
``r(t) = log|f(t)| − log|g(t)|`` the increments of ``r`` between schedule
points vote: all clearly positive means ``f ≻ g``, all clearly negative
means ``f ≺ g``, all negligible means ``f ∼ g``.  Opposite signs are
reported as :class:`~hplab.errors.ClassificationUnstable`, never guessed.

Exponents are read off the slopes ``s_i = Δ log|a| / Δu`` through the model
``s_i = A + B·φ_i`` with ``φ_i = Δ log u / Δu``.  The model is exact for
``C·t^A·(log t)^B``, so ``A`` is the polynomial growth exponent and ``B``
the logarithmic power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from ..errors import ClassificationUnstable, MarkerRequired, PreconditionViolation, SelectionFailure
from ..poly import IRRATIONAL, RATIONAL, RealPoly
from .expr import (
    ONE,
    ZERO,
    Const,
    HardyExpr,
    Mul,
    Node,
    Pow,
    T,
    Var,
    add,
    as_expr,
    log,
    mul,
    power,
    rational,
    real_const,
    t,
    terms_of,
)

SCHEDULE = (1e4, 1e6, 1e8, 1e10)
SLOPE_TOL = 5e-4
DELTA_MIN = 0.01
K_CAP = 40

SUCC, PREC, SIM = "succ", "prec", "sim"
FAR = "far-from-rational-polys"
ESSENTIALLY_RATIONAL = "essentially-rational-poly"
NEITHER = "neither"


def _u(schedule=SCHEDULE) -> np.ndarray:
    return np.log(np.asarray(schedule, dtype=np.float64))


def log_profile(e, schedule=SCHEDULE) -> np.ndarray:
    """``log|e(t)|`` at the schedule points (high precision evaluation)."""
    e = as_expr(e)
    return np.array([e.log_abs(x) for x in schedule])


def compare_profiles(lf: np.ndarray, lg: np.ndarray, schedule=SCHEDULE, label: str = "") -> str:
    u = _u(schedule)
    if np.isneginf(lf).all() and np.isneginf(lg).all():
        return SIM
    if np.isneginf(lf).all():
        return PREC
    if np.isneginf(lg).all():
        return SUCC
    r = lf - lg
    slopes = np.diff(r) / np.diff(u)
    votes = [SUCC if s > SLOPE_TOL else PREC if s < -SLOPE_TOL else SIM for s in slopes]
    if SUCC in votes and PREC in votes:
        raise ClassificationUnstable(
            f"growth comparison {label} changes direction across the schedule (slopes {np.round(slopes, 6).tolist()})"
        )
    if len(set(votes)) == 1:
        return votes[0]
    # Mixed between a clear trend and a flat stretch: the tail decides.
    return votes[-1]


def compare(f, g, schedule=SCHEDULE) -> str:
    """Growth comparison of ``f`` against ``g``: ``"succ"``, ``"prec"`` or ``"sim"``.

    Raises:
        ClassificationUnstable: if the log-ratio trend changes sign.
    """
    f, g = as_expr(f), as_expr(g)
    return compare_profiles(log_profile(f, schedule), log_profile(g, schedule), schedule, f"{f.text} vs {g.text}")


@dataclass(frozen=True)
class GrowthFit:
    """Fitted ``|a(t)| ≈ C·t^A·(log t)^B`` from schedule slopes."""

    A: float
    B: float
    residual: float


def growth_fit(e, schedule=SCHEDULE, profile: Optional[np.ndarray] = None) -> GrowthFit:
    lp = log_profile(e, schedule) if profile is None else profile
    if np.isneginf(lp).any():
        return GrowthFit(-math.inf, 0.0, 0.0)
    u = _u(schedule)
    du = np.diff(u)
    slopes = np.diff(lp) / du
    phi = np.diff(np.log(u)) / du
    M = np.column_stack([np.ones_like(phi), phi])
    coef, *_ = np.linalg.lstsq(M, slopes, rcond=None)
    resid = float(np.max(np.abs(M @ coef - slopes)))
    return GrowthFit(float(coef[0]), float(coef[1]), resid)


# --------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class Decomposition:
    """``e = g + p + q`` with ``q ∈ Q[t]``, ``p`` real with irrational content, ``g`` the rest."""

    g: HardyExpr
    p: HardyExpr
    q: HardyExpr
    p_poly: RealPoly
    q_poly: RealPoly

    def __iter__(self):
        return iter((self.g, self.p, self.q))


def monomial(node: Node) -> Optional[tuple[Const, int]]:
    """``(c, n)`` if ``node = c·t^n`` with integer ``n >= 0``, else ``None``."""
    if isinstance(node, Const):
        return node, 0
    if isinstance(node, Var):
        return ONE, 1
    if isinstance(node, Pow) and isinstance(node.base, Var) and node.exponent.is_integer() and node.exponent.exact >= 1:
        return ONE, int(node.exponent.exact)
    if isinstance(node, Mul) and len(node.factors) == 2 and isinstance(node.factors[0], Const):
        inner = monomial(node.factors[1])
        if inner is not None and inner[1] >= 1 and inner[0] is ONE:
            return node.factors[0], inner[1]
    return None


def _poly_from(terms: dict[int, Const], markers_default: str) -> RealPoly:
    if not terms:
        return RealPoly.zero()
    deg = max(terms)
    coeffs = [0.0] * (deg + 1)
    markers: list = [RATIONAL] * (deg + 1)
    for n, c in terms.items():
        coeffs[n] = float(c.value)
        markers[n] = RATIONAL if c.exact is not None else (c.marker or markers_default)
    return RealPoly(tuple(coeffs), tuple(markers))


def decompose(e) -> Decomposition:
    """Split ``e`` into its non-polynomial part, irrational and rational polynomials.

    Monomials ``c·t^n`` (``n >= 1``) go to ``q`` when ``c`` is rational and to
    ``p`` when ``c`` is marked irrational.  A constant term goes to ``q``
    when rational and to ``p`` otherwise (its rationality does not matter).
    Every other term goes to ``g``.

    Raises:
        MarkerRequired: if a non-constant monomial has an unmarked coefficient.
    """
    e = as_expr(e)
    g_terms, p_terms, q_terms = [], {}, {}
    for term in terms_of(e.node):
        mono = monomial(term)
        if mono is None:
            g_terms.append(term)
            continue
        c, n = mono
        if c.exact is not None:
            q_terms[n] = c
        elif n == 0 or c.marker == IRRATIONAL:
            p_terms[n] = c
        else:
            raise MarkerRequired(f"coefficient {c.label!r} of t^{n} in {e.text!r} needs irr(...) or a rational literal")

    def build(terms: dict[int, Const]) -> HardyExpr:
        return HardyExpr(add(*(mul(c, power(T, n)) for n, c in sorted(terms.items(), reverse=True))))

    return Decomposition(
        g=HardyExpr(add(*g_terms)),
        p=build(p_terms),
        q=build(q_terms),
        p_poly=_poly_from(p_terms, IRRATIONAL),
        q_poly=_poly_from(q_terms, RATIONAL),
    )


def condition(e) -> str:
    """Which of the comparison-theorem hypotheses ``e`` satisfies.

    ``"far-from-rational-polys"``: ``|e − q|/log t → ∞`` for every ``q ∈ Q[t]``;
    ``"essentially-rational-poly"``: ``e − q → 0`` for some ``q ∈ Q[t] + R``;
    otherwise ``"neither"``.
    """
    d = decompose(e)
    if d.p_poly.has_irrational_nonconstant():
        return FAR
    if d.g.is_constant() and isinstance(d.g.node, Const) and d.g.node.is_zero:
        return ESSENTIALLY_RATIONAL
    if compare(d.g, log(t)) == SUCC:
        return FAR
    if compare(d.g, 1) == PREC:
        return ESSENTIALLY_RATIONAL
    return NEITHER


@dataclass(frozen=True)
class GrowthClass:
    """Growth data of a function.

    ``degree`` is the least ``k >= 0`` with ``a ≪ t^k`` on the schedule.
    ``exponent`` and ``log_power`` come from :func:`growth_fit`.
    """

    degree: int
    sub_linear: bool
    sub_fractional: bool
    strongly_non_polynomial: bool
    condition: str
    exponent: float
    log_power: float
    schedule: tuple = field(default=SCHEDULE)

    @property
    def flags(self) -> set:
        names = ("sub_linear", "sub_fractional", "strongly_non_polynomial")
        return {n for n in names if getattr(self, n)}


def classify(e, schedule=SCHEDULE) -> GrowthClass:
    """Degree, growth flags and hypothesis tag of ``e``.

    Raises:
        ClassificationUnstable: if any comparison is inconsistent on the schedule.
        MarkerRequired: if the hypothesis tag depends on an unmarked coefficient.
    """
    e = as_expr(e)
    lp = log_profile(e, schedule)
    u = _u(schedule)
    votes = []
    degree = None
    for k in range(0, 65):
        v = compare_profiles(lp, k * u, schedule, f"{e.text} vs t^{k}")
        votes.append(v)
        if v in (PREC, SIM):
            degree = k
            break
    if degree is None:
        raise ClassificationUnstable(f"{e.text} outgrows t^64 on the schedule")
    fit = growth_fit(e, schedule, lp)
    sub_linear = compare_profiles(lp, u, schedule) == PREC
    sub_fractional = fit.A < SLOPE_TOL
    strongly = SIM not in votes
    return GrowthClass(
        degree=degree,
        sub_linear=sub_linear or sub_fractional,
        sub_fractional=sub_fractional,
        strongly_non_polynomial=strongly,
        condition=condition(e),
        exponent=fit.A,
        log_power=fit.B,
        schedule=tuple(schedule),
    )


def lemma41_check(a, schedule=SCHEDULE) -> bool:
    """``a/(t log²t) ≺ a' ≪ a/t`` on the schedule."""
    a = as_expr(a)
    da = a.derivative(1)
    lower = a / (t * log(t) ** 2)
    upper = a / t
    return compare(da, lower, schedule) == SUCC and compare(da, upper, schedule) in (PREC, SIM)


# --------------------------------------------------------------------------
# k and L selection


def pure_power(e) -> Optional[tuple[mpmath.mpf, mpmath.mpf]]:
    """``(C, α)`` when ``e = C·t^α``, else ``None``."""
    node = as_expr(e).node
    coeff = ONE
    if isinstance(node, Mul) and len(node.factors) == 2 and isinstance(node.factors[0], Const):
        coeff, node = node.factors[0], node.factors[1]
    if isinstance(node, Var):
        return coeff.value, mpmath.mpf(1)
    if isinstance(node, Pow) and isinstance(node.base, Var):
        return coeff.value, node.exponent.value
    return None


def _exact_power_exponent(e) -> Optional[Fraction]:
    node = as_expr(e).node
    if isinstance(node, Mul) and len(node.factors) == 2 and isinstance(node.factors[0], Const):
        node = node.factors[1]
    if isinstance(node, Var):
        return Fraction(1)
    if isinstance(node, Pow) and isinstance(node.base, Var):
        return node.exponent.exact
    return None


class DerivativeScale:
    """``log |a^{(k)}(t)|^{-1/k}`` on the schedule, with a closed form for ``C·t^α``."""

    def __init__(self, a, schedule=SCHEDULE):
        self.a = as_expr(a)
        self.schedule = tuple(schedule)
        self.u = _u(schedule)
        self.pure = pure_power(self.a)
        self.exact_exponent = _exact_power_exponent(self.a)
        self._cache: dict[int, np.ndarray] = {}

    def log_deriv(self, k: int) -> np.ndarray:
        if self.pure is not None:
            C, alpha = self.pure
            with mpmath.workdps(40):
                ff = C * mpmath.fprod(alpha - j for j in range(k))
                if ff == 0:
                    return np.full(len(self.u), -math.inf)
                return float(mpmath.log(abs(ff))) + float(alpha - k) * self.u
        return log_profile(self.a.derivative(k), self.schedule)

    def scale(self, k: int) -> np.ndarray:
        """``log |a^{(k)}(t)|^{-1/k}``."""
        if k not in self._cache:
            self._cache[k] = -self.log_deriv(k) / k
        return self._cache[k]

    def exponent(self, k: int) -> float:
        """Asymptotic exponent of ``|a^{(k)}|^{-1/k}`` (last schedule slope)."""
        if self.pure is not None:
            return 1.0 - float(self.pure[1]) / k
        s = self.scale(k)
        return float((s[-1] - s[-2]) / (self.u[-1] - self.u[-2]))


@dataclass(frozen=True)
class Certificate:
    """Numerical certificate for ``lo ⋘ hi`` on the schedule.

    ``delta_trend`` is the least slope of ``log(hi/lo)`` against ``log t``
    between consecutive schedule points (the asymptotic ``δ``, insensitive
    to constant factors); ``delta_point`` is the least value of
    ``log(hi/lo)/log t`` at the points themselves.  The certificate holds
    when ``delta_trend >= DELTA_MIN`` and ``delta_point > 0``.
    """

    relation: str
    delta_trend: float
    delta_point: float
    ok: bool


def certify(
    lo: np.ndarray, hi: np.ndarray, u: np.ndarray, relation: str, delta_min: float = DELTA_MIN, strong: bool = True
) -> Certificate:
    """Certify ``lo ⋘ hi`` (``strong``) or merely ``lo ≺ hi`` from log profiles.

    The weak relation only needs the ratio to keep growing along the
    schedule (slope above the comparison tolerance).
    """
    diff = np.asarray(hi, dtype=float) - np.asarray(lo, dtype=float)
    if not np.all(np.isfinite(diff)):
        ok = bool(np.all(diff == math.inf))
        return Certificate(relation, math.inf if ok else -math.inf, math.inf if ok else -math.inf, ok)
    trend = float(np.min(np.diff(diff) / np.diff(u)))
    point = float(np.min(diff / u))
    ok = trend >= delta_min and point > 0 if strong else trend > SLOPE_TOL
    return Certificate(relation, trend, point, ok)


@dataclass(frozen=True)
class LSpec:
    """The short-interval length ``L(t)``.

    ``kind`` is ``"power"`` (``L = t^exponent``) or ``"explicit"`` (a geometric
    mean of derivative scales, given by ``expr``; ``exponent`` is then its
    asymptotic exponent).
    """

    kind: str
    exponent: float
    expr: HardyExpr

    def __call__(self, x):
        return self.expr(x)

    def log_profile(self, schedule=SCHEDULE) -> np.ndarray:
        if self.kind == "power":
            return self.exponent * _u(schedule)
        return log_profile(self.expr, schedule)


@dataclass(frozen=True)
class Selection:
    L: LSpec
    ks: tuple
    certificates: tuple
    delta_min: float = DELTA_MIN


def power_L(exponent: float) -> LSpec:
    return LSpec("power", float(exponent), HardyExpr(power(T, exponent)))


def _chain(ds: DerivativeScale, k: int, logL: np.ndarray, delta_min: float):
    u = ds.u
    zero = np.zeros_like(u)
    a_k, a_k1 = ds.scale(k), ds.scale(k + 1)
    certs = (
        certify(zero, a_k, u, f"1 <<< |a^({k})|^(-1/{k})", delta_min),
        certify(a_k, logL, u, f"|a^({k})|^(-1/{k}) <<< L", delta_min),
        certify(logL, a_k1, u, f"L <<< |a^({k + 1})|^(-1/{k + 1})", delta_min),
    )
    return certs


def _require_nonpolynomial(a: HardyExpr) -> None:
    g_terms = [term for term in terms_of(a.node) if monomial(term) is None]
    g = HardyExpr(add(*g_terms)) if g_terms else HardyExpr(ZERO)
    if g.is_constant() or compare(g, 1) != SUCC:
        raise PreconditionViolation(f"{a.text} stays within bounded distance of a polynomial")


def _k_for_L(ds: DerivativeScale, logL: np.ndarray, delta_min: float, k_cap: int):
    for k in range(1, k_cap + 1):
        certs = _chain(ds, k, logL, delta_min)
        if all(c.ok for c in certs):
            return k, certs
    return None, None


def select_k_and_L(
    functions: Sequence,
    c: Optional[float] = None,
    L: Optional[float] = None,
    delta_min: float = DELTA_MIN,
    k_cap: int = K_CAP,
    schedule=SCHEDULE,
) -> Selection:
    """Choose ``L(t)`` and the Taylor degrees ``k_i``.

    For each function the chain ``1 ⋘ |a^{(k)}|^{-1/k} ⋘ L ⋘ |a^{(k+1)}|^{-1/(k+1)}``
    is certified on the schedule with ``δ >= delta_min``.

    Args:
        functions: the functions ``a_i``.
        c: lower growth exponent, ``t^c ≺ L`` is required (free ``L`` only).
        L: a fixed exponent ``λ`` for ``L = t^λ``; when given, only ``k_i`` is chosen.
        delta_min: certification threshold.
        k_cap: largest ``k`` tried.

    With a single function and free ``L``, ``k`` is the least integer whose
    geometric mean ``G = (|a^{(k)}|^{-1/k}·|a^{(k+1)}|^{-1/(k+1)})^{1/2}`` satisfies
    ``t^c ⋘ G``, and ``L = G``.  With several functions and free ``L`` a common
    power ``L = t^λ`` is searched on a grid of ``λ`` maximizing the weakest
    certificate.

    Raises:
        SelectionFailure: when no ``k <= k_cap`` works.
        PreconditionViolation: when a function is within bounded distance of a polynomial.
    """
    fs = [as_expr(f) for f in functions]
    if not fs:
        raise SelectionFailure("no functions given")
    for f in fs:
        _require_nonpolynomial(f)
    scales = [DerivativeScale(f, schedule) for f in fs]
    u = _u(schedule)

    if L is not None:
        spec = power_L(L)
        logL = spec.log_profile(schedule)
        ks, certs = [], []
        for f, ds in zip(fs, scales):
            k, cs = _k_for_L(ds, logL, delta_min, k_cap)
            if k is None:
                exps = [round(ds.exponent(j), 4) for j in range(1, min(k_cap, 12) + 1)]
                raise SelectionFailure(f"no k <= {k_cap} for {f.text} with L = t^{L}; scale exponents {exps}")
            ks.append(k)
            certs.append(cs)
        return Selection(spec, tuple(ks), tuple(certs), delta_min)

    if c is None or not 0 < c < 1:
        raise SelectionFailure("free L needs c in (0, 1)")
    floor_c = c * u

    if len(fs) == 1:
        ds = scales[0]
        f = fs[0]
        for k in range(1, k_cap + 1):
            a_k, a_k1 = ds.scale(k), ds.scale(k + 1)
            gm = 0.5 * (a_k + a_k1)
            pre = (
                certify(np.zeros_like(u), a_k, u, "", delta_min).ok
                and certify(a_k, a_k1, u, "", 2 * delta_min).ok
                and certify(floor_c, gm, u, "", strong=False).ok
            )
            if not pre:
                continue
            if ds.pure is not None:
                spec = _pure_geometric_mean(ds, k)
            else:
                spec = LSpec("explicit", float((gm[-1] - gm[-2]) / (u[-1] - u[-2])), _geometric_mean(f, k))
            logL = spec.log_profile(schedule)
            certs = _chain(ds, k, logL, delta_min) + (certify(floor_c, logL, u, f"t^{c} < L", strong=False),)
            if all(x.ok for x in certs):
                return Selection(spec, (k,), (certs,), delta_min)
        raise SelectionFailure(f"no k <= {k_cap} for {f.text} with c = {c}")

    best = None
    for lam in np.arange(c + delta_min, 1.0 - delta_min + 1e-12, 0.0025):
        logL = lam * u
        ks, certs = [], []
        for ds in scales:
            k, cs = _k_for_L(ds, logL, delta_min, k_cap)
            if k is None:
                break
            ks.append(k)
            certs.append(cs)
        else:
            score = min(x.delta_trend for cs in certs for x in cs)
            if best is None or score > best[0] + 1e-12:
                best = (score, float(round(lam, 6)), ks, certs)
    if best is None:
        raise SelectionFailure(f"no common power L = t^λ with λ in ({c}, 1) works for all functions")
    _, lam, ks, certs = best
    return Selection(power_L(lam), tuple(ks), tuple(certs), delta_min)


def _pure_geometric_mean(ds: DerivativeScale, k: int) -> LSpec:
    """Closed form of the geometric mean for ``a = C·t^α``: a constant times ``t^λ``."""
    C, alpha = ds.pure
    exact = ds.exact_exponent
    if exact is not None:
        lam = 1 - exact * Fraction(2 * k + 1, 2 * k * (k + 1))
    else:
        lam = real_const(1 - alpha * mpmath.mpf(2 * k + 1) / (2 * k * (k + 1)))
    with mpmath.workdps(40):
        offsets = []
        for j in (k, k + 1):
            ff = C * mpmath.fprod(alpha - i for i in range(j))
            offsets.append(-mpmath.log(abs(ff)) / j)
        scale = mpmath.exp((offsets[0] + offsets[1]) / 2)
    expr = HardyExpr(mul(real_const(scale), power(T, lam)))
    return LSpec("explicit", float(lam.value) if isinstance(lam, Const) else float(lam), expr)


def _geometric_mean(a: HardyExpr, k: int) -> HardyExpr:
    """``(|a^{(k)}|^{-1/k} · |a^{(k+1)}|^{-1/(k+1)})^{1/2}`` as an expression."""
    parts = []
    for j in (k, k + 1):
        d = a.derivative(j)
        sign = 1 if d.mp(SCHEDULE[-1]) > 0 else -1
        parts.append(power(mul(rational(sign), d.node), Fraction(-1, 2 * j)))
    return HardyExpr(mul(*parts))


# --------------------------------------------------------------------------
# tempered functions


@dataclass(frozen=True)
class TemperedReport:
    """Membership of ``g`` in the tempered class ``𝒯_i``.

    ``ratios`` are the values of ``t·g'(t)/g(t)`` on the schedule.
    ``lemma_k`` is the least ``k`` with the chain
    ``t^c ≺ |g^{(k)}|^{-1/k} ⋘ |g^{(k+1)}|^{-1/(k+1)} ≺ t`` certified (when ``c``
    was supplied).
    """

    degree: Optional[int]
    in_T: bool
    fejer: bool
    limit: Optional[float]
    converged: bool
    ratios: tuple
    reason: str
    lemma_k: Optional[int] = None
    lemma_certificates: tuple = ()


def tempered_check(e, c: Optional[float] = None, schedule=SCHEDULE) -> TemperedReport:
    """Decide membership in ``𝒯`` and optionally run the growth lemma chain for ``c``."""
    g = as_expr(e)
    dg = g.derivative(1)
    ratios = []
    for x in schedule:
        with mpmath.workdps(40):
            ratios.append(float(x * dg.mp(x) / g.mp(x)))
    fit = growth_fit(g, schedule)
    diffs = np.abs(np.diff(ratios))
    if fit.residual <= 1e-6 * (1 + abs(fit.A)):
        converged, alpha = True, fit.A
    elif np.all(np.diff(diffs) < 0) and diffs[-1] < 1e-2:
        converged, alpha = True, ratios[-1]
    else:
        converged, alpha = False, None
    if not converged:
        return TemperedReport(None, False, False, None, False, tuple(ratios), "t g'/g does not converge on the schedule")
    i = math.floor(alpha)
    if abs(alpha - round(alpha)) < 1e-6:
        return TemperedReport(None, False, False, alpha, True, tuple(ratios), f"limit {alpha:.6g} is an integer")
    if alpha < 0:
        return TemperedReport(None, False, False, alpha, True, tuple(ratios), f"limit {alpha:.6g} is negative")
    if compare(g.derivative(i + 1), 1, schedule) != PREC:
        return TemperedReport(i, False, False, alpha, True, tuple(ratios), f"g^({i + 1}) does not tend to 0")
    report = TemperedReport(i, True, i == 0, alpha, True, tuple(ratios), f"in T_{i}")
    if c is None:
        return report
    ds = DerivativeScale(g, schedule)
    u = ds.u
    for k in range(1, K_CAP + 1):
        a_k, a_k1 = ds.scale(k), ds.scale(k + 1)
        certs = (
            certify(c * u, a_k, u, f"t^{c} < |g^({k})|^(-1/{k})", strong=False),
            certify(a_k, a_k1, u, f"|g^({k})|^(-1/{k}) <<< |g^({k + 1})|^(-1/{k + 1})"),
            certify(a_k1, u, u, f"|g^({k + 1})|^(-1/{k + 1}) < t", strong=False),
        )
        if all(x.ok for x in certs):
            return TemperedReport(i, True, i == 0, alpha, True, tuple(ratios), f"in T_{i}", k, certs)
    return report
