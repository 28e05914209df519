import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hplab import equidist as eq
from hplab.errors import CounterexampleCandidate, DegenerateMeasure, InvalidArgument, WindowTooEarly
from hplab.experiments import parse_poly
from hplab.floors import GUARD, floor_expr, resolve_floors
from hplab.hardy import parse
from hplab.hardy.growth import select_k_and_L
from hplab.numtheory import primorial_trick, w_tricked_lambda
from oracles import frac_exact

GOLDEN = (math.sqrt(5) - 1) / 2

# First-run oracle values (fast regime, t^(4/3), N = 10^5, L = ⌊N^0.66⌋, k = 3).
T43_MISMATCHES = 9
T43_FRACTION = 0.0045090180360721445


# ---------------------------------------------------------------------------
# floors


def test_floors_of_three_halves_match_isqrt():
    n = np.concatenate([np.arange(1, 5000), np.arange(10**6 - 2000, 10**6 + 2000), np.array([4, 9, 10**6, 4 * 10**8])])
    fv = floor_expr(parse("t^(3/2)"), n)
    assert fv.floor.tolist() == [math.isqrt(int(m) ** 3) for m in n]
    assert fv.ambiguous_count == 0


def test_floors_of_square_root_at_perfect_squares():
    n = np.array([k * k for k in range(1, 3000)] + [k * k - 1 for k in range(2, 3000)])
    fv = floor_expr(parse("sqrt(t)"), n)
    assert fv.floor.tolist() == [math.isqrt(int(m)) for m in n]
    assert not fv.ambiguous.any()


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=10**6), st.integers(min_value=1, max_value=10**6))
def test_floors_of_rational_multiples(p, q):
    n = np.arange(1, 400)
    fv = floor_expr(parse(f"({p}/{q})*t"), n)
    assert fv.floor.tolist() == [(p * int(m)) // q for m in n]
    assert np.allclose(fv.frac, [float(frac_exact(Fraction(p * int(m), q))) for m in n], atol=1e-12)


def test_resolve_floors_flags_near_integers():
    with mpmath.workdps(40):
        exact = [mpmath.mpf(2) - mpmath.mpf(10) ** -20, mpmath.mpf(3), mpmath.mpf("0.5")]
    approx = np.array([2.0, 3.0, 0.5])
    fv = resolve_floors(approx, lambda i: exact[i])
    assert fv.floor.tolist() == [1, 3, 0]
    assert fv.ambiguous.tolist() == [True, False, False]
    assert GUARD == 1e-12


# ---------------------------------------------------------------------------
# discrepancy and Erdős–Turán


def test_discrepancy_examples():
    assert eq.discrepancy(np.zeros(10), 0, 0.5).discrepancy == pytest.approx(0.5)
    assert eq.discrepancy(np.arange(1, 5) / 4, 0, 0.5).discrepancy == pytest.approx(0.25)
    x = np.arange(1, 10**4 + 1) * GOLDEN
    assert eq.discrepancy(x, 0, 1 / 3).discrepancy < 0.002
    with pytest.raises(InvalidArgument):
        eq.discrepancy(x, 0.5, 0.2)
    with pytest.raises(InvalidArgument):
        eq.discrepancy([], 0, 0.5)


def _worst_bruteforce(x):
    x = sorted(v % 1.0 for v in x)
    n = len(x)
    pts = [0.0] + x + [1.0]
    best = 0.0
    for i in range(len(pts)):
        for j in range(i, len(pts)):
            a, b = pts[i], pts[j]
            best = max(best, eq.discrepancy(x, a, b).discrepancy)
            if j > i + 1 or (j == i + 1 and b > a):
                a2, b2 = a + 1e-13, b - 1e-13
                if a2 <= b2:
                    best = max(best, eq.discrepancy(x, a2, b2).discrepancy)
    return best


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=12))
def test_worst_discrepancy_matches_bruteforce(xs):
    if len(set(xs)) != len(xs):
        return
    assert eq.worst_discrepancy(xs) == pytest.approx(_worst_bruteforce(xs), abs=1e-9)


def test_majorant_examples():
    assert eq.erdos_turan_majorant(np.zeros(1), 10, 1.0) == pytest.approx(0.1 + sum(1 / m for m in range(1, 11)), abs=1e-6)
    assert eq.erdos_turan_majorant(np.zeros(1), 10, 1.0) == pytest.approx(3.0290, abs=1e-4)
    grid = np.arange(100) / 100
    assert eq.erdos_turan_majorant(grid, 50, 2.0) == pytest.approx(2.0 / 50, abs=1e-12)
    x = np.arange(1, 10**4 + 1) * GOLDEN
    major = eq.erdos_turan_majorant(x, 100, 1.0)
    rng = np.random.default_rng(1)
    for a, b in np.sort(rng.random((50, 2)), axis=1):
        assert eq.discrepancy(x, a, b).discrepancy <= major
    with pytest.raises(DegenerateMeasure):
        eq.erdos_turan_majorant(x[:5], 10, weights=np.zeros(5))
    with pytest.raises(InvalidArgument):
        eq.erdos_turan_majorant(x, 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=60), st.integers(1, 40))
def test_majorant_with_classical_constant(xs, M):
    """With ``C = 6`` the bound is a consequence of the classical inequality."""
    assert eq.worst_discrepancy(xs) <= eq.erdos_turan_majorant(xs, M, 6.0) + 1e-12


def test_weighted_coefficients(table):
    trick = primorial_trick(1, 1)
    n = np.arange(1, 2001)
    w = w_tricked_lambda(table, trick, n)
    x = n * math.sqrt(2)
    coeffs = eq.fourier_coefficients(x, 3, w)
    direct = [np.sum(w * np.exp(-2j * np.pi * m * x)) / w.sum() for m in (1, 2, 3)]
    assert np.allclose(coeffs, direct, atol=1e-12)


def test_et_pin_recomputes():
    assert eq.pin_et_constant() == eq.ET_C_PIN


# ---------------------------------------------------------------------------
# Weyl sums


def test_weyl_examples():
    v = eq.weyl_major_arc_test(parse_poly("0,1/2"), 100, 0.4)
    assert v.magnitude < 1e-12 and not v.major_arc
    # The sum vanishes, so the verdict is minor-arc; q = 2 certifies exactly.
    q, certs = eq.find_major_arc_q(parse_poly("0,1/2"), 100, 10.0)
    assert q == 2 and certs == (0.0,)
    assert eq.find_major_arc_q(parse_poly("0,1/2"), 100, 0.5) is None
    v = eq.weyl_major_arc_test(parse_poly("0,irr(sqrt2)"), 100, 0.5)
    assert not v.major_arc
    n = np.arange(1, 101)
    assert v.magnitude == pytest.approx(abs(np.exp(2j * np.pi * n * math.sqrt(2)).mean()), abs=1e-12)
    v = eq.weyl_major_arc_test(parse_poly("0,0,1/1000"), 30, 0.25)
    assert v.major_arc and v.q == 1
    with pytest.raises(InvalidArgument):
        eq.weyl_major_arc_test(parse_poly("3"), 30, 0.25)


def test_weyl_counterexample_candidate_carries_report():
    # A large sum with a certificate radius too small to contain any q.
    with pytest.raises(CounterexampleCandidate) as info:
        eq.weyl_major_arc_test(parse_poly("0,1/3"), 5, 0.1, C=0.01)
    assert info.value.report.magnitude > 0.1


def _least_q_oracle(coeffs, N, radius):
    for q in range(1, int(radius) + 1):
        worst = 0
        for k, c in enumerate(coeffs):
            if k == 0:
                continue
            f = frac_exact(q * c)
            worst = max(worst, N**k * min(f, 1 - f))
        if worst <= radius:
            return q, worst
    return None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 60), st.integers(1, 60), st.integers(0, 30), st.integers(1, 40), st.integers(2, 200), st.floats(1, 400))
def test_weyl_least_q_matches_oracle(a1, q1, a2, q2, N, radius):
    coeffs = [Fraction(0), Fraction(a1, q1), Fraction(a2, q2)]
    p = parse_poly(f"0,{a1}/{q1},{a2}/{q2}")
    found = eq.find_major_arc_q(p, N, radius)
    expected = _least_q_oracle(coeffs, N, radius)
    if expected is None:
        assert found is None
    else:
        assert found[0] == expected[0]
        assert max(found[1], default=0.0) == pytest.approx(float(expected[1]), rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------------------
# floor scans


def test_fast_example_three_halves():
    N = 10**6
    L = int(N**0.65)
    r = eq.floor_match_fast(parse("t^(3/2)"), N, L, 4)
    assert r.mismatch_fraction <= 1 / math.log(N) ** 2
    assert r.outside_band == 0


def test_fast_linear_is_exact():
    r = eq.floor_match_fast(parse("irr(sqrt2)*t + 1/3"), 12345, 500, 1)
    assert r.mismatch_count == 0


def _taylor_floor_mismatches(N, L, k):
    """Exhaustive oracle: exact floors of ``n^{4/3}`` versus mpmath Taylor floors."""
    with mpmath.workdps(60):
        f = lambda s: s ** (mpmath.mpf(4) / 3)  # noqa: E731
        coeffs = mpmath.taylor(f, N, k)
        bad = 0
        for h in range(L + 1):
            n = N + h
            lo, hi = 0, n * n
            while lo < hi:  # largest m with m^3 <= n^4
                mid = (lo + hi + 1) // 2
                if mid**3 <= n**4:
                    lo = mid
                else:
                    hi = mid - 1
            model = mpmath.polyval(coeffs[::-1], h)
            if int(mpmath.floor(model)) != lo:
                bad += 1
        return bad


def test_fast_four_thirds_regression():
    e = parse("t^(4/3)")
    N = 10**5
    L = int(N**0.66)
    k = select_k_and_L([e], L=0.66, delta_min=0.005).ks[0]
    assert k == 3
    r = eq.floor_match_fast(e, N, L, k)
    assert r.mismatch_count == _taylor_floor_mismatches(N, L, k) == T43_MISMATCHES
    assert r.mismatch_fraction == pytest.approx(T43_FRACTION, abs=1e-15)


def test_slow_constant_all_good():
    r = eq.floor_match_slow(parse("29/4"), 2000, 0.6)
    assert r.good.all() and r.bad_fraction == 0.0


def test_slow_windows_match_direct_scan():
    """A window is good exactly when ``⌊log²⌋`` does not change inside it."""
    e = parse("log(t)^2")
    R = 3000
    r = eq.floor_match_slow(e, R, 0.6)
    with mpmath.workdps(40):
        fl = [int(mpmath.floor(mpmath.log(n) ** 2)) for n in range(1, R + int(R**0.6) + 2)]
    for N, L, good, excluded in r.windows():
        assert not excluded
        assert good == (fl[N - 1] == fl[N - 1 + L])


def test_slow_log_squared_reports_fraction():
    r = eq.floor_match_slow(parse("log(t)^2"), 10**4, 0.6)
    assert r.hypothesis_met
    assert 0.55 < r.bad_fraction < 0.65
    assert [c[1] for c in r.curve] == sorted((c[1] for c in r.curve), reverse=True)


def test_poly_bad_set_precondition(table):
    with pytest.raises(WindowTooEarly):
        eq.poly_bad_set(parse_poly("0,irr(sqrt2)"), parse("log(t)^2"), table, primorial_trick(3, 1), 10**5, int(1e5**0.7), 0.05)


def test_poly_bad_set_without_precondition(table):
    p = parse_poly("0,irr(sqrt2)")
    r = 10**5
    L = int(r**0.7)
    rep = eq.poly_bad_set(p, parse("log(t)^2"), table, primorial_trick(3, 1), r, L, 0.05, check_precondition=False)
    n = np.arange(r, r + L + 1)
    with mpmath.workdps(40):
        xr = mpmath.log(r) ** 2
        s2 = mpmath.sqrt(2)
        in_B = []
        for m in n:
            y = m * s2 + xr
            y -= mpmath.floor(y)
            in_B.append(y <= 0.05 or y >= 0.95)
    assert rep.bad_set_size == sum(in_B)
    assert 0.03 <= rep.bad_fraction <= 0.15
    assert rep.mismatch_count > 0  # the frozen shift drifts by ≈ 0.73 across the window


def test_poly_bad_set_covering(table):
    r = 10**4
    rep = eq.poly_bad_set(parse_poly("0,irr(sqrt2)"), parse("log(log(t))"), table, primorial_trick(1, 1), r, 10, 0.5)
    assert rep.bad_fraction == pytest.approx(1.1, abs=0.11)
    assert rep.mismatch_count == 0
