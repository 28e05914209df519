import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hplab.errors import HypothesisViolation, InvalidArgument, InvalidSystem, Unsupported, UnsupportedSet
from hplab.ergodic.averages import (
    comparison_gap,
    comparison_gap_max,
    l2_distance,
    multiple_average,
    nil_orbit_equidistribution,
    recurrence_experiment,
    short_interval_average,
)
from hplab.ergodic.fixedpoint import FixedReal
from hplab.ergodic.flow import FlowPoint, identity_check, lift_to_flow, non_concentration
from hplab.ergodic.observables import character, constant, coordinate_character, smoothed_arc
from hplab.ergodic.sets import ArcSet, BoxSet, intersection_measure
from hplab.ergodic.systems import ErgodicSystem, HeisenbergOrbit, TorusRotation
from hplab.experiments import parse_poly
from hplab.numtheory import primorial_trick
from oracles import geometric_mean_abs, heisenberg_orbit_mp

# First-run oracle values at N = 10^5 (see the oracle cross-checks below).
GAP_MAX = {1: 0.006516739046453785, 2: 0.005653172410865036, 3: 0.001991934888701948}
TORUS_NIL_RESIDUAL = 0.006269757915204947
HEIS_NIL_RESIDUAL_X2 = 0.009996035323655098

ROT = TorusRotation.circle("sqrt2-1")


def _circ(u, v):
    d = np.abs(np.asarray(u) - np.asarray(v)) % 1.0
    return np.minimum(d, 1.0 - d)


def _mp_floor(v):
    """Floor that treats values within 10^-30 below an integer as that integer."""
    return int(mpmath.floor(v + mpmath.mpf(10) ** -30))


# ---------------------------------------------------------------------------
# fixed point and systems


@given(st.integers(min_value=-(10**12), max_value=10**12))
@settings(max_examples=100, deadline=None)
def test_fixed_frac_matches_mpmath(m):
    x = FixedReal.of("sqrt2-1")
    with mpmath.workdps(60):
        v = m * (mpmath.sqrt(2) - 1)
        expected = float(v - mpmath.floor(v))
    assert _circ(x.frac_mul(np.array([m]))[0], expected) < 1e-15
    assert x.floor_mul(m) == int(mpmath.floor(v))


def test_fixed_rational_is_exact():
    x = FixedReal.of("1/3")
    assert x.exact == Fraction(1, 3)
    assert x.floor_mul(3 * 10**15) == 10**15
    assert x.floor_mul(-1) == -1


def test_torus_rotation_apply_and_pushforward():
    rot = TorusRotation.of([["sqrt2-1", "sqrt3-1"], ["1/7", "sqrt5"]])
    x = np.array([[0.1, 0.2]])
    y = rot.apply([3, -2], x)[0]
    with mpmath.workdps(40):
        e0 = 0.1 + 3 * (mpmath.sqrt(2) - 1) - 2 * mpmath.mpf(1) / 7
        e1 = 0.2 + 3 * (mpmath.sqrt(3) - 1) - 2 * mpmath.sqrt(5)
    assert _circ(y, [float(e0 % 1), float(e1 % 1)]).max() < 1e-12
    assert rot.check_commutation() <= 1e-12
    assert rot.pushforward_defect() < 0.02


class _Dihedral(ErgodicSystem):
    """``x ↦ x + 0.1`` and ``x ↦ −x``: measure preserving but not commuting."""

    dim = 1
    n_maps = 2

    def points(self, counts, grid):
        c1, c2 = (np.asarray(c)[:, None] for c in counts)
        x = grid[None, :, 0] + 0.1 * c1
        x = np.where(c2 % 2 == 1, -x, x)
        return np.mod(x, 1.0)[:, :, None]


def test_non_commuting_maps_rejected():
    with pytest.raises(InvalidSystem):
        multiple_average(_Dihedral(), [character(1)], [["t", None]], checkpoints=(10,))


@given(st.integers(min_value=0, max_value=10**7), st.lists(st.floats(0, 0.999), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_heisenberg_points_match_oracle(m, x):
    h = HeisenbergOrbit.of("sqrt3-1", "irr(sqrt2)", "1/5")
    got = h.apply([m], np.array([x]))[0]
    with mpmath.workdps(60):
        expected = heisenberg_orbit_mp(mpmath.sqrt(3) - 1, mpmath.sqrt(2), mpmath.mpf(1) / 5, x, m)
    # x is read at 32-bit resolution; compare against the same snapped point
    assert _circ(got, expected).max() < 1e-6


def test_heisenberg_points_exact_at_origin():
    h = HeisenbergOrbit.of("sqrt3-1", "irr(sqrt2)", 0)
    for m in (1, 17, 10**6, 10**9):
        got = h.apply([m], np.zeros((1, 3)))[0]
        with mpmath.workdps(80):
            expected = heisenberg_orbit_mp(mpmath.sqrt(3) - 1, mpmath.sqrt(2), 0, (0, 0, 0), m, 80)
        assert _circ(got, expected).max() < 1e-9


def test_heisenberg_closure():
    assert HeisenbergOrbit.of("sqrt3-1", "irr(sqrt2)", 0).closure() == ("full", None)
    assert HeisenbergOrbit.of("2/3", "irr(sqrt2)", 0).closure() == ("fibers", 3)
    with pytest.raises(Unsupported):
        HeisenbergOrbit.of("irr(sqrt2)", "1/2", 0).closure()
    assert HeisenbergOrbit.of("sqrt3-1", "irr(sqrt2)", 0).pushforward_defect() < 0.02


# ---------------------------------------------------------------------------
# observables and sets


def test_smoothed_arc():
    f = smoothed_arc(0.2, 0.5)
    x = np.linspace(0, 1, 2001)[:, None]
    v = f(x)
    assert np.abs(v.imag).max() < 1e-12
    assert v.real.min() >= -1e-12 and v.real.max() <= 1 + 1e-12
    assert f.mean == pytest.approx(0.3)
    with pytest.raises(InvalidArgument):
        smoothed_arc(0.5, 1.7)


def test_arc_sets():
    A = ArcSet.of([(0.9, 1.2), (0.0, 0.1)])
    assert A.measure == pytest.approx(0.3)
    assert A.contains([0.95, 0.15, 0.05]).tolist() == [True, True, True]
    assert intersection_measure(ArcSet.of((0, 0.3)), np.array([[0.1], [0.2]])) == pytest.approx(0.1)
    assert BoxSet.of([(0, 0.5), (0, 0.2)]).measure == pytest.approx(0.1)
    with pytest.raises(UnsupportedSet):
        ArcSet.of(lambda x: x)
    with pytest.raises(UnsupportedSet):
        recurrence_experiment(HeisenbergOrbit.of("sqrt3-1", "irr(sqrt2)", 0), (0, 0.3), ["t"], "cesaro", N=10)


@given(
    st.floats(0, 1), st.floats(0, 0.5), st.lists(st.floats(-3, 3), min_size=1, max_size=3)
)
@settings(max_examples=60, deadline=None)
def test_intersection_measure_matches_sampling(a, length, shifts):
    A = ArcSet.of((a, a + length))
    exact = intersection_measure(A, np.array(shifts)[:, None])
    x = (np.arange(200_000) + 0.5) / 200_000
    inside = A.contains(x)
    for s in shifts:
        inside &= A.contains(x + s)
    assert exact == pytest.approx(inside.mean(), abs=2e-5 * (len(shifts) + 1))


# ---------------------------------------------------------------------------
# multiple averages


def test_cesaro_character_is_geometric_sum():
    s = multiple_average(ROT, [character(1)], ["t"], "cesaro", checkpoints=(10**3, 10**4))
    alpha = math.sqrt(2) - 1
    for N in (10**3, 10**4):
        assert abs(s.at(N).value) == pytest.approx(geometric_mean_abs(alpha, N), abs=1e-12)
    assert abs(s.at(10**4).value) < 1e-3


def test_constant_observable(table):
    for scheme in ("cesaro", "prime"):
        s = multiple_average(ROT, [constant(1.0)], ["t^(3/2)"], scheme, table, checkpoints=(100, 10**4))
        for c in s.checkpoints:
            assert c.value == pytest.approx(1.0, abs=1e-12)
    # the Λ-weighted average of 1 is ψ(N)/N
    s = multiple_average(ROT, [constant(1.0)], ["t^(3/2)"], "lambda", table, checkpoints=(100, 10**4))
    for c in s.checkpoints:
        assert c.value == pytest.approx(table.psi(c.N) / c.N, abs=1e-12)


def test_average_equals_explicit_exponential_sum():
    N = 2000
    s = multiple_average(ROT, [character(1), character(2)], ["t^(3/2)", "t*log(t)"], "cesaro", checkpoints=(N,))
    with mpmath.workdps(50):
        alpha = mpmath.sqrt(2) - 1
        total = mpmath.mpc(0)
        for n in range(1, N + 1):
            m1 = _mp_floor(mpmath.mpf(n) ** mpmath.mpf(1.5))
            m2 = _mp_floor(n * mpmath.log(n))
            total += mpmath.expjpi(2 * (m1 * alpha + 2 * m2 * alpha))
        expected = complex(total / N)
    assert abs(s.last.value - expected) < 1e-9
    assert s.last.norm == pytest.approx(abs(expected), abs=1e-9)


def test_fourier_and_grid_paths_agree(table):
    obs = [smoothed_arc(0.0, 0.3, K=4)] * 2
    its = [("t^(3/2)", 1), ("t^(3/2)", 2)]
    four = multiple_average(ROT, obs, its, "prime", table, checkpoints=(10**4,), method="fourier")
    grid = multiple_average(ROT, obs, its, "prime", table, checkpoints=(10**4,), method="grid")
    assert (four.method, grid.method) == ("fourier", "grid")
    assert grid.last.value == pytest.approx(four.last.value, abs=1e-9)
    assert grid.last.norm == pytest.approx(four.last.norm, abs=0.01)
    with pytest.raises(Unsupported):
        multiple_average(HeisenbergOrbit.of(1, "irr(sqrt2)", 0), [coordinate_character(1, 0, 0)], ["t"], method="fourier")


def test_progression_limit_prime_vs_cesaro(table):
    f = smoothed_arc(0.0, 0.3)
    its = [("t^(3/2)", 1), ("t^(3/2)", 2)]
    prime = multiple_average(ROT, [f, f], its, "prime", table, checkpoints=(10**5,)).last
    ces = multiple_average(ROT, [f, f], its, "cesaro", checkpoints=(10**5,)).last
    assert abs(prime.value - ces.value) < 0.02
    assert l2_distance(prime, ces) < 0.02


def test_prime_and_lambda_schemes_agree(table):
    f = smoothed_arc(0.0, 0.3)
    its = [("t^(3/2)", 1), ("t^(3/2)", 2)]
    prime = multiple_average(ROT, [f, f], its, "prime", table, checkpoints=(10**5,)).last
    lam = multiple_average(ROT, [f, f], its, "lambda", table, checkpoints=(10**5,)).last
    assert l2_distance(prime, lam) < 0.02


def test_scheme_and_shape_errors(table):
    with pytest.raises(InvalidArgument):
        multiple_average(ROT, [character(1)], ["t"], "bogus")
    with pytest.raises(InvalidArgument):
        multiple_average(ROT, [character(1)], ["t"], "prime")
    with pytest.raises(InvalidArgument):
        multiple_average(ROT, [character(1)], ["t", "t"])


def test_polynomial_iterate_matches_expression():
    a = multiple_average(ROT, [character(1)], [parse_poly("0,0,1")], checkpoints=(500,)).last
    b = multiple_average(ROT, [character(1)], ["t^2"], checkpoints=(500,)).last
    assert a.value == pytest.approx(b.value, abs=1e-12)


# ---------------------------------------------------------------------------
# comparison with the W-tricked weights


def test_comparison_gap_regression(table):
    gaps = {w: comparison_gap_max(ROT, [character(1)], ["t^(3/2)"], w, table, 10**5).max_gap for w in (1, 2, 3)}
    for w, pinned in GAP_MAX.items():
        assert gaps[w] == pytest.approx(pinned, abs=1e-9)
    assert gaps[3] < gaps[1]


def test_comparison_gap_matches_direct_sum(table):
    N = 10**4
    trick = primorial_trick(2, 1)
    gap = comparison_gap(ROT, [character(1)], ["t^(3/2)"], trick, table, N)
    with mpmath.workdps(40):
        alpha = mpmath.sqrt(2) - 1
        total = mpmath.mpc(0)
        for n in range(1, N + 1):
            c = trick.weight * table.values[trick.W * n + trick.b] - 1
            m = _mp_floor(mpmath.mpf(trick.argument(n)) ** mpmath.mpf(1.5))  # iterates run along W n + b
            total += c * mpmath.expjpi(2 * m * alpha)
    assert gap == pytest.approx(abs(complex(total / N)), abs=1e-9)


def test_comparison_gap_constant_and_zero(table):
    N = 10**5
    for b in (1, 5):
        trick = primorial_trick(3, b)
        gap = comparison_gap(ROT, [constant(1.0)], ["t^(3/2)"], trick, table, N)
        direct = abs(sum(trick.weight * table.values[6 * n + b] - 1 for n in range(1, N + 1)) / N)
        assert gap == pytest.approx(direct, abs=1e-9)
        assert gap < 0.05
    assert comparison_gap(ROT, [constant(0.0)], ["t^(3/2)"], primorial_trick(3, 1), table, N) == 0.0


def test_comparison_rejects_neither_condition(table):
    # log t is neither far from nor close to a rational polynomial
    with pytest.raises(HypothesisViolation):
        comparison_gap(ROT, [character(1)], ["t^2 + log(t)"], primorial_trick(1, 1), table, 100)
    comparison_gap(ROT, [character(1)], ["t^2 + log(t)"], primorial_trick(1, 1), table, 100, check=False)


# ---------------------------------------------------------------------------
# recurrence


def test_recurrence_progression(table):
    rep = recurrence_experiment(TorusRotation.circle("sqrt3-1"), (0, 0.3), ["t^(3/2)", ("t^(3/2)", 2)], "prime", table, 10**5)
    assert rep.lower_bound == pytest.approx(0.027)
    assert rep.average >= 0.3**3 - 0.02


def test_recurrence_joint_pair(table):
    rep = recurrence_experiment(TorusRotation.circle("sqrt3-1"), (0, 0.3), ["t^(3/2)", "t^(5/4)"], "prime", table, 10**5)
    assert rep.average >= 0.3**3 - 0.02
    assert abs(rep.average - 0.3**3) < 0.02


def test_recurrence_full_circle_and_oracle(table):
    rot = TorusRotation.circle("sqrt3-1")
    assert recurrence_experiment(rot, (0, 1), ["t^(3/2)", "t^(5/4)"], "prime", table, 10**4).average == pytest.approx(1.0)
    N = 3000
    rep = recurrence_experiment(rot, (0, 0.3), ["t^(3/2)"], "cesaro", None, N)
    with mpmath.workdps(40):
        alpha = mpmath.sqrt(3) - 1
        total = 0.0
        for n in range(1, N + 1):
            s = float((_mp_floor(mpmath.mpf(n) ** mpmath.mpf(1.5)) * alpha) % 1)
            total += max(0.0, 0.3 - min(s, 1 - s))  # |[0,0.3) ∩ [0,0.3) − s|
    assert rep.average == pytest.approx(total / N, abs=1e-9)


# ---------------------------------------------------------------------------
# nil orbits


def test_nil_torus_residual(table):
    rep = nil_orbit_equidistribution(TorusRotation.circle("sqrt2-1"), "t^(3/2)*irr(sqrt2)", [character(1), constant(1.0)], 10**5, table)
    primes = table.primes(10**5)
    with mpmath.workdps(40):
        s2, alpha = mpmath.sqrt(2), mpmath.sqrt(2) - 1
        total = mpmath.mpc(0)
        for p in primes.tolist():
            total += mpmath.expjpi(2 * ((_mp_floor(mpmath.mpf(p) ** mpmath.mpf(1.5) * s2) * alpha) % 1))
    assert rep.residuals[0] == pytest.approx(abs(complex(total / primes.size)), abs=1e-9)
    assert rep.residuals[0] == pytest.approx(TORUS_NIL_RESIDUAL, abs=1e-12)
    assert rep.residuals[0] < 0.02
    assert rep.residuals[1] == pytest.approx(0.0, abs=1e-12)


def test_nil_heisenberg_residual(table):
    h = HeisenbergOrbit.of(1, "irr(sqrt2)", 0)
    obs = [coordinate_character(1, 0, 0), coordinate_character(0, 1, 0), constant(1.0, 3)]
    rep = nil_orbit_equidistribution(h, "t^(4/3)", obs, 10**5, table)
    assert rep.residuals[1] == pytest.approx(HEIS_NIL_RESIDUAL_X2, abs=1e-12)
    assert rep.max_residual < 0.05
    assert rep.residuals[2] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InvalidArgument):
        nil_orbit_equidistribution(h, "t", obs, 100, table, scheme="lambda")


# ---------------------------------------------------------------------------
# short intervals


def _rotation_sequence(alpha):
    def A(n):
        return np.exp(2j * np.pi * np.mod(n * alpha, 1.0))

    return A


def test_short_interval_zero(table):
    rep = short_interval_average(lambda n: np.zeros(n.shape), table, primorial_trick(2, 1), 0.7, 10**4)
    assert (rep.left, rep.right) == (0.0, 0.0)


def test_short_interval_rotation(table):
    rep = short_interval_average(_rotation_sequence(math.sqrt(2)), table, primorial_trick(2, 1), 0.7, 10**4)
    assert rep.holds and rep.slack > 0


def test_short_interval_one(table):
    trick = primorial_trick(2, 1)
    R = 10**4
    rep = short_interval_average(lambda n: np.ones(n.shape), table, trick, 0.7, R)
    direct = abs(sum(trick.weight * table.values[trick.W * r + trick.b] - 1 for r in range(1, R + 1)) / R)
    assert rep.left == pytest.approx(direct, abs=1e-12)
    assert rep.right >= rep.left
    assert rep.holds


# ---------------------------------------------------------------------------
# flow lift


def test_flow_examples():
    ext = lift_to_flow(ROT, 1, 1)
    p = ext.act(0, 0, Fraction(3, 2), FlowPoint((0,), ((Fraction(7, 10),),)))
    assert p == FlowPoint((2,), ((Fraction(1, 5),),))
    p = ext.act(0, 0, Fraction(-3, 10), FlowPoint((0,), ((Fraction(1, 10),),)))
    assert p == FlowPoint((-1,), ((Fraction(4, 5),),))
    x = ext.realize(FlowPoint((2,), ((Fraction(0),),)))
    assert _circ(x, ROT.apply([2], np.zeros((1, 1)))[0]).max() == 0


def test_flow_identity_check():
    rot2 = TorusRotation.of(["sqrt2-1", "sqrt3-1"])
    ext = lift_to_flow(rot2, 2, 3)
    rep = identity_check(ext, 1000)
    assert rep.trials == 1000 and rep.failures == 0 and rep.ok


def test_flow_reproduces_floor_iterates():
    polys = [[parse_poly("0,irr(sqrt2)"), parse_poly("1/3,0,1/7")]]
    ext = lift_to_flow(ROT, 1, 2, polys)
    for n in range(1, 200):
        times = ext.times_at(n)
        pt = ext.act_all(times, ext.origin())
        expected = math.floor(times[0][0]) + math.floor(Fraction(1, 3) + Fraction(n * n, 7))
        assert pt.exponents == (expected,)


def test_flow_errors():
    with pytest.raises(InvalidSystem):
        lift_to_flow(HeisenbergOrbit.of(1, "irr(sqrt2)", 0), 1, 1)
    with pytest.raises(InvalidSystem):
        lift_to_flow(ROT, 2, 1)
    with pytest.raises(InvalidArgument):
        lift_to_flow(ROT, 1, 2, [[parse_poly("0,1")]])


@pytest.mark.parametrize("delta", [0.05, 0.1, 0.2])
def test_non_concentration(delta):
    p = parse_poly("0,irr(sqrt2)")
    N, L = 10**5, int(10**5**0.7)
    frac = non_concentration(p, N, L, delta)
    n = np.arange(N, N + L + 1)
    with mpmath.workdps(40):
        s2 = mpmath.sqrt(2)
        count = sum(1 for k in n.tolist() if (k * s2) % 1 >= 1 - delta)
    assert frac == pytest.approx(count / n.size, abs=1e-12)
    assert abs(frac - delta) <= 0.02


def test_shifted_prime_nearest_integer_recurrence(table):
    # [[c q(p−1)]] = ⌊c q(p−1) + 1/2⌋ with c = 1/3, q(t) = t^2: the rational branch
    rot = TorusRotation.circle("sqrt2-1")
    a = "(1/3)*(t-1)^2+1/2"
    rep = recurrence_experiment(rot, (0, 0.3), [a, (a, 2)], "prime", table, 10**5)
    assert rep.average > 0
    N = 2000
    small = recurrence_experiment(rot, (0, 0.3), [a], "prime", table, N)
    primes = table.primes(N).tolist()
    with mpmath.workdps(40):
        alpha = mpmath.sqrt(2) - 1
        total = 0.0
        for p in primes:
            m = math.floor(Fraction((p - 1) ** 2, 3) + Fraction(1, 2))
            s = float((m * alpha) % 1)
            total += max(0.0, 0.3 - min(s, 1 - s))
    assert small.average == pytest.approx(total / len(primes), abs=1e-9)
