import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hplab.errors import ClassificationUnstable, InvalidArgument, ParseError
from hplab.hardy import differentiate, parse, parse_constant
from hplab.hardy.growth import (
    ESSENTIALLY_RATIONAL,
    FAR,
    classify,
    compare,
    decompose,
    select_k_and_L,
    tempered_check,
)
from hplab.hardy.taylor import taylor_model
from oracles import taylor_error_mp

EXPRS = ["t^(3/2)", "log(t)^2", "t*log(t)", "t^pi", "t^(4/3)+irr(sqrt2)*t", "sqrt(t)*log(t)", "exp(sqrt(log(t)))"]


def test_parse_and_evaluate():
    e = parse("t^(3/2) + 2*log(t)")
    assert e(100.0) == pytest.approx(1000 + 2 * math.log(100))
    assert float(e.mp(100)) == pytest.approx(1000 + 2 * math.log(100))
    assert np.allclose(e(np.array([4.0, 9.0])), [8 + 2 * math.log(4), 27 + 2 * math.log(9)])
    assert float(parse_constant("sqrt2-1").value) == pytest.approx(math.sqrt(2) - 1)
    assert parse_constant("7/3").exact is not None


@pytest.mark.parametrize("text", ["t^", "(t", "foo(t)", "t +* 2", ""])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_validity_threshold():
    assert parse("t^2").t0 <= 2
    assert parse("log(log(t))").t0 > 1
    assert math.isfinite(parse("sqrt(t-100)").t0)


def test_differentiate_examples():
    assert differentiate(parse("t^(3/2)"), 1) == parse("(3/2)*t^(1/2)")
    assert differentiate(parse("t*log(t)"), 2) == parse("1/t")


@pytest.mark.parametrize("text", EXPRS)
@pytest.mark.parametrize("x", [1e3, 1e4, 1e5])
def test_derivatives_match_finite_differences(text, x):
    e = parse(text)
    for j in range(1, 6):
        lower = e.derivative(j - 1)
        h = x * 1e-4
        with mpmath.workdps(50):
            fd = (lower.mp(mpmath.mpf(x) + h, 50) - lower.mp(mpmath.mpf(x) - h, 50)) / (2 * h)
            exact = e.derivative(j).mp(x, 50)
        assert float(abs(fd - exact)) <= 1e-4 * float(abs(exact)) + 1e-300


def test_fifth_derivative_of_three_halves():
    e = parse("t^(3/2)")
    with mpmath.workdps(50):
        oracle = mpmath.diff(lambda s: s ** mpmath.mpf(1.5), 10**4, 5)
    assert float(e.derivative(5).mp(10**4)) == pytest.approx(float(oracle), rel=1e-4)


def test_classify_examples():
    c = classify(parse("t^(3/2)"))
    assert (c.degree, c.strongly_non_polynomial, c.condition) == (2, True, FAR)
    c = classify(parse("log(t)^2"))
    assert (c.degree, c.sub_fractional, c.condition) == (1, True, FAR)
    c = classify(parse("t^2 + 7/3"))
    assert (c.degree, c.condition, c.strongly_non_polynomial) == (2, ESSENTIALLY_RATIONAL, False)
    with pytest.raises(ClassificationUnstable):
        classify(parse("exp(t)"))


@given(st.fractions(min_value="1/5", max_value=6, max_denominator=12).filter(lambda q: q.denominator > 1))
@settings(max_examples=30, deadline=None)
def test_classify_pure_powers(q):
    c = classify(parse(f"t^({q.numerator}/{q.denominator})"))
    assert c.degree == math.ceil(q)
    assert c.strongly_non_polynomial
    assert c.sub_linear == (q < 1)
    assert not c.sub_fractional


def test_classify_unstable_when_schedule_cannot_separate():
    # t^(1/20) overtakes log t near t = e^20, inside the sampling schedule.
    with pytest.raises(ClassificationUnstable):
        classify(parse("t^(1/20)"))


def test_sub_fractional_implies_sub_linear():
    for text in EXPRS + ["log(t)", "log(t)^3", "t^(1/25)"]:
        c = classify(parse(text))
        assert not c.sub_fractional or c.sub_linear


def test_decompose_examples():
    d = decompose(parse("t*irr(sqrt2) + t^2 + log(t)^2"))
    assert (d.g, d.p, d.q) == (parse("log(t)^2"), parse("irr(sqrt2)*t"), parse("t^2"))
    d = decompose(parse("t^(3/2)"))
    assert d.g == parse("t^(3/2)") and d.p.is_constant() and d.q.is_constant()
    d = decompose(parse("(5/2)*t^3 + t^(1/2)"))
    assert (d.g, d.q) == (parse("t^(1/2)"), parse("(5/2)*t^3"))


def _k_by_exponent_rule(alpha: float, lam: float) -> int:
    """Least ``k`` with ``1 − α/k < λ < 1 − α/(k+1)`` for ``a = t^α``."""
    for k in range(1, 1000):
        if 1 - alpha / k < lam < 1 - alpha / (k + 1):
            return k
    raise AssertionError("no k")


def test_select_examples():
    sel = select_k_and_L([parse("t^(3/2)")], L=0.65)
    assert sel.ks == (4,) == (_k_by_exponent_rule(1.5, 0.65),)
    sel = select_k_and_L([parse("t^(3/2)")], c=0.3)
    assert sel.ks == (2,)
    assert sel.L.exponent == pytest.approx(3 / 8, abs=1e-9)
    sel = select_k_and_L([parse("t^pi")], c=0.65)
    k = sel.ks[0]
    assert 1 - math.pi / k > 0.65 and not 1 - math.pi / (k - 1) > 0.65
    assert sel.L.exponent == pytest.approx(1 - math.pi / (2 * k) - math.pi / (2 * (k + 1)), abs=1e-6)


@given(st.sampled_from([1.25, 1.5, 2.5, 3.5, 4 / 3]), st.sampled_from([0.55, 0.65, 0.8]))
@settings(max_examples=15, deadline=None)
def test_select_matches_exponent_rule(alpha, lam):
    if min(abs(lam - (1 - alpha / j)) for j in range(1, 60)) < 0.02:
        return  # on or too close to a boundary for a δ = 0.01 certificate
    expected = _k_by_exponent_rule(alpha, lam)
    assert select_k_and_L([parse(f"t^{alpha!r}")], L=lam).ks == (expected,)


def test_taylor_examples():
    N = 10**6
    L = int(N**0.65)
    m = taylor_model(parse("t^(3/2)"), N, L, 4)
    with mpmath.workdps(40):
        theta = abs(mpmath.diff(lambda s: s ** mpmath.mpf(1.5), N, 5)) / 120 * mpmath.mpf(L) ** 5
    assert m.theta_float == pytest.approx(float(theta), rel=1e-8)
    for h in np.linspace(0, L, 100).astype(int):
        assert m.error(int(h)) <= m.theta_float
    m = taylor_model(parse("29/4"), 10**5, 100, 0)
    assert m.coefficients_float == (7.25,) and m.theta_float == 0.0
    N = 10**6
    L = int(N**0.6)
    m = taylor_model(parse("log(t)^2"), N, L, 0)
    assert m.theta_float == pytest.approx(2 * math.log(N) / N * L, rel=1e-12)
    with pytest.raises(InvalidArgument):
        taylor_model(parse("t"), 10, 5, -1)


MP_FUNCS = {
    "t^(3/2)": lambda s: s ** mpmath.mpf(1.5),
    "log(t)^2": lambda s: mpmath.log(s) ** 2,
    "t*log(t)": lambda s: s * mpmath.log(s),
    "t^pi": lambda s: s**mpmath.pi,
}


@given(st.integers(min_value=10**3, max_value=10**7), st.integers(min_value=0, max_value=5), st.sampled_from(sorted(MP_FUNCS)))
@settings(max_examples=30, deadline=None)
def test_taylor_error_oracle(N, k, text):
    e = parse(text)
    L = int(N**0.5)
    m = taylor_model(e, N, L, k)
    f = MP_FUNCS[text]
    nxt = e.derivative(k + 1)
    decreasing = abs(nxt.mp(N + L)) <= abs(nxt.mp(N))
    for h in (0, L // 3, L):
        assert m.error(h) == pytest.approx(taylor_error_mp(f, N, h, k), rel=1e-6, abs=1e-20)
        if decreasing:
            assert m.error(h) <= m.theta_float * (1 + 1e-9) + 1e-25


def test_tempered_examples():
    r = tempered_check(parse("t^(1/25)"))
    assert r.in_T and r.fejer and r.degree == 0 and r.limit == pytest.approx(1 / 25, abs=1e-6)
    r = tempered_check(parse("t^(3/2)"))
    assert r.in_T and r.degree == 1 and r.limit == pytest.approx(1.5, abs=1e-6)
    assert not tempered_check(parse("t^2")).in_T


def test_compare_ordering():
    assert compare(parse("log(t)^2"), parse("t^(1/2)")) == "prec"
    assert compare(parse("t^(3/2)"), parse("t*log(t)")) == "succ"
    assert compare(parse("2*t"), parse("t")) == "sim"
