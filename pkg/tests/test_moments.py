from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qlommel.errors import DomainError
from qlommel.moments import (ROUTES, MomentContext, bounds_check, g_coefficients, gfun_G,
                             moments, moments_explicitF, moments_jacobi, moments_linear,
                             moments_quadratic, omega, omega_bounds, omega_table, qdiff_residual,
                             ratio_taylor, route_deltas, van_assche_error)
from qlommel.qcore import QContext

EX = QContext(q="1/2", a="3/4")
C07 = QContext(q="0.5", a="0.7")
MP = C07.mp


def test_moment_context():
    assert MomentContext("1/2", "3/4").exact
    assert MomentContext(2, "0.7").scalars()[1] == 2
    with pytest.raises(DomainError):
        MomentContext(1, 1)
    with pytest.raises(DomainError):
        MomentContext("0.5", 0)
    with pytest.raises(TypeError):
        MomentContext.of(0.5)


def test_omega_small():
    a, p = Fraction(7, 10), Fraction(2)
    mc = MomentContext(p, a)
    assert omega(mc, 0) == 1
    assert omega(mc, 1) == 1 + a
    assert omega(mc, 2) == 1 + (1 + p) / p * a + a * a


@given(num=st.integers(1, 30), den=st.integers(1, 30),
       p=st.sampled_from([Fraction(1, 3), Fraction(1, 2), Fraction(2), Fraction(5, 2)]))
def test_omega_routes_exact(num, den, p):
    mc = MomentContext(p, Fraction(num, den))
    assert omega_table(mc, 30).values == omega_table(mc, 30, "hermite").values


def test_omega_bounds():
    # the estimate is in the q < 1 variable; p = 2 corresponds to q = 1/2
    for lo, hi in omega_bounds(MomentContext("0.5", "0.7"), 30):
        assert lo >= -MP.mpf(2) ** -240 and hi >= -MP.mpf(2) ** -240
    with pytest.raises(DomainError):
        omega_table(EX, 3, "nope")


def test_low_moments():
    a, q = Fraction(3, 4), Fraction(1, 2)
    for r in ROUTES:
        m = moments(EX, 2, r).values
        assert m[0] == 1
        assert m[1] == a + 1
        assert m[2] == (a + 1) ** 2 + a / q
    assert moments_explicitF(EX, 1).values[1] == a + 1


def test_four_routes_exact_rational():
    ref = moments_jacobi(EX, 30)
    tables = [moments_linear(EX, 30), moments_quadratic(EX, 30), moments_explicitF(EX, 30)]
    for route, d in route_deltas(tables, ref).items():
        assert all(v == 0 for v in d), route
    assert all(isinstance(v, Fraction) for v in ref.values)


@pytest.mark.parametrize("a", ["0.7", "1", "1.4"])
def test_four_routes_real(a):
    ctx = QContext(q="0.5", a=a)
    ref = moments_jacobi(ctx, 30)
    for r in ROUTES[1:]:
        for u, v in zip(moments(ctx, 30, r).values, ref.values):
            assert abs(u - v) <= MP.mpf(10) ** -35 * v


def test_unknown_route():
    with pytest.raises(DomainError):
        moments(EX, 3, "bogus")


@settings(max_examples=10)
@given(num=st.integers(1, 12), den=st.integers(1, 12), qd=st.integers(2, 6))
def test_routes_agree_random_rationals(num, den, qd):
    c = QContext(q=Fraction(1, qd), a=Fraction(num, den))
    ref = moments_jacobi(c, 12).values
    for r in ROUTES[1:]:
        assert moments(c, 12, r).values == ref


def test_moments_polynomial_with_nonnegative_integer_coefficients():
    # integer coefficients give integer values at integer a and 1/q
    for n in range(11):
        for inv_q in (2, 3):
            vals = [moments_quadratic(QContext(q=Fraction(1, inv_q), a=Fraction(k)), n).values[n]
                    for k in range(1, n + 2)]
            assert all(v.denominator == 1 and v > 0 for v in vals)
    c = QContext(q="1/2", a="1/3")
    v = moments_quadratic(c, 10).values
    assert all(x > 0 for x in v)


@pytest.mark.parametrize("a", ["0.7", "1.4", "1"])
def test_bounds_hold(a):
    rows = bounds_check(QContext(q="0.5", a=a), 50)
    assert all(r.upper_margin >= 0 and r.lower_margin >= 0 for r in rows)
    assert rows[0].moment == 1
    assert abs(rows[1].lower_margin) <= MP.mpf(2) ** -240


def test_bounds_require_q_below_one():
    with pytest.raises(DomainError):
        bounds_check(MomentContext(2, "0.7"), 5)


def test_G_basic():
    assert gfun_G(2, "0.7", 0) == 1
    with pytest.raises(DomainError):
        gfun_G("0.5", "0.7", 1)
    for z in ("0.1", "-0.6", "1.3"):
        s, p = gfun_G(2, "0.7", z), gfun_G(2, "0.7", z, route="product")
        assert abs(s - p) <= MP.mpf(2) ** -230 * max(1, abs(s))


def test_G_coefficients_rational():
    g = g_coefficients(2, Fraction(7, 10), 5)
    assert g[0] == 1 and all(isinstance(v, Fraction) for v in g)


def test_qdiff_equation():
    assert qdiff_residual(2, "0.7", "0.1") <= MP.mpf(10) ** -30
    for z in ("-2", "0.9", "3"):
        assert qdiff_residual(3, "1.2", z) <= MP.mpf(2) ** -220


def test_ratio_taylor_matches_moments():
    c = ratio_taylor(2, "0.7", 20)
    m = moments_quadratic(MomentContext(2, "0.7"), 20).values
    for u, v in zip(c, m):
        assert abs(u - v) <= MP.mpf(10) ** -25 * abs(v)
    exact = ratio_taylor(2, Fraction(7, 10), 12)
    assert tuple(exact) == moments_quadratic(MomentContext(2, Fraction(7, 10)), 12).values


def test_van_assche_error_decreases():
    errs = [van_assche_error(2, "0.7", "1.3", n) for n in (20, 40, 60)]
    assert errs[0] > errs[1] > errs[2]
    with pytest.raises(DomainError):
        van_assche_error(2, "0.7", 0, 10)
