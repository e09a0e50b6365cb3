from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qlommel.errors import DomainError
from qlommel.polyrec import (F_at_zero, PQ_at_zero, coeffs_explicit, coeffs_recurrence,
                             eval_FG, eval_G_shifted, eval_PQ, fg_sequence, genfun_check,
                             hurwitz_limit, markov_limit, pq_sequence, qlommel_h,
                             quadratic_form, scale_factor)
from qlommel.qcore import QContext, hahn_exton_J

C07 = QContext(q="0.5", a="0.7")
C14 = QContext(q="0.5", a="1.4")
C1 = QContext(q="0.5", a=1)
MP = C07.mp
TIGHT = MP.mpf(2) ** -(256 - 20)


def test_first_polynomials():
    c = QContext(q=Fraction(1, 3), a=Fraction(2, 5))
    for x in (Fraction(0), Fraction(7, 3), Fraction(-2)):
        F, G = eval_FG(c, 1, x)
        assert F == x - Fraction(7, 5)
        assert G == 1
    assert eval_FG(QContext(q="1/2", a="1/2"), 2, 1)[0] == 0


def test_F_at_zero_closed_form():
    c = QContext(q="1/2", a="3/4")
    for n in range(12):
        F, _ = eval_FG(c, n, 0)
        a, q = Fraction(3, 4), Fraction(1, 2)
        assert F == (-1) ** n * q ** (-(n * (n - 1) // 2)) * (1 - a ** (n + 1)) / (1 - a)
        assert F == F_at_zero(c, n)
    c1 = QContext(q="1/2", a=1)
    for n in range(12):
        assert eval_FG(c1, n, 0)[0] == F_at_zero(c1, n)


def test_PQ_initial_values():
    P, Q = pq_sequence(C07, 3, "0.4")
    assert P[0] == 1 and Q[0] == 0
    assert abs(Q[1] - MP.sqrt(MP.mpf("0.5") / MP.mpf("0.7"))) < TIGHT


@pytest.mark.parametrize("ctx", [C07, C14, C1], ids=["a07", "a14", "a1"])
def test_PQ_at_zero(ctx):
    for n in range(25):
        P, Q = eval_PQ(ctx, n, 0)
        Pz, Qz = PQ_at_zero(ctx, n)
        assert abs(P - Pz) <= TIGHT * max(1, abs(Pz))
        assert abs(Q - Qz) <= TIGHT * max(1, abs(Qz))
    q = ctx.qv
    if ctx.a_is_one:
        for n in range(10):
            assert abs(eval_PQ(ctx, n, 0)[0] - (-1) ** n * q ** (MP.mpf(n) / 2) * (n + 1)) < TIGHT


def test_indeterminacy_terms_decay_only_inside():
    # P_n(0)^2 + Q_n(0)^2 decays geometrically exactly when q < a < 1/q
    def ratio(a):
        c = QContext(q="0.5", a=a)
        t = [sum(v * v for v in PQ_at_zero(c, n)) for n in (100, 200)]
        return t[1] / t[0]

    for a in ("0.55", "0.7", "1", "1.4", "1.9"):
        assert ratio(a) < MP.mpf("0.01")
    for a in ("0.45", "2.1"):
        assert ratio(a) > 10


@pytest.mark.parametrize("n", [0, 3, 9, 17])
def test_PQ_equal_scaled_FG(n):
    for x in ("-3", "0.4", "11"):
        F, G = eval_FG(C07, n, x)
        P, Q = eval_PQ(C07, n, x)
        s = scale_factor(C07, n)
        assert abs(P - s * F) <= TIGHT * max(abs(P), 1)
        assert abs(Q - s * G) <= TIGHT * max(abs(Q), 1)


def test_coefficients_examples():
    assert coeffs_explicit(C07, 0).coeffs == (1,)
    c1 = coeffs_explicit(QContext(q="1/2", a="7/10"), 1)
    assert c1.coeffs == (-Fraction(17, 10), 1)
    cv = coeffs_explicit(C07, 5)
    F, _ = eval_FG(C07, 5, "2.3")
    assert abs(cv(MP.mpf("2.3")) - F) <= TIGHT * abs(F)


@given(n=st.integers(0, 18), num=st.integers(1, 19), den=st.integers(1, 19),
       qn=st.integers(1, 9))
def test_explicit_equals_recurrence_exact(n, num, den, qn):
    c = QContext(q=Fraction(qn, 10), a=Fraction(num, den))
    e, r = coeffs_explicit(c, n), coeffs_recurrence(c, n)
    assert e.coeffs == r.coeffs
    assert e.coeffs[-1] == 1
    assert e.coeffs[0] == F_at_zero(c, n)


@given(n=st.integers(1, 30), x=st.floats(min_value=-20, max_value=60))
def test_G_recurrence_matches_shift(n, x):
    for ctx in (C07, C1):
        G = eval_FG(ctx, n, x)[1]
        Gs = eval_G_shifted(ctx, n, x)
        assert abs(G - Gs) <= TIGHT * max(abs(G), abs(Gs), 1) * 2 ** (n // 2)


@given(n=st.integers(1, 40), x=st.floats(min_value=-20, max_value=60))
def test_consecutive_values_never_both_vanish(n, x):
    P, Q = pq_sequence(C07, n, x)
    assert abs(P[n]) + abs(P[n - 1]) > 0
    assert abs(Q[n]) + abs(Q[n - 1]) > 0


def test_genfun_trivial_points():
    lhs, rhs = genfun_check(C07, "1.5", 0, 10)
    assert lhs == 1 and rhs == 1
    lhs, rhs = genfun_check(C07, 0, "0.3", 80)
    exact = 1 / ((1 - MP.mpf("0.3")) * (1 - MP.mpf("0.7") * MP.mpf("0.3")))
    assert abs(rhs - exact) <= TIGHT
    assert abs(lhs - exact) <= MP.mpf(10) ** -35


def test_genfun_half_precision_example():
    # the partial sum at N = 40 carries a tail of order t^41, so this bound is out of reach
    lhs, rhs = genfun_check(C07, "1.5", "0.2", 40)
    assert abs(lhs - rhs) <= MP.mpf(2) ** -128


def test_genfun_tail_sized_partial_sum():
    for x in (0, "1.5", "-4"):
        for t in ("0.1", "0.2", "0.3", "-0.35"):
            lhs, rhs = genfun_check(C07, x, t, 150)
            assert abs(lhs - rhs) <= MP.mpf(2) ** -128 * max(1, abs(rhs))


def test_genfun_domain():
    with pytest.raises(DomainError):
        genfun_check(C14, 0, "0.75", 10)
    with pytest.raises(DomainError):
        genfun_check(C07, 0, "-1", 10)


def test_qlommel_h_values():
    assert qlommel_h(C1, 0, "0.3", "0.5") == 1
    with pytest.raises(DomainError):
        qlommel_h(C1, 2, "0.3", 0)


@pytest.mark.parametrize("n", [2, 3])
def test_qlommel_bessel_recombination(n):
    nu, z, q = MP.mpf("0.3"), MP.mpf("0.7"), MP.mpf("0.5")
    lhs = hahn_exton_J(nu + n, z, q, C1)
    rhs = (qlommel_h(C1, n, nu, 1 / z) * hahn_exton_J(nu, z, q, C1)
           - qlommel_h(C1, n - 1, nu + 1, 1 / z) * hahn_exton_J(nu - 1, z, q, C1))
    assert abs(lhs - rhs) <= MP.mpf(2) ** -128 * abs(lhs)


def test_reflection_symmetry():
    a, x, n = MP.mpf("0.7"), MP.mpf("1.1"), 6
    inv = QContext(q="0.5", a=1 / a)
    lhs = a**n * eval_FG(inv, n, x)[0]
    rhs = eval_FG(C07, n, a * x)[0]
    assert abs(lhs - rhs) <= TIGHT * abs(rhs)


def test_hurwitz_reference_point():
    assert hurwitz_limit(C07, 60, 1).error <= MP.mpf(10) ** -9.5


def test_markov_reference_point():
    assert markov_limit(C07, 60, -1).error <= MP.mpf(10) ** -8


def test_a1_hurwitz_limit_decreases():
    errs = [hurwitz_limit(C1, n, 1).error for n in (20, 40, 80, 160)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    # the a = 1 limit converges like 1/n
    assert errs[-1] * 160 < 4


@given(a=st.sampled_from(["0.6", "0.8", "1", "1.3", "1.9"]), z=st.floats(-30, -0.1))
def test_markov_limit_off_support(a, z):
    ctx = QContext(q="0.5", a=a)
    # geometric convergence off a = 1, algebraic (about 1/n) at a = 1
    tol = MP.mpf(1) / 80 if ctx.a_is_one else MP.mpf(10) ** -6
    assert markov_limit(ctx, 80, z).error <= tol


@given(xi=st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=1, max_size=31),
       a=st.sampled_from(["0.6", "1", "1.7"]))
def test_quadratic_form_positive(xi, a):
    ctx = QContext(q="0.5", a=a)
    direct, squares = quadratic_form(ctx, xi)
    assert squares >= 0
    assert abs(direct - squares) <= TIGHT * max(MP.mpf(1), squares) * 2**30
