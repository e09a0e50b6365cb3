"""Acceptance criteria 1-13.

Each test carries ``@pytest.mark.criterion(n, title)``; the terminal summary
prints one PASS/FAIL line per criterion.  Run directly with
``python3 tests/test_acceptance.py`` or through pytest.
"""
import random
import sys
from functools import lru_cache

import pytest

from qlommel.asymptotics import daalhuis_check, identity_checks, predict_xi, zeta_table
from qlommel.measures import find_points, jacobi_oracle, n_extremal, required_points, weight_at
from qlommel.moments import (ROUTES, MomentContext, bounds_check, moments, moments_quadratic,
                             qdiff_residual, ratio_taylor)
from qlommel.nevanlinna import alpha, phi_psi_identity, quad
from qlommel.polyrec import genfun_check, hurwitz_limit, markov_limit
from qlommel.qcore import INF, QContext, mp_at

MP = mp_at(256)
E30 = MP.mpf(10) ** -30
GRID_Q = ("0.3", "0.5", "0.8")
GRID_Z = (-5, -1, 0, 1, 5, 20, 50)


def a_grid(q):
    """Five values of a spanning (q, 1/q), including a=1."""
    qv = MP.mpf(q)
    return [1 if e == 0 else qv ** MP.mpf(e) for e in (0.75, 0.4, 0, -0.4, -0.75)]


GRID = [QContext(q=q, a=a) for q in GRID_Q for a in a_grid(q)]


def grid_id(c):
    return f"q={c.q},a={float(c.av):.4f}"


# ---------------------------------------------------------------------------


@pytest.mark.criterion(1, "determinant identity AD - BC = 1 on the (q, a, z) grid")
@pytest.mark.parametrize("ctx", GRID, ids=grid_id)
def test_c01_determinant(ctx):
    for z in GRID_Z:
        assert abs(quad(ctx, z).det - 1) <= E30, z


@pytest.mark.criterion(2, "phi/psi identities, generic and a=1 forms, on the same grid")
@pytest.mark.parametrize("ctx", GRID, ids=grid_id)
def test_c02_phi_psi_identities(ctx):
    for z in GRID_Z:
        lhs, rhs = phi_psi_identity(ctx, z)
        assert abs(lhs - rhs) <= E30 * abs(rhs), z


@pytest.mark.criterion(3, "four moment routes: exact in rational mode, 1e-35 in real mode")
def test_c03_rational():
    mc = MomentContext("1/2", "3/4")
    tables = [moments(mc, 30, r) for r in ROUTES]
    for t in tables[1:]:
        assert all(u - v == 0 for u, v in zip(t.values, tables[0].values)), t.route


@pytest.mark.criterion(3, "four moment routes: exact in rational mode, 1e-35 in real mode")
@pytest.mark.parametrize("a", ["0.7", "1.4", "1"])
def test_c03_real(a):
    mc = MomentContext("0.5", a, 256)
    tables = [moments(mc, 30, r) for r in ROUTES]
    for t in tables[1:]:
        for u, v in zip(t.values, tables[0].values):
            assert abs(u / v - 1) <= MP.mpf(10) ** -35, t.route


@pytest.mark.criterion(4, "moment upper and lower bounds, n <= 50")
@pytest.mark.parametrize("a", ["0.7", "1.4", "1"])
def test_c04_bounds(a):
    rows = bounds_check(QContext(q="0.5", a=a), 50)
    assert len(rows) == 51
    assert min(min(r.upper_margin, r.lower_margin) for r in rows) >= 0


C07 = QContext(q="0.5", a="0.7")
T_SET = (-1, "-0.7", 0, 2, INF)


@lru_cache(maxsize=None)
def extremal(t):
    M = required_points(C07, MP.mpf(10) ** -25, 12)
    return n_extremal(C07, t, M)


@pytest.mark.criterion(5, "N-extremal orthonormality for i, j <= 12")
@pytest.mark.parametrize("t", T_SET, ids=str)
def test_c05_orthonormality(t):
    mu = extremal(t)
    G = mu.gram(C07, 12)
    worst = max(abs(G[i][j] - (i == j)) for i in range(13) for j in range(13))
    assert worst <= MP.mpf(10) ** -20


@pytest.mark.criterion(6, "measure mass within the tail bound, first moment a+1")
@pytest.mark.parametrize("t", T_SET, ids=str)
def test_c06_mass(t):
    mu = extremal(t)
    assert abs(mu.mass() - 1) <= mu.tail_bound
    assert abs(mu.moment(1) - (C07.av + 1)) <= MP.mpf(10) ** -20


@pytest.mark.criterion(6, "measure mass within the tail bound, first moment a+1")
@pytest.mark.parametrize("a", ["1.4", "1"])
def test_c06_mass_other_a(a):
    ctx = QContext(q="0.5", a=a)
    mu = n_extremal(ctx, 2, required_points(ctx, MP.mpf(10) ** -22, 1))
    assert abs(mu.mass() - 1) <= mu.tail_bound
    assert abs(mu.moment(1) - (ctx.av + 1)) <= MP.mpf(10) ** -20


@pytest.mark.criterion(7, "exact factorisation of (z;q)_inf and theta/Dedekind identities")
@pytest.mark.parametrize("q", ["0.3", "0.5", "0.8"])
def test_c07_daalhuis(q):
    c = QContext(q=q, a=1)
    tol = MP.ldexp(1, -(256 - 24))
    rng = random.Random(20241)
    checked = 0
    while checked < 50:
        e = rng.uniform(-3, 10)
        if abs(e - round(e)) < 1e-3 / -float(MP.log(c.qv)):
            continue
        z = c.qv ** -MP.mpf(e)
        assert daalhuis_check(q, z, c) <= tol, e
        checked += 1


@pytest.mark.criterion(7, "exact factorisation of (z;q)_inf and theta/Dedekind identities")
def test_c07_identities():
    tol = MP.ldexp(1, -(256 - 24))
    res = identity_checks(QContext(q="0.5", a=1))
    bad = [r for r in res if not r.error <= tol]
    assert not bad, bad


def _ratio_sequence(t):
    """Measured/predicted second-term and inverse-weight ratios, m = 5..10."""
    pts = find_points(C07, t, 11)
    out = []
    for m in range(5, 11):
        pr = predict_xi(m, C07, t)
        c = C07.for_index(m)
        lead = c.av / c.qv**m
        measured = (lead - pts[m]) / lead
        inv_w = 1 / weight_at(C07, t, pts[m])
        out.append((m, measured / pr.second_term, inv_w / pr.inv_weight))
    return out


@pytest.mark.criterion(8, "mass-point and weight asymptotics, m = 5..10")
@pytest.mark.parametrize("t", [0, INF], ids=str)
def test_c08_root_asymptotics(t):
    rows = _ratio_sequence(t)
    late = [r for r in rows if r[0] >= 8]
    for m, root_ratio, weight_ratio in late:
        assert 0.8 <= root_ratio <= 1.25, (m, root_ratio)
        assert 0.75 <= weight_ratio <= 1.25, (m, weight_ratio)
    dev = [abs(r[1] - 1) for r in rows]
    assert all(b < a for a, b in zip(dev, dev[1:]))
    # the O(m a^m) weight correction is not yet monotone below m = 8
    wdev = [abs(r[2] - 1) for r in late]
    assert all(b < a for a, b in zip(wdev, wdev[1:]))


@pytest.mark.criterion(9, "zeros of 1phi1(0; 0.3; 0.5, .) and derivatives there, m = 5..10")
def test_c09_zeta():
    c = QContext(q="0.5", a=1)
    rows = zeta_table("0.3", c, range(5, 11))
    for r in rows:
        assert (r.derivative > 0) == (r.m % 2 == 1)
        if r.m >= 8:
            assert 0.8 <= r.correction_ratio <= 1.25
            assert abs(r.derivative_ratio - 1) <= 0.25
    dev = [abs(r.correction_ratio - 1) for r in rows]
    assert all(b < a for a, b in zip(dev, dev[1:]))
    ddev = [abs(r.derivative_ratio - 1) for r in rows]
    assert all(b < a for a, b in zip(ddev, ddev[1:]))


@pytest.mark.criterion(10, "Jacobi truncation eigenvalues and Gauss weights vs mu_alpha")
def test_c10_jacobi_oracle():
    al = alpha(C07)
    pts = find_points(C07, al, 5)
    ws = [weight_at(C07, al, x) for x in pts]
    errs = {}
    for N in (80, 160):
        eigs, gw = jacobi_oracle(C07, N, 5)
        errs[N] = (max(abs(u - v) for u, v in zip(eigs, pts)),
                   max(abs(u - v) for u, v in zip(gw, ws)))
    assert errs[80][0] <= MP.mpf(10) ** -8
    assert errs[80][1] <= MP.mpf(10) ** -6
    assert errs[160][0] < errs[80][0] and errs[160][1] < errs[80][1]


@pytest.mark.criterion(11, "generating-function identity with the N=40 partial sum")
@pytest.mark.parametrize("x", [0, "1.5"], ids=str)
@pytest.mark.parametrize("t", ["0.1", "0.2", "0.3"])
def test_c11_genfun(x, t):
    lhs, rhs = genfun_check(C07, x, t, 40)
    assert abs(lhs - rhs) <= E30


def test_c11_supplement_tail_sized_partial_sum():
    # same grid with a partial sum long enough for the t^N tail to drop below 1e-30
    for x in (0, "1.5"):
        for t in ("0.1", "0.2", "0.3"):
            lhs, rhs = genfun_check(C07, x, t, 150)
            assert abs(lhs - rhs) <= E30


@pytest.mark.criterion(12, "Hurwitz and Markov limits at n = 20, 40, 60")
@pytest.mark.parametrize("a", ["0.7", "1.4"])
def test_c12_limits(a):
    ctx = QContext(q="0.5", a=a)
    h = [hurwitz_limit(ctx, n, 1).error for n in (20, 40, 60)]
    m = [markov_limit(ctx, n, -1).error for n in (20, 40, 60)]
    for errs in (h, m):
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] <= MP.mpf(10) ** -8


def test_c12_supplement_a_one_monotone():
    # at a = 1 both limits converge algebraically; only monotone decrease is expected
    ctx = QContext(q="0.5", a=1)
    h = [hurwitz_limit(ctx, n, 1).error for n in (20, 40, 60)]
    m = [markov_limit(ctx, n, -1).error for n in (20, 40, 60)]
    assert h[0] > h[1] > h[2] and m[0] > m[1] > m[2]


@pytest.mark.criterion(13, "q-difference equation of G and Taylor coefficients of G(z/p)/G(z)")
def test_c13_gfun():
    assert qdiff_residual(2, "0.7", "0.1") <= E30
    c = ratio_taylor(2, "0.7", 20)
    m = moments_quadratic(MomentContext(2, "0.7"), 20).values
    for n, (u, v) in enumerate(zip(c, m)):
        assert abs(u - v) <= MP.mpf(10) ** -25 * abs(v), n


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
