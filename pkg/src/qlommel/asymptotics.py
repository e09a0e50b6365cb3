"""Large-argument behaviour of ``1phi1(0; w; q, z)`` and of its zeros.

With ``qt = exp(4 pi^2 / ln q)`` and ``beta(z) = pi ln z / ln q`` the exact
factorisation

    (z; q)_inf = A(z) sin(beta(z)) / (q/z; q)_inf,
    A(z) = 2 q^(-1/12) sqrt(z) exp(-ln(z)^2 / (2 ln q) + pi^2 / (3 ln q))
           * |(qt e^(-2 i beta); qt)_inf|^2

holds for z > 0.  The squared modulus is evaluated as the real product
``prod_k (1 - 2 qt^k cos(2 beta) + qt^(2k))``; since ``qt`` is tiny for
moderate q only a few factors are needed.

The asymptotic predictors drop every ``O(1/z)`` correction; callers compare
ratios, not absolute errors.
"""
from __future__ import annotations

from typing import NamedTuple

from .errors import DomainError
from .qcore import QContext, convert, is_inf, phi11, phi11_dz, qpoch_inf
from .roots import phi11_zeros


class DaalhuisFrame(NamedTuple):
    qt: object
    beta: object
    A: object
    K: int


class IdentityResult(NamedTuple):
    name: str
    params: tuple
    lhs: object
    rhs: object
    error: object


class AsympParts(NamedTuple):
    predicted: object
    leading: object
    correction: object


class ZetaRow(NamedTuple):
    m: int
    zeta: object
    predicted: object
    correction_ratio: object
    derivative: object
    derivative_predicted: object
    derivative_ratio: object


class XiPrediction(NamedTuple):
    point: object
    second_term: object
    inv_weight: object


def _ctx(q, ctx: QContext | None) -> QContext:
    if ctx is None:
        return QContext(q=q, a=1)
    if ctx.q != q and convert(q, ctx.mp) != ctx.qv:
        return ctx.with_params(q=q)
    return ctx


def _real_product(x, c2, mp, stop):
    """``prod_{k>=1} (1 - 2 x^k c2 + x^(2k))`` for ``0 <= x < 1``."""
    out = mp.one
    xk = x
    while xk >= stop:
        out *= 1 - 2 * xk * c2 + xk * xk
        xk *= x
    return out


def qtilde(q, ctx: QContext | None = None):
    c = _ctx(q, ctx)
    mp = c.mp
    return mp.exp(4 * mp.pi**2 / mp.log(c.qv))


def frame(q, z, ctx: QContext | None = None) -> DaalhuisFrame:
    """``qt``, ``beta(z)``, ``A(z)`` and ``K(z) = floor(1/2 - ln z / ln q)``."""
    c = _ctx(q, ctx)
    mp = c.mp
    z = convert(z, mp)
    if not z > 0:
        raise DomainError("the frame is defined for z > 0")
    lq = mp.log(c.qv)
    lz = mp.log(z)
    qt = mp.exp(4 * mp.pi**2 / lq)
    beta = mp.pi * lz / lq
    osc = _real_product(qt, mp.cos(2 * beta), mp, mp.ldexp(1, -(c.precision_bits + 16)))
    A = 2 * mp.power(c.qv, -mp.one / 12) * mp.sqrt(z) * mp.exp(-lz**2 / (2 * lq) + mp.pi**2 / (3 * lq)) * osc
    K = int(mp.floor(mp.mpf(1) / 2 - lz / lq))
    return DaalhuisFrame(qt, beta, A, K)


def daalhuis_sides(q, z, ctx: QContext | None = None):
    """``((z;q)_inf, A(z) sin(beta(z)) / (q/z;q)_inf)``."""
    c = _ctx(q, ctx)
    mp = c.mp
    z = convert(z, mp)
    fr = frame(q, z, c)
    lhs = qpoch_inf(z, c.qv, c)
    rhs = fr.A * mp.sin(fr.beta) / qpoch_inf(c.qv / z, c.qv, c)
    return lhs, rhs


def daalhuis_check(q, z, ctx: QContext | None = None):
    """Relative error of the exact factorisation of ``(z;q)_inf``.

    When the left side is an exact zero (z = q^-m) the size of ``sin(beta)``
    is returned instead, which is then at rounding level.
    """
    c = _ctx(q, ctx)
    mp = c.mp
    lhs, rhs = daalhuis_sides(q, z, c)
    if lhs == 0:
        return abs(mp.sin(frame(q, z, c).beta))
    return abs(rhs / lhs - 1)


# ---------------------------------------------------------------------------
# theta-function identities


def theta1_product(beta, q, ctx: QContext) -> object:
    """``2 q^(1/4) (q^2;q^2)_inf sin(beta) |(e^(2 i beta) q^2; q^2)_inf|^2``."""
    mp = ctx.mp
    beta, q = convert(beta, mp), convert(q, mp)
    q2 = q * q
    poch = qpoch_inf(q2, q2, ctx)
    osc = _real_product(q2, mp.cos(2 * beta), mp, mp.ldexp(1, -(ctx.precision_bits + 16)))
    return 2 * mp.power(q, mp.mpf(1) / 4) * poch * mp.sin(beta) * osc


def theta1_sum(beta, q, ctx: QContext, hyperbolic: bool = False) -> object:
    """``2 sum_k (-1)^k q^((2k+1)^2/4) sin((2k+1) beta)``.

    With ``hyperbolic`` the argument is ``i beta`` and the common factor
    ``i`` is dropped, leaving ``sinh`` in place of ``sin``.
    """
    mp = ctx.mp
    beta, q = convert(beta, mp), convert(q, mp)
    trig = mp.sinh if hyperbolic else mp.sin
    tol = mp.ldexp(1, -(ctx.precision_bits + 16))
    total = mp.zero
    biggest = mp.zero
    for k in range(ctx.max_terms):
        e = mp.mpf(2 * k + 1)
        term = (-1) ** k * mp.power(q, e * e / 4) * trig(e * beta)
        total += term
        biggest = max(biggest, abs(total))
        if k > 2 and abs(term) <= tol * biggest and mp.power(q, e) * mp.exp(2 * abs(beta)) < 1:
            break
    return 2 * total


def _result(name, params, lhs, rhs, mp) -> IdentityResult:
    if lhs == 0 and rhs == 0:
        err = mp.zero
    else:
        err = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    return IdentityResult(name, params, lhs, rhs, err)


def theta_check(beta, q, ctx: QContext | None = None) -> IdentityResult:
    """Product form against sum form of ``theta_1`` (real beta)."""
    c = ctx or QContext(q="0.5", a=1)
    return _result("theta1", (beta, q), theta1_product(beta, q, c), theta1_sum(beta, q, c), c.mp)


def jacobi_transform_check(beta, h, ctx: QContext | None = None) -> IdentityResult:
    """``theta_1(beta, e^(-pi h)) = h^(-1/2) exp(-beta^2/(pi h)) theta_1'(i beta/h, e^(-pi/h))``.

    ``theta_1'`` is the sum with the factor ``i`` removed on both sides.
    """
    c = ctx or QContext(q="0.5", a=1)
    mp = c.mp
    b, hv = convert(beta, mp), convert(h, mp)
    lhs = theta1_sum(b, mp.exp(-mp.pi * hv), c)
    rhs = (mp.exp(-b * b / (mp.pi * hv)) / mp.sqrt(hv)
           * theta1_sum(b / hv, mp.exp(-mp.pi / hv), c, hyperbolic=True))
    return _result("jacobi_transform", (beta, h), lhs, rhs, mp)


def jacobi_product_check(beta, h, ctx: QContext | None = None) -> IdentityResult:
    """Both sides of the imaginary transformation written as infinite products."""
    c = ctx or QContext(q="0.5", a=1)
    mp = c.mp
    b, hv = convert(beta, mp), convert(h, mp)
    stop = mp.ldexp(1, -(c.precision_bits + 16))
    Q = mp.exp(-2 * mp.pi * hv)
    lhs = (mp.exp(-mp.pi * hv / 4) * mp.sin(b) * qpoch_inf(Q, Q, c)
           * _real_product(Q, mp.cos(2 * b), mp, stop))
    R = mp.exp(-2 * mp.pi / hv)
    rhs = (mp.exp(-b * b / (mp.pi * hv)) / mp.sqrt(hv) * mp.exp(-mp.pi / (4 * hv)) * mp.sinh(b / hv)
           * qpoch_inf(R, R, c) * qpoch_inf(mp.exp(-(2 * mp.pi + 2 * b) / hv), R, c)
           * qpoch_inf(mp.exp(-(2 * mp.pi - 2 * b) / hv), R, c))
    return _result("jacobi_product", (beta, h), lhs, rhs, mp)


def dedekind_check(h, ctx: QContext | None = None) -> IdentityResult:
    """``(e^(-2 pi h); .)_inf = h^(-1/2) exp(pi (h - 1/h) / 12) (e^(-2 pi / h); .)_inf``."""
    c = ctx or QContext(q="0.5", a=1)
    mp = c.mp
    hv = convert(h, mp)
    Q = mp.exp(-2 * mp.pi * hv)
    R = mp.exp(-2 * mp.pi / hv)
    lhs = qpoch_inf(Q, Q, c)
    rhs = mp.exp(mp.pi * (hv - 1 / hv) / 12) / mp.sqrt(hv) * qpoch_inf(R, R, c)
    return _result("dedekind", (h,), lhs, rhs, mp)


def extreme_value_checks(q, ctx: QContext | None = None) -> list[IdentityResult]:
    """Closed forms of ``(qt; qt)_inf`` and ``(-qt; qt)_inf`` in terms of q."""
    c = _ctx(q, ctx)
    mp = c.mp
    qv = c.qv
    lq = mp.log(qv)
    qt = mp.exp(4 * mp.pi**2 / lq)
    common = mp.exp(-mp.pi**2 / (6 * lq))
    lo_l = qpoch_inf(qt, qt, c)
    lo_r = mp.power(qv, mp.mpf(1) / 24) * mp.sqrt(-lq / (2 * mp.pi)) * common * qpoch_inf(qv, qv, c)
    hi_l = qpoch_inf(-qt, qt, c)
    hi_r = mp.power(qv, -mp.mpf(1) / 48) / mp.sqrt(2) * common * qpoch_inf(mp.sqrt(qv), qv, c)
    return [_result("qt_min", (q,), lo_l, lo_r, mp), _result("qt_max", (q,), hi_l, hi_r, mp)]


def identity_checks(ctx: QContext | None = None, betas=("0.7", "1.3", "2.9"),
                    qs=("0.3", "0.5", "0.8"), hs=("0.5", "1", "2", "3.7")) -> list[IdentityResult]:
    """Every exact identity on a small parameter set."""
    c = ctx or QContext(q="0.5", a=1)
    out = []
    for q in qs:
        for b in betas:
            out.append(theta_check(b, q, c))
        out.extend(extreme_value_checks(q, c.with_params(q=q)))
    for h in hs:
        out.append(dedekind_check(h, c))
        for b in betas:
            out.append(jacobi_transform_check(b, h, c))
            out.append(jacobi_product_check(b, h, c))
    return out


# ---------------------------------------------------------------------------
# asymptotics of 1phi1 and of its derivative


def phi11_asymp(w, q, z, ctx: QContext | None = None) -> AsympParts:
    """Two-term large-z form of ``1phi1(0; w; q, z)`` with the O(1/z) factors set to 1."""
    c = _ctx(q, ctx)
    mp = c.mp
    w, z = convert(w, mp), convert(z, mp)
    if not 0 <= w < 1:
        raise DomainError("the expansion is stated for 0 <= w < 1")
    fr = frame(q, z, c)
    qv = c.qv
    wpoch = qpoch_inf(w, qv, c)
    leading = fr.A * mp.sin(fr.beta) / wpoch
    K = fr.K
    if w == 0:
        corr = mp.zero
    else:
        sign = -1 if K % 2 == 0 else 1  # (-1)^(K+1)
        corr = (sign * qv ** ((K + 1) * K // 2) * w ** (K + 1) * qpoch_inf(qv ** (K + 1) * z, qv, c)
                / qpoch_inf(qv, qv, c) / wpoch)
    return AsympParts(leading + corr, leading, corr)


def phi11_deriv_asymp(w, q, z, ctx: QContext | None = None):
    """Leading large-z form of the z-derivative of ``1phi1(0; w; q, z)``."""
    c = _ctx(q, ctx)
    mp = c.mp
    w, z = convert(w, mp), convert(z, mp)
    if not 0 <= w < 1:
        raise DomainError("the expansion is stated for 0 <= w < 1")
    fr = frame(q, z, c)
    lq = mp.log(c.qv)
    s, co = mp.sin(fr.beta), mp.cos(fr.beta)
    c2 = mp.cos(2 * fr.beta)
    osc_sum = mp.zero
    qk = fr.qt
    stop = mp.ldexp(1, -(c.precision_bits + 16))
    while qk >= stop:
        osc_sum += qk / (1 - 2 * qk * c2 + qk * qk)
        qk *= fr.qt
    bracket = ((-fr.beta / mp.pi + mp.mpf(1) / 2) * s + mp.pi / lq * co
               + 8 * mp.pi / lq * osc_sum * s * s * co)
    return fr.A / (qpoch_inf(w, c.qv, c) * z) * bracket


def deriv_at_root_predicted(k: int, w, q, ctx: QContext | None = None):
    """``(-1)^(k+1) (q;q)_inf^2 / (w;q)_inf q^(-k(k-1)/2)``, the derivative at zeta_k."""
    c = _ctx(q, ctx)
    mp = c.mp
    qv = c.qv
    sign = 1 if k % 2 else -1
    return sign * qpoch_inf(qv, qv, c) ** 2 / qpoch_inf(convert(w, mp), qv, c) * mp.power(qv, -mp.mpf(k * (k - 1)) / 2)


# ---------------------------------------------------------------------------
# root predictions


def predict_zeta(m: int, w, q, ctx: QContext | None = None):
    """``q^-m - w^(m+1) q^(m^2) / (q;q)_inf^2``."""
    c = _ctx(q, ctx).for_index(m)
    mp = c.mp
    qv = c.qv
    w = convert(w, mp)
    return qv**-m - w ** (m + 1) * qv ** (m * m) / qpoch_inf(qv, qv, c) ** 2


def predict_xi(m: int, ctx: QContext, t) -> XiPrediction:
    """Two-term prediction of the m-th mass point of ``mu_t`` and of ``1/rho`` there.

    Stated for ``0 < q < a < 1`` and ``t != -1``; ``t = INF`` uses the limit
    of ``(t+a)/(t+1)``, which is 1.
    """
    c = ctx.for_index(m)
    mp = c.mp
    q, a = c.qv, c.av
    if not (0 < q < a < 1):
        raise DomainError("the mass-point asymptotics are stated for 0 < q < a < 1")
    if is_inf(t):
        ratio = mp.one
    else:
        tv = c.num(t)
        if tv == -1:
            raise DomainError("t = -1 is excluded")
        ratio = (tv + a) / (tv + 1)
    qq = qpoch_inf(q, q, c)
    second = (1 - a) * ratio * (qpoch_inf(q / a, q, c) / qq) ** 2 * a ** (m - 1)
    point = a / q**m * (1 - second)
    inv_w = qq**2 * a**m / q ** (m * m)
    return XiPrediction(point, second, inv_w)


def zeta_table(w, ctx: QContext, ms) -> list[ZetaRow]:
    """Measured zeros of ``1phi1(0; w; q, .)`` against their two-term predictions."""
    ms = list(ms)
    zs = phi11_zeros(w, ctx, max(ms) + 1)
    rows = []
    for m in ms:
        c = ctx.for_index(m)
        mp = c.mp
        qv = c.qv
        z = zs[m]
        predicted = predict_zeta(m, w, ctx.q, c)
        measured_corr = qv**-m - z
        pred_corr = qv**-m - predicted
        d = phi11_dz(convert(w, mp), qv, z, c)
        dp = deriv_at_root_predicted(m, w, ctx.q, c)
        rows.append(ZetaRow(m, z, predicted, measured_corr / pred_corr, d, dp, d / dp))
    return rows


def phi11_exact(w, q, z, ctx: QContext | None = None):
    """The series value, for comparison with :func:`phi11_asymp`."""
    c = _ctx(q, ctx)
    return phi11(convert(w, c.mp), c.qv, z, c)
