"""The Nevanlinna functions A, B, C, D and the objects built from them.

With ``phi(z) = 1phi1(0; q a; q, z)`` and ``psi(z) = 1phi1(0; q/a; q, z/a)``,
for ``a != 1``

    A(z) = (phi(qz) - psi(qz)) / (1-a)       B(z) = (a psi(z) - phi(z)) / (1-a)
    C(z) = (psi(qz) - a phi(qz)) / (1-a)     D(z) = a (phi(z) - psi(z)) / (1-a)

At ``a = 1`` the quotients are replaced by their limits, which involve the
parameter derivative ``chi`` of the kernel at ``b = q`` and the z-derivatives
of ``phi``.  The a=1 formulas switch on when ``|a-1| < 2^(-P/2)``; for
``|a-1| < 2^(-P/4)`` both forms are evaluated and must agree to ``2^(-P/8)``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

from .errors import BranchMismatch, PoleError
from .polyrec import pq_sequence
from .qcore import INF, QContext, convert, is_inf, phi11_jet


class PhiPsiPair(NamedTuple):
    phi: object
    psi: object
    dphi: object = None
    dpsi: object = None
    d2phi: object = None
    d2psi: object = None
    chi: object = None
    dchi: object = None


class NevanlinnaQuad(NamedTuple):
    A: object
    B: object
    C: object
    D: object

    @property
    def det(self):
        return self.A * self.D - self.B * self.C


class BDJet(NamedTuple):
    B: object
    D: object
    dB: object
    dD: object


def guarded(ctx: QContext) -> QContext:
    """Context with extra bits offsetting the ``1/(1-a)`` amplification."""
    gap = abs(ctx.av - 1)
    if ctx.a_is_one or gap >= 1:
        return ctx
    extra = math.ceil(-float(ctx.mp.log(gap, 2))) + 8
    return ctx.with_precision(ctx.precision_bits + extra)


def phi_psi(ctx: QContext, z, with_derivatives: bool = False, order: int | None = None,
            unit: bool | None = None) -> PhiPsiPair:
    """``phi_a``, ``psi_a`` and optionally their z-derivatives at ``z``.

    On the a=1 branch (or when ``unit`` forces it) ``chi`` and its derivative
    are filled in and ``psi`` equals ``phi``.
    """
    if order is None:
        order = 1 if with_derivatives else 0
    unit = ctx.a_is_one if unit is None else unit
    mp = ctx.mp
    q = ctx.qv
    z = convert(z, mp)
    if unit:
        j = phi11_jet(q, q, z, ctx, order=max(order, 1), param=True)
        return PhiPsiPair(j.value, j.value, j.dz if order else None, j.dz if order else None,
                          j.dz2, j.dz2, j.db, j.db_dz)
    a = ctx.av
    jp = phi11_jet(q * a, q, z, ctx, order=order)
    js = phi11_jet(q / a, q, z / a, ctx, order=order)
    dpsi = js.dz / a if order >= 1 else None
    d2psi = js.dz2 / (a * a) if order >= 2 else None
    return PhiPsiPair(jp.value, js.value, jp.dz, dpsi, jp.dz2, d2psi)


def _quad_general(ctx: QContext, z) -> NevanlinnaQuad:
    g = guarded(ctx)
    a, q = g.av, g.qv
    z = convert(z, g.mp)
    s = phi_psi(g, z, unit=False)
    s_q = phi_psi(g, q * z, unit=False)
    k = 1 - a
    vals = ((s_q.phi - s_q.psi) / k, (a * s.psi - s.phi) / k,
            (s_q.psi - a * s_q.phi) / k, a * (s.phi - s.psi) / k)
    return NevanlinnaQuad(*(ctx.mp.mpf(v) for v in vals))


def _quad_unit(ctx: QContext, z) -> NevanlinnaQuad:
    q = ctx.qv
    z = convert(z, ctx.mp)
    s = phi_psi(ctx, z, with_derivatives=True, unit=True)
    s_q = phi_psi(ctx, q * z, with_derivatives=True, unit=True)
    A = -2 * q * s_q.chi - z * q * s_q.dphi
    B = 2 * q * s.chi + z * s.dphi - s.phi
    C = 2 * q * s_q.chi + s_q.phi + z * q * s_q.dphi
    D = -2 * q * s.chi - z * s.dphi
    return NevanlinnaQuad(A, B, C, D)


def quad(ctx: QContext, z) -> NevanlinnaQuad:
    """``(A(z), B(z), C(z), D(z))`` for real ``z``."""
    ctx.require_indeterminate()
    if ctx.a_is_one:
        return _quad_unit(ctx, z)
    out = _quad_general(ctx, z)
    if ctx.a_near_one:
        ref = _quad_unit(ctx, z)
        tol = ctx.mp.ldexp(1, -(ctx.precision_bits // 8))
        for name, u, v in zip("ABCD", out, ref):
            if abs(u - v) > tol * max(1, abs(u)):
                raise BranchMismatch(
                    f"{name}({z}) differs between the a=1 and generic forms: {u} vs {v}"
                )
    return out


def bd_jet(ctx: QContext, x) -> BDJet:
    """``B, D`` and their derivatives at ``x``."""
    ctx.require_indeterminate()
    if ctx.a_is_one:
        q = ctx.qv
        x = convert(x, ctx.mp)
        s = phi_psi(ctx, x, order=2, unit=True)
        B = 2 * q * s.chi + x * s.dphi - s.phi
        D = -2 * q * s.chi - x * s.dphi
        dB = 2 * q * s.dchi + x * s.d2phi
        dD = -2 * q * s.dchi - s.dphi - x * s.d2phi
        return BDJet(B, D, dB, dD)
    g = guarded(ctx)
    a = g.av
    s = phi_psi(g, convert(x, g.mp), order=1, unit=False)
    k = 1 - a
    vals = ((a * s.psi - s.phi) / k, a * (s.phi - s.psi) / k,
            (a * s.dpsi - s.dphi) / k, a * (s.dphi - s.dpsi) / k)
    return BDJet(*(ctx.mp.mpf(v) for v in vals))


def alpha(ctx: QContext):
    """``lim P_n(0)/Q_n(0)``: -1 for a <= 1 and -a for a > 1."""
    a = ctx.scalars()[0]
    if ctx.a_is_one or a <= 1:
        return a * 0 - 1
    return -a


def upsilon(t, ctx: QContext):
    """The involution ``t -> -(a+t)/(1+t)`` of the extended real line."""
    if is_inf(t):
        return ctx.scalars()[0] * 0 - 1
    a, _, tv = ctx.scalars(t)
    if tv == -1:
        return INF
    return -(a + tv) / (1 + tv)


def krein_abcd(ctx: QContext, z):
    """Krein's functions ``(a, b, c, d)`` at ``z``; note ``a d - b c = -1``."""
    al = ctx.num(alpha(ctx))
    A, B, C, D = quad(ctx, -convert(z, ctx.mp))
    return A - C / al, -B + D / al, C, -D


def repro_kernel(ctx: QContext, u, v):
    """``K(u, v) = sum_n P_n(u) P_n(v)`` in closed form."""
    ctx.require_indeterminate()
    mp = ctx.mp
    u, v = convert(u, mp), convert(v, mp)
    if u == v:
        return kernel_diagonal(ctx, u)
    if ctx.a_is_one:
        q = ctx.qv
        su = phi_psi(ctx, u, with_derivatives=True, unit=True)
        sv = phi_psi(ctx, v, with_derivatives=True, unit=True)
        eu = 2 * q * su.chi + u * su.dphi
        ev = 2 * q * sv.chi + v * sv.dphi
        return (su.phi * ev - eu * sv.phi) / (u - v)
    g = guarded(ctx)
    a = g.av
    su = phi_psi(g, u, unit=False)
    sv = phi_psi(g, v, unit=False)
    return mp.mpf(a * (su.phi * sv.psi - su.psi * sv.phi) / ((1 - a) * (u - v)))


def kernel_diagonal(ctx: QContext, x):
    """``K(x, x) = B'(x) D(x) - B(x) D'(x)``."""
    j = bd_jet(ctx, x)
    return j.dB * j.D - j.B * j.dD


def kernel_series(ctx: QContext, u, v, N: int):
    """Partial sum ``sum_{n<=N} P_n(u) P_n(v)``."""
    Pu, _ = pq_sequence(ctx, N, u)
    Pv, _ = pq_sequence(ctx, N, v)
    return ctx.mp.fsum(x * y for x, y in zip(Pu, Pv))


def stieltjes_t(ctx: QContext, t, z):
    """``(A t - C)/(B t - D)`` at real ``z``; ``A/B`` for ``t = INF``."""
    A, B, C, D = quad(ctx, z)
    mp = ctx.mp
    eps = mp.ldexp(1, -(ctx.precision_bits // 2))
    if is_inf(t):
        num, den, scale = A, B, abs(B)
    else:
        t = ctx.num(t)
        num, den, scale = A * t - C, B * t - D, abs(B * t) + abs(D)
    if abs(den) <= eps * scale or den == 0:
        raise PoleError(f"z={mp.nstr(z, 15)} is a mass point of the measure for t={t}")
    return num / den


def phi_psi_identity(ctx: QContext, z):
    """Both sides of the Wronskian-type identity linking phi_a and psi_a at z and qz.

    For a != 1: ``phi(z) psi(qz) - a psi(z) phi(qz) = 1 - a``.  At a=1:
    ``2q (phi(z) chi(qz) - chi(z) phi(qz)) + z (q phi(z) phi'(qz) - phi'(z) phi(qz))
    + phi(z) phi(qz) = 1``.
    """
    mp = ctx.mp
    q = ctx.qv
    z = convert(z, mp)
    if ctx.a_is_one:
        s = phi_psi(ctx, z, with_derivatives=True, unit=True)
        s_q = phi_psi(ctx, q * z, with_derivatives=True, unit=True)
        lhs = (2 * q * (s.phi * s_q.chi - s.chi * s_q.phi)
               + z * (q * s.phi * s_q.dphi - s.dphi * s_q.phi) + s.phi * s_q.phi)
        return lhs, mp.one
    a = ctx.av
    s = phi_psi(ctx, z)
    s_q = phi_psi(ctx, q * z)
    return s.phi * s_q.psi - a * s.psi * s_q.phi, 1 - a
