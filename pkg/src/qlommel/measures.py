"""N-extremal measures, absolutely continuous measures and the Jacobi oracle.

Mass points of ``mu_t`` are the zeros of the characteristic function
``Phi_t(x) = a (t+1) psi_a(x) - (t+a) phi_a(x)`` (a different defining
function is used at a=1).  They are located through interlacing with the
Friedrichs measure ``mu_alpha``: its zeros ``r_0 < r_1 < ...`` (zeros of
``phi_a`` when a <= 1, of ``psi_a`` when a > 1) satisfy

    xi_0 < r_0,   r_{m-1} < xi_m < r_m   (t != alpha)

so every cell ``(r_{m-1}, r_m)`` carries exactly one verified sign change.
The first point may be negative; it is searched on a geometric grid down to
``-q^-(M/2 + 8)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import (BracketError, DomainError, NonPositiveWeight, NotARoot)
from .nevanlinna import alpha, bd_jet, guarded, phi_psi
from .polyrec import pq_sequence
from .qcore import INF, QContext, convert, is_inf, mp_at, qpoch_inf
from .roots import Bracket, phi11_zeros, refine, scan_geometric


def _t_value(ctx: QContext, t):
    """``INF``, the exact value -1 (when |t+1| < 2^(-P/2)), or t as mpf."""
    if is_inf(t):
        return INF
    tv = ctx.num(t)
    if abs(tv + 1) < ctx.mp.ldexp(1, -(ctx.precision_bits // 2)):
        return ctx.mp.mpf(-1)
    return tv


def _is_alpha(ctx: QContext, t) -> bool:
    if is_inf(t):
        return False
    return abs(ctx.num(t) - ctx.num(alpha(ctx))) < ctx.mp.ldexp(1, -(ctx.precision_bits // 2))


def char_fn(ctx: QContext, t, x):
    """The function whose real zeros are the mass points of ``mu_t``.

    Equals ``(1-a)(B(x) t - D(x))`` for a != 1 and ``B(x) t - D(x)`` at a=1;
    for ``t = INF`` the coefficient of ``t`` is used.
    """
    ctx.require_indeterminate()
    mp = ctx.mp
    x = convert(x, mp)
    t = _t_value(ctx, t)
    if ctx.a_is_one:
        q = ctx.qv
        s = phi_psi(ctx, x, with_derivatives=True, unit=True)
        e = 2 * q * s.chi + x * s.dphi
        if is_inf(t):
            return e - s.phi
        return (t + 1) * e - t * s.phi
    a = ctx.av
    if is_inf(t):
        s = phi_psi(ctx, x)
        return a * s.psi - s.phi
    if t == -1:
        return (1 - a) * phi_psi(ctx, x).phi
    if t == -a:
        return a * (1 - a) * phi_psi(ctx, x).psi
    s = phi_psi(ctx, x)
    return a * (t + 1) * s.psi - (t + a) * s.phi


def reference_points(ctx: QContext, M: int) -> list:
    """The ``M`` smallest mass points of the Friedrichs measure ``mu_alpha``."""
    ctx.require_indeterminate()
    q, a = ctx.qv, ctx.av
    if ctx.a_is_one or a <= 1:
        w = q if ctx.a_is_one else q * a
        return phi11_zeros(w, ctx, M)
    return [a * r for r in phi11_zeros(q / a, ctx, M)]


def _root_index(ctx: QContext, x) -> int:
    """Index m with ``x ~ q^-m``, used to pick the working precision."""
    x = abs(float(x))
    if x <= 1:
        return 0
    return max(0, round(math.log(x) / -math.log(float(ctx.qv))))


def find_points(ctx: QContext, t, M: int) -> list:
    """The ``M`` smallest mass points of ``mu_t``, increasing."""
    if M < 1:
        raise DomainError("M must be >= 1")
    ctx.require_indeterminate()
    ref = reference_points(ctx, M)
    if _is_alpha(ctx, t):
        return [ctx.mp.mpf(r) for r in ref]

    def f(x, c):
        return char_fn(c, t, x)

    points = [_first_point(ctx, t, ref[0], M, f)]
    for m in range(1, M):
        cm = ctx.for_index(m)
        br = Bracket(ref[m - 1], ref[m], None, None)
        points.append(ctx.mp.mpf(refine(f, br, cm)))
    return points


def _first_point(ctx: QContext, t, r0, M: int, f):
    mp = ctx.mp
    cm = ctx.for_index(1)
    f0 = f(mp.zero, cm)
    if f0 == 0:
        return mp.zero
    fr = f(r0, cm)
    if (f0 > 0) != (fr > 0):
        return mp.mpf(refine(f, Bracket(mp.zero, r0, f0, fr), cm))
    q = ctx.qv
    stop = mp.power(q, -(mp.mpf(M) / 2 + 8))
    start = -min(r0, mp.mpf(1)) / 4
    if (f(start, cm) > 0) != (f0 > 0):
        return mp.mpf(refine(f, Bracket(start, mp.zero, None, None), cm))
    found = scan_geometric(f, cm, start, mp.power(q, mp.mpf(-1) / 8), stop, 1)
    if not found:
        raise BracketError(
            f"no mass point of mu_{t} in (-{mp.nstr(stop, 10)}, {mp.nstr(r0, 10)})"
        )
    return mp.mpf(refine(f, found[0], cm))


def inverse_weight(ctx: QContext, x):
    """``1/rho(x)`` from the phi/psi derivative form (chi form at a=1)."""
    ctx.require_indeterminate()
    c = ctx.for_index(_root_index(ctx, x))
    if c.a_is_one:
        q = c.qv
        x = convert(x, c.mp)
        s = phi_psi(c, x, order=2, unit=True)
        v = (2 * q * (s.dphi * s.chi - s.phi * s.dchi) + x * s.dphi**2
             - s.phi * s.dphi - x * s.phi * s.d2phi)
        return ctx.mp.mpf(v)
    g = guarded(c)
    a = g.av
    s = phi_psi(g, convert(x, g.mp), order=1, unit=False)
    return ctx.mp.mpf(a / (1 - a) * (s.psi * s.dphi - s.phi * s.dpsi))


def inverse_weight_bd(ctx: QContext, x):
    """``1/rho(x) = B'(x) D(x) - B(x) D'(x)``, the route through B and D."""
    c = ctx.for_index(_root_index(ctx, x))
    j = bd_jet(c, x)
    return ctx.mp.mpf(j.dB * j.D - j.B * j.dD)


def weight_at(ctx: QContext, t, x):
    """Mass ``rho(x)`` of ``mu_t`` at its mass point ``x``."""
    c = ctx.for_index(_root_index(ctx, x))
    mp = c.mp
    x = convert(x, mp)
    val = char_fn(c, t, x)
    # residual scale: |x Phi'(x)| via a symmetric difference on the root scale
    h = max(abs(x), mp.one) * mp.ldexp(1, -(c.precision_bits // 3))
    slope = abs(char_fn(c, t, x + h) - char_fn(c, t, x - h)) / (2 * h)
    scale = slope * max(abs(x), mp.one)
    if abs(val) > mp.ldexp(1, -(ctx.precision_bits // 2)) * scale:
        raise NotARoot(f"x={mp.nstr(x, 20)} is not a mass point of mu_{t}: residual {mp.nstr(val, 5)}")
    inv = inverse_weight(ctx, x)
    if not inv > 0:
        raise NonPositiveWeight(f"computed 1/rho({mp.nstr(x, 15)}) = {mp.nstr(inv, 10)}")
    return 1 / inv


def tail_bound(ctx: QContext, M: int, degree: int = 0):
    """Estimate of ``sum_{m>=M} rho_m x_m^k`` weighted by ``P_i^2``, ``i <= degree``.

    The weights behave like ``(q;q)_inf^-2 b^-m q^(m^2)`` with ``b = min(a, 1/a)``
    and ``P_i(x)^2 <= a^-i q^(i^2) x^(2i)`` beyond the zeros of ``P_i``.  With
    ``x_m ~ q^-m`` the tail from index M behaves like
    ``(q;q)_inf^-2 b^(d-M) q^((M-d)^2)``.  The factor ``2 (M+1)`` covers the
    geometric remainder and the ``1 + O(m b^m)`` correction of the weights
    (which at a=1 is a factor linear in m).  A rounding allowance of
    ``2^-(P-16)`` is added because sums of computed weights carry it.
    """
    mp = ctx.mp
    q = ctx.qv
    b = min(ctx.av, 1 / ctx.av)
    k = M - degree
    if k <= 0:
        return mp.inf
    pure = 2 * (M + 1) * mp.power(b, -k) * mp.power(q, k * k) / qpoch_inf(q, q, ctx) ** 2
    return pure + rounding_allowance(ctx)


def rounding_allowance(ctx: QContext):
    return ctx.mp.ldexp(1, -(ctx.precision_bits - 16))


def required_points(ctx: QContext, deficit, degree: int = 0) -> int:
    """Smallest M whose tail bound is below ``deficit``."""
    deficit = ctx.num(deficit)
    if not deficit > rounding_allowance(ctx):
        raise DomainError(
            f"deficit {ctx.mp.nstr(deficit, 5)} is below the rounding level of "
            f"{ctx.precision_bits}-bit arithmetic"
        )
    M = degree + 1
    while tail_bound(ctx, M, degree) >= deficit:
        M += 1
    return M


@dataclass(frozen=True)
class DiscreteMeasure:
    """First ``M`` mass points and weights of ``mu_t``."""

    t: object
    points: tuple
    weights: tuple
    tail_bound: object

    def __post_init__(self):
        if len(self.points) != len(self.weights):
            raise DomainError("points and weights differ in length")
        if any(not w > 0 for w in self.weights):
            raise NonPositiveWeight("every weight of an N-extremal measure is positive")
        if any(not x < y for x, y in zip(self.points, self.points[1:])):
            raise DomainError("mass points must be strictly increasing")
        if sum(1 for x in self.points if x < 0) > 1:
            raise DomainError("an N-extremal measure has at most one negative mass point")

    @property
    def M(self) -> int:
        return len(self.points)

    def mass(self):
        return sum(self.weights)

    def moment(self, n: int):
        return sum(w * x**n for x, w in zip(self.points, self.weights))

    def gram(self, ctx: QContext, degree: int):
        """Matrix ``sum_m rho_m P_i(x_m) P_j(x_m)`` for ``i, j <= degree``."""
        mp = ctx.mp
        G = [[mp.zero] * (degree + 1) for _ in range(degree + 1)]
        for x, w in zip(self.points, self.weights):
            P, _ = pq_sequence(ctx, degree, x)
            for i in range(degree + 1):
                wi = w * P[i]
                for j in range(i, degree + 1):
                    G[i][j] += wi * P[j]
        for i in range(degree + 1):
            for j in range(i):
                G[i][j] = G[j][i]
        return G


def n_extremal(ctx: QContext, t, M: int) -> DiscreteMeasure:
    """The measure ``mu_t`` truncated to its ``M`` smallest mass points."""
    pts = find_points(ctx, t, M)
    ws = [weight_at(ctx, t, x) for x in pts]
    alpha_v = ctx.num(alpha(ctx))
    if pts[0] < 0 and not is_inf(t) and alpha_v <= ctx.num(t) <= 0:
        raise DomainError(f"negative mass point found for t={t} inside [alpha, 0]")
    return DiscreteMeasure(t, tuple(pts), tuple(ws), tail_bound(ctx, M))


# ---------------------------------------------------------------------------
# absolutely continuous measures


@dataclass(frozen=True)
class DensitySpec:
    beta: object
    gamma: object

    def __post_init__(self):
        if not convert(self.gamma, mp_at(64)) > 0:
            raise DomainError("gamma must be positive")


def ac_density(ctx: QContext, spec: DensitySpec, x):
    """Density of the absolutely continuous measure for the constant ``beta + i gamma``."""
    ctx.require_indeterminate()
    mp = ctx.mp
    b, g = ctx.num(spec.beta), ctx.num(spec.gamma)
    x = convert(x, mp)
    if ctx.a_is_one:
        q = ctx.qv
        s = phi_psi(ctx, x, with_derivatives=True, unit=True)
        e = 2 * q * s.chi + x * s.dphi
        u = (b + 1) * e - b * s.phi
        v = e - s.phi
        return g / (mp.pi * (u * u + g * g * v * v))
    gc = guarded(ctx)
    a = gc.av
    s = phi_psi(gc, convert(x, gc.mp))
    u = (b + 1) * a * s.psi - (b + a) * s.phi
    v = a * s.psi - s.phi
    return mp.mpf(g * (1 - a) ** 2 / (gc.mp.pi * (u * u + g * g * v * v)))


def ac_density_bd(ctx: QContext, spec: DensitySpec, x):
    """The same density through ``(beta B - D)^2 + gamma^2 B^2``."""
    mp = ctx.mp
    b, g = ctx.num(spec.beta), ctx.num(spec.gamma)
    j = bd_jet(ctx, x)
    return g / (mp.pi * ((b * j.B - j.D) ** 2 + g * g * j.B**2))


# ---------------------------------------------------------------------------
# Jacobi truncation oracle


def _sturm_count(diag: Sequence, off2: Sequence, lam, tiny) -> int:
    """Number of eigenvalues below ``lam`` (LDL^T pivots of the shifted matrix)."""
    count = 0
    d = diag[0] - lam
    if d < 0:
        count += 1
    for i in range(1, len(diag)):
        if d == 0:
            d = tiny
        d = diag[i] - lam - off2[i - 1] / d
        if d < 0:
            count += 1
    return count


def jacobi_oracle(ctx: QContext, N: int, k: int | None = None):
    """Smallest ``k`` eigenvalues of the N x N Jacobi truncation and Gauss weights.

    Eigenvalues come from Sturm-sequence bisection.  The weight of an
    eigenvalue ``lam`` is the squared first component of its normalised
    eigenvector, ``1 / sum_{n<N} P_n(lam)^2``.
    """
    if N < 2:
        raise DomainError("jacobi_oracle needs N >= 2")
    k = N if k is None else min(k, N)
    mp = ctx.mp
    a, q = ctx.av, ctx.qv
    diag = [(a + 1) / q**n for n in range(N)]
    off2 = [a / q ** (2 * n + 1) for n in range(N - 1)]
    tiny = mp.ldexp(1, -4 * ctx.precision_bits)
    rel = mp.ldexp(1, -(ctx.precision_bits - 8))
    upper = mp.one
    while _sturm_count(diag, off2, upper, tiny) < k:
        upper *= 2
    eigs = []
    lo_prev = mp.zero
    for i in range(k):
        lo, hi = lo_prev, upper
        while hi - lo > rel * hi:
            mid = (lo + hi) / 2
            if _sturm_count(diag, off2, mid, tiny) > i:
                hi = mid
            else:
                lo = mid
        lam = (lo + hi) / 2
        eigs.append(lam)
        lo_prev = lo
    weights = []
    for lam in eigs:
        P, _ = pq_sequence(ctx, N - 1, lam)
        weights.append(1 / mp.fsum(p * p for p in P))
    return eigs, weights
