"""Monic and orthonormal q-Lommel polynomial sequences.

``F_n`` and ``G_n`` are the monic solutions of

    u_{n+1} = (x - (a+1) q^-n) u_n - a q^(1-2n) u_{n-1}

with ``F_{-1}=0, F_0=1`` and ``G_0=0, G_1=1``.  ``P_n`` and ``Q_n`` are the
orthonormal versions, obtained from the symmetric Jacobi recurrence with
``alpha_n = sqrt(a) q^(-n-1/2)`` and ``beta_n = (a+1) q^-n``.

When the context holds exact rationals and ``x`` is exact as well, ``F`` and
``G`` are computed in :class:`fractions.Fraction` arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import DomainError
from .qcore import QContext, convert, phi11, qpoch_table


class PolyValue(NamedTuple):
    n: int
    x: object
    F: object
    G: object
    P: object
    Q: object


def _fg_run(a, q, x, n: int):
    """Lists ``F_0..F_n`` and ``G_0..G_n`` in whatever field ``a, q, x`` live in."""
    one = q**0
    F, G = [one], [one * 0]
    qk = one  # q^k
    for k in range(n):
        beta = (a + 1) / qk
        coupling = a * q / (qk * qk)
        if k == 0:
            F.append((x - beta) * F[0])
            G.append(one)
        else:
            F.append((x - beta) * F[k] - coupling * F[k - 1])
            G.append((x - beta) * G[k] - coupling * G[k - 1])
        qk *= q
    return F, G


def fg_sequence(ctx: QContext, n: int, x):
    """``([F_0..F_n], [G_0..G_n])`` at ``x``."""
    if n < 0:
        raise DomainError("polynomial index must be >= 0")
    a, q, x = ctx.scalars(x)
    return _fg_run(a, q, x, n)


def eval_FG(ctx: QContext, n: int, x):
    """Monic values ``(F_n(x), G_n(x))``."""
    F, G = fg_sequence(ctx, n, x)
    return F[n], G[n]


def eval_G_shifted(ctx: QContext, n: int, x):
    """``G_n`` through the shift relation ``q^(1-n) F_{n-1}(q x)``."""
    if n == 0:
        a, q, x = ctx.scalars(x)
        return q * 0
    a, q, x = ctx.scalars(x)
    F, _ = _fg_run(a, q, q * x, n - 1)
    return F[n - 1] * q ** (1 - n)


def pq_sequence(ctx: QContext, n: int, x):
    """``([P_0..P_n], [Q_0..Q_n])`` at ``x`` by the orthonormal recurrence."""
    if n < 0:
        raise DomainError("polynomial index must be >= 0")
    mp = ctx.mp
    a, q, x = ctx.av, ctx.qv, convert(x, mp)
    sa, sq = mp.sqrt(a), mp.sqrt(q)
    P, Q = [mp.one], [mp.zero]
    p_prev, q_prev = mp.zero, mp.zero
    alpha_prev = mp.zero
    qk = mp.one  # q^k
    for k in range(n):
        alpha = sa / (qk * sq)
        beta = (a + 1) / qk
        p_next = ((x - beta) * P[k] - alpha_prev * p_prev) / alpha
        if k == 0:
            q_next = 1 / alpha
        else:
            q_next = ((x - beta) * Q[k] - alpha_prev * q_prev) / alpha
        p_prev, q_prev = P[k], Q[k]
        P.append(p_next)
        Q.append(q_next)
        alpha_prev = alpha
        qk *= q
    return P, Q


def eval_PQ(ctx: QContext, n: int, x):
    """Orthonormal values ``(P_n(x), Q_n(x))``."""
    P, Q = pq_sequence(ctx, n, x)
    return P[n], Q[n]


def poly_values(ctx: QContext, n_max: int, x) -> list[PolyValue]:
    """All four sequences for ``n = 0..n_max`` at one point."""
    F, G = fg_sequence(ctx, n_max, x)
    P, Q = pq_sequence(ctx, n_max, x)
    return [PolyValue(n, x, F[n], G[n], P[n], Q[n]) for n in range(n_max + 1)]


def scale_factor(ctx: QContext, n: int):
    """``a^(-n/2) q^(n^2/2)``, the factor taking F_n to P_n."""
    mp = ctx.mp
    return mp.power(ctx.av, -mp.mpf(n) / 2) * mp.power(ctx.qv, mp.mpf(n * n) / 2)


# ---------------------------------------------------------------------------
# closed forms at x = 0


def F_at_zero(ctx: QContext, n: int):
    a, q = ctx.scalars()
    sign = -1 if n % 2 else 1
    if (a == 1) if ctx.exact else ctx.a_is_one:
        s = n + 1
    else:
        s = (1 - a ** (n + 1)) / (1 - a)
    return sign * q ** (-(n * (n - 1) // 2)) * s


def PQ_at_zero(ctx: QContext, n: int):
    """``(P_n(0), Q_n(0))`` from their closed forms."""
    mp = ctx.mp
    a, q = ctx.av, ctx.qv
    sign = -1 if n % 2 else 1
    base = sign * mp.power(q / a, mp.mpf(n) / 2)
    if ctx.a_is_one:
        return base * (n + 1), -base * n
    return base * (1 - a ** (n + 1)) / (1 - a), -base * (1 - a**n) / (1 - a)


# ---------------------------------------------------------------------------
# explicit coefficients


@dataclass(frozen=True)
class CoeffVector:
    """Monomial coefficients ``c_0..c_n`` of a polynomial."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = self.coeffs[-1] * 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def explicit_weights(a, q, n: int, qq: Sequence) -> list:
    """Inner coefficients of x^j in F_n before the common prefactor.

    Entry ``j`` is ``(-1)^j q^(j(j-1)/2) / (q;q)_j^2 * S_{n,j}`` where
    ``S_{n,j} = sum_k (q^(k+1);q)_j (q^(n-j-k+1);q)_j a^k``.  ``qq`` holds
    ``(q;q)_0 .. (q;q)_n``; the two Pochhammer factors are quotients of it.
    """
    out = []
    qj_tri = q**0  # q^(j(j-1)/2)
    for j in range(n + 1):
        s = q * 0
        ak = q**0
        for k in range(n - j + 1):
            s += (qq[k + j] / qq[k]) * (qq[n - k] / qq[n - j - k]) * ak
            ak *= a
        sign = -1 if j % 2 else 1
        out.append(sign * qj_tri * s / (qq[j] * qq[j]))
        qj_tri *= q**j
    return out


def coeffs_explicit(ctx: QContext, n: int) -> CoeffVector:
    """Coefficients of ``F_n`` from the double-sum formula."""
    if n < 0:
        raise DomainError("polynomial index must be >= 0")
    a, q = ctx.scalars()
    qq = qpoch_table(q, n) if ctx.exact else qpoch_table(q, n, ctx)
    pref = (-1 if n % 2 else 1) / q ** (n * (n - 1) // 2)
    return CoeffVector(tuple(pref * w for w in explicit_weights(a, q, n, qq)))


def coeffs_recurrence(ctx: QContext, n: int) -> CoeffVector:
    """Coefficients of ``F_n`` by running the recurrence on coefficient lists."""
    a, q = ctx.scalars()
    zero = q * 0
    prev, cur = [zero], [q**0]
    qk = q**0
    for k in range(n):
        beta = (a + 1) / qk
        coupling = a * q / (qk * qk)
        nxt = [zero] + cur  # x * cur
        for i, c in enumerate(cur):
            nxt[i] -= beta * c
        if k > 0:
            for i, c in enumerate(prev):
                nxt[i] -= coupling * c
        prev, cur = cur, nxt
        qk *= q
    return CoeffVector(tuple(cur))


# ---------------------------------------------------------------------------
# generating function, q-Lommel conversion


def genfun_check(ctx: QContext, x, t, N: int):
    """Partial sum of ``sum q^(n(n-1)/2) F_n(x) (-t)^n`` and the closed-form side.

    The closed form ``sum_k q^(k(k-1)/2) (-x t)^k / ((t;q)_{k+1} (a t;q)_{k+1})``
    is summed until its terms drop below the context tolerance.
    """
    mp = ctx.mp
    a, q = ctx.av, ctx.qv
    x, t = convert(x, mp), convert(t, mp)
    if not abs(t) < min(mp.one, 1 / a):
        raise DomainError(f"|t| must be below min(1, 1/a) = {mp.nstr(min(mp.one, 1 / a), 8)}")
    F, _ = _fg_run(a, q, x, N)
    lhs, tri, mt = mp.zero, mp.one, mp.one
    for n in range(N + 1):
        lhs += tri * F[n] * mt
        tri *= q**n
        mt *= -t
    rhs = mp.zero
    den = (1 - t) * (1 - a * t)
    tq, atq = t * q, a * t * q
    term_num = mp.one  # q^(k(k-1)/2) (-xt)^k
    small = 0
    for k in range(ctx.max_terms):
        term = term_num / den
        rhs += term
        if abs(term) <= ctx.tol * max(abs(rhs), mp.eps):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        term_num *= q**k * (-x * t)
        den *= (1 - tq) * (1 - atq)
        tq *= q
        atq *= q
    return lhs, rhs


def qlommel_h(ctx: QContext, n: int, nu, w):
    """``h_{n,nu}(w; q) = (-1)^n w^n q^(n(n-1)/2) F_n(w^-2, q; q^nu)``."""
    mp = ctx.mp
    w = convert(w, mp)
    if w == 0:
        raise DomainError("qlommel_h needs w != 0")
    q = ctx.qv
    nu = convert(nu, mp)
    F, _ = _fg_run(1 / (w * w), q, mp.power(q, nu), n)
    sign = -1 if n % 2 else 1
    return sign * w**n * q ** (n * (n - 1) // 2) * F[n]


# ---------------------------------------------------------------------------
# large-n limits


class LimitCheck(NamedTuple):
    n: int
    value: object
    limit: object

    @property
    def error(self):
        return abs(self.value - self.limit) / abs(self.limit)


def hurwitz_limit(ctx: QContext, n: int, x) -> LimitCheck:
    """Scaled ``P_n(x)`` against its large-n limit on the branch fixed by ``a``."""
    mp = ctx.mp
    a, q = ctx.av, ctx.qv
    x = convert(x, mp)
    P, _ = pq_sequence(ctx, n, x)
    sign = -1 if n % 2 else 1
    if ctx.a_is_one:
        value = sign * P[n] / (n * mp.power(q, mp.mpf(n) / 2))
        limit = phi11(q, q, x, ctx)
    elif a < 1:
        value = sign * mp.power(a / q, mp.mpf(n) / 2) * P[n]
        limit = phi11(q * a, q, x, ctx) / (1 - a)
    else:
        value = sign * mp.power(q * a, -mp.mpf(n) / 2) * P[n]
        limit = a * phi11(q / a, q, x / a, ctx) / (a - 1)
    return LimitCheck(n, value, limit)


def markov_limit(ctx: QContext, n: int, z) -> LimitCheck:
    """``Q_n(z)/P_n(z)`` against its closed-form limit."""
    mp = ctx.mp
    a, q = ctx.av, ctx.qv
    z = convert(z, mp)
    P, Q = pq_sequence(ctx, n, z)
    if ctx.a_is_one:
        limit = -phi11(q, q, q * z, ctx) / phi11(q, q, z, ctx)
    elif a < 1:
        limit = -phi11(q * a, q, q * z, ctx) / phi11(q * a, q, z, ctx)
    else:
        limit = -phi11(q / a, q, q * z / a, ctx) / (a * phi11(q / a, q, z / a, ctx))
    return LimitCheck(n, Q[n] / P[n], limit)


def quadratic_form(ctx: QContext, xi: Sequence):
    """Both sides of the Jacobi quadratic-form rearrangement for a finite vector.

    Returns ``(direct, sum_of_squares)``; they agree and are nonnegative.
    """
    mp = ctx.mp
    a, q = ctx.av, ctx.qv
    xi = [convert(v, mp) for v in xi]
    N = len(xi) - 1
    direct = mp.zero
    for n in range(N + 1):
        direct += (a + 1) / q**n * xi[n] ** 2
    for n in range(N):
        direct += 2 * mp.sqrt(a) / mp.power(q, n + mp.mpf(1) / 2) * xi[n] * xi[n + 1]
    squares = a * xi[0] ** 2 + xi[N] ** 2 / q**N
    r = mp.sqrt(a / q)
    for n in range(N):
        squares += (r * xi[n + 1] + xi[n]) ** 2 / q**n
    return direct, squares
