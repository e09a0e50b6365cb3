"""The moment sequence, the omega sequence and the entire function ``G``.

Moments ``m_n = <e_0, J^n e_0>`` are polynomials in ``a`` and ``1/q``, so
``q`` is allowed to be any positive number other than 1 here.  The p > 1
world (the function ``G`` and the Van Assche limit) uses a
:class:`MomentContext` with ``q`` renamed ``p``; it never mixes with the
q < 1 contexts used for the Nevanlinna functions.

Four independent moment routes are provided:

* ``jacobi``: repeated action of the (monic form of the) Jacobi matrix on e_0,
* ``linear``: the linear recursion weighted by ``omega_k / (q;q)_k``,
* ``quadratic``: ``m_{n+1} = (a+1) m_n + a sum_k q^(-k-1) m_k m_{n-k-1}``,
* ``explicitF``: orthogonality of the explicit coefficient formula of F_n to 1.

With exact inputs every route runs in :class:`fractions.Fraction` arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

from .errors import BoundViolation, DomainError, NonConvergent
from .measures import required_points
from .polyrec import _fg_run, explicit_weights
from .qcore import (DEFAULT_PRECISION, Number, QContext, convert, is_exact, mp_at, phi11,
                    qbinomial, qpoch_inf, qpoch_table)

ROUTES = ("jacobi", "linear", "quadratic", "explicitF")


@dataclass(frozen=True)
class MomentContext:
    """Parameters for the moment routes: any ``q > 0`` with ``q != 1`` and ``a > 0``."""

    q: Number
    a: Number
    precision_bits: int = DEFAULT_PRECISION

    def __post_init__(self):
        for name in ("q", "a"):
            v = getattr(self, name)
            if isinstance(v, str) and "/" in v:
                object.__setattr__(self, name, Fraction(v))
        if int(self.precision_bits) < 64:
            raise DomainError("precision_bits must be >= 64")
        q = convert(self.q, mp_at(64))
        if not q > 0 or q == 1:
            raise DomainError(f"q must be positive and different from 1, got {self.q}")
        if not convert(self.a, mp_at(64)) > 0:
            raise DomainError(f"a must be positive, got {self.a}")

    @classmethod
    def of(cls, ctx) -> "MomentContext":
        if isinstance(ctx, MomentContext):
            return ctx
        if isinstance(ctx, QContext):
            return cls(ctx.q, ctx.a, ctx.precision_bits)
        raise TypeError(f"expected a QContext or MomentContext, got {type(ctx).__name__}")

    @cached_property
    def mp(self):
        return mp_at(self.precision_bits)

    @property
    def exact(self) -> bool:
        return is_exact(self.q) and is_exact(self.a)

    def scalars(self):
        """``(a, q)`` as Fractions when exact, else as mpf."""
        if self.exact:
            return Fraction(self.a), Fraction(self.q)
        return convert(self.a, self.mp), convert(self.q, self.mp)

    def qpoch(self, n: int) -> list:
        a, q = self.scalars()
        if self.exact:
            return qpoch_table(q, n)
        return qpoch_table(q, n, _numeric_ctx(self))


def _numeric_ctx(mc: MomentContext) -> QContext:
    # only the working precision of this context is used
    return QContext(q=Fraction(1, 2), a=1, precision_bits=mc.precision_bits)


class OmegaTable(NamedTuple):
    values: tuple
    route: str


class MomentTable(NamedTuple):
    values: tuple
    route: str

    @property
    def N(self) -> int:
        return len(self.values) - 1


# ---------------------------------------------------------------------------
# omega_n(a, p)


def omega_table(ctx, N: int, route: str = "definition") -> OmegaTable:
    """``omega_0 .. omega_N``.

    ``definition`` sums ``[n,k]_p p^(-k(n-k)) a^k``.  ``hermite`` uses the
    continuous q-Hermite recurrence ``2x H_k = H_{k+1} + (1-r^k) H_{k-1}``
    (``r = 1/p``, ``2x = sqrt(a) + 1/sqrt(a)``), rescaled by ``a^(k/2)`` so
    that it stays rational:
    ``omega_{k+1} = (a+1) omega_k - a (1 - p^-k) omega_{k-1}``.
    """
    if N < 0:
        raise DomainError("N must be >= 0")
    mc = MomentContext.of(ctx)
    a, p = mc.scalars()
    if route == "definition":
        qctx = None if mc.exact else _numeric_ctx(mc)
        vals = []
        for n in range(N + 1):
            s = a * 0
            for k in range(n + 1):
                s += qbinomial(n, k, p, qctx) * a**k / p ** (k * (n - k))
            vals.append(s)
        return OmegaTable(tuple(vals), route)
    if route == "hermite":
        vals = [a**0, a + 1]
        for k in range(1, N):
            vals.append((a + 1) * vals[k] - a * (1 - p**-k) * vals[k - 1])
        return OmegaTable(tuple(vals[: N + 1]), route)
    raise DomainError(f"unknown omega route {route!r}")


def omega(ctx, n: int, route: str = "definition"):
    return omega_table(ctx, n, route).values[n]


def omega_bounds(ctx, N: int) -> list:
    """Margins ``(omega_n / lower - 1, 1 - omega_n / upper)`` for the estimate
    ``a^(n/2) q^(-n(n-1)/4) <= omega_n <= (1+a)^n q^(-n^2/4)``."""
    mc = MomentContext.of(ctx)
    mp = mc.mp
    a, q = (convert(v, mp) for v in mc.scalars())
    out = []
    for n, w in enumerate(omega_table(mc, N).values):
        w = convert(w, mp)
        lower = mp.power(a, mp.mpf(n) / 2) * mp.power(q, -mp.mpf(n * (n - 1)) / 4)
        upper = (1 + a) ** n * mp.power(q, -mp.mpf(n * n) / 4)
        out.append((w / lower - 1, 1 - w / upper))
    return out


# ---------------------------------------------------------------------------
# moment routes


def moments_jacobi(ctx, N: int) -> MomentTable:
    """``<e_0, J^n e_0>`` exactly, on a working vector of length n+1.

    The diagonal similarity taking J to the monic form (superdiagonal
    ``alpha_k^2 = a q^(-2k-1)``, subdiagonal 1) fixes e_0, so no square roots
    are needed.
    """
    if N < 0:
        raise DomainError("N must be >= 0")
    a, q = MomentContext.of(ctx).scalars()
    one = a**0
    beta = [(a + 1) / q**k for k in range(N + 1)]
    alpha2 = [a / q ** (2 * k + 1) for k in range(N + 1)]
    v = [one]
    out = [one]
    for n in range(1, N + 1):
        w = [one * 0] * (len(v) + 1)
        for k, vk in enumerate(v):
            w[k] += beta[k] * vk
            w[k + 1] += vk
            if k > 0:
                w[k - 1] += alpha2[k - 1] * vk
        # coordinates beyond N - n never feed back into e_0
        v = w[: N - n + 1] if len(w) > N - n + 1 else w
        out.append(v[0])
    return MomentTable(tuple(out), "jacobi")


def moments_linear(ctx, N: int) -> MomentTable:
    """``m_n = omega_n/(q;q)_{n-1} - sum_{k=1}^{n-1} q^k omega_k/(q;q)_k m_{n-k}``."""
    if N < 0:
        raise DomainError("N must be >= 0")
    mc = MomentContext.of(ctx)
    a, q = mc.scalars()
    om = omega_table(mc, N).values
    qq = mc.qpoch(N)
    m = [a**0]
    for n in range(1, N + 1):
        s = om[n] / qq[n - 1]
        for k in range(1, n):
            s -= q**k * om[k] / qq[k] * m[n - k]
        m.append(s)
    return MomentTable(tuple(m), "linear")


def moments_quadratic(ctx, N: int) -> MomentTable:
    """``m_{n+1} = (a+1) m_n + a sum_{k<n} q^(-k-1) m_k m_{n-k-1}``."""
    if N < 0:
        raise DomainError("N must be >= 0")
    a, q = MomentContext.of(ctx).scalars()
    m = [a**0]
    for n in range(N):
        s = a * 0
        for k in range(n):
            s += m[k] * m[n - k - 1] / q ** (k + 1)
        m.append((a + 1) * m[n] + a * s)
    return MomentTable(tuple(m), "quadratic")


def moments_explicitF(ctx, N: int) -> MomentTable:
    """Moments from ``sum_j c_{n,j} m_j = 0`` (n >= 1), the integral of F_n.

    ``c_{n,j}`` is the coefficient of ``x^j`` in F_n without its common
    prefactor; ``c_{n,n} = (-1)^n q^(n(n-1)/2)`` is never zero.
    """
    if N < 0:
        raise DomainError("N must be >= 0")
    mc = MomentContext.of(ctx)
    out_mp = mc.mp
    if not mc.exact:
        # the alternating sum cancels about N^2 |log2 q| / 4 bits
        lq = abs(math.log2(float(convert(mc.q, mp_at(64)))))
        extra = math.ceil(N * N * lq / 4) + 32
        mc = MomentContext(mc.q, mc.a, mc.precision_bits + extra)
    a, q = mc.scalars()
    qq = mc.qpoch(N)
    m = [a**0]
    for n in range(1, N + 1):
        c = explicit_weights(a, q, n, qq)
        s = a * 0
        for j in range(n):
            s += c[j] * m[j]
        m.append(-s / c[n])
    if not mc.exact:
        m = [out_mp.mpf(v) for v in m]
    return MomentTable(tuple(m), "explicitF")


_ROUTE_FN = {
    "jacobi": moments_jacobi,
    "linear": moments_linear,
    "quadratic": moments_quadratic,
    "explicitF": moments_explicitF,
}


def moments(ctx, N: int, route: str = "quadratic") -> MomentTable:
    try:
        fn = _ROUTE_FN[route]
    except KeyError:
        raise DomainError(f"unknown moment route {route!r}; choose from {', '.join(ROUTES)}")
    return fn(ctx, N)


def route_deltas(tables: list[MomentTable], ref: MomentTable) -> dict:
    """Entrywise ``table - ref`` for each table (exact zeros in rational mode)."""
    return {t.route: tuple(u - v for u, v in zip(t.values, ref.values)) for t in tables}


# ---------------------------------------------------------------------------
# bounds


class BoundRow(NamedTuple):
    n: int
    moment: object
    upper: object
    lower: object
    upper_margin: object
    lower_margin: object


def bounds_check(ctx, N: int, values: MomentTable | None = None) -> list[BoundRow]:
    """Check ``m_n <= (1+a)^n q^(-n^2/4) / (q;q)_{n-1}`` and the lower bounds
    ``m_{2n} >= a^n q^(-n^2)``, ``m_{2n+1} >= (a+1) a^n q^(-n(n+1))``.

    Margins are relative: ``1 - m/upper`` and ``m/lower - 1``.  The lower
    bound is attained at n = 0 and n = 1, so a negative margin beyond the
    rounding level of the context raises :class:`BoundViolation`.
    """
    mc = MomentContext.of(ctx)
    if convert(mc.q, mp_at(64)) >= 1:
        raise DomainError("the moment bounds are stated for 0 < q < 1")
    mp = mc.mp
    values = values or moments_quadratic(mc, N)
    a, q = (convert(v, mp) for v in mc.scalars())
    qq = qpoch_table(q, N, _numeric_ctx(mc))
    slack = mp.ldexp(1, -(mc.precision_bits - 8))
    rows = []
    for n in range(N + 1):
        m = convert(values.values[n], mp)
        pref = qq[n - 1] if n >= 1 else mp.one
        upper = (1 + a) ** n * mp.power(q, -mp.mpf(n * n) / 4) / pref
        h = n // 2
        if n % 2 == 0:
            lower = a**h * q ** (-h * h)
        else:
            lower = (a + 1) * a**h * q ** (-h * (h + 1))
        row = BoundRow(n, m, upper, lower, 1 - m / upper, m / lower - 1)
        if row.upper_margin < -slack or row.lower_margin < -slack:
            raise BoundViolation(f"moment bound fails at n={n}: {row}")
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# the entire function G (p > 1)


def _p_context(p, a, ctx) -> MomentContext:
    bits = ctx.precision_bits if ctx is not None else DEFAULT_PRECISION
    mc = MomentContext(p, a, bits)
    if not convert(mc.q, mp_at(64)) > 1:
        raise DomainError(f"G is defined here for p > 1, got p={p}")
    return mc


def g_coefficients(p, a, K: int, ctx=None) -> list:
    """Taylor coefficients ``omega_k(a,p) p^k / (p;p)_k`` of ``G`` for k <= K."""
    mc = _p_context(p, a, ctx)
    _, pv = mc.scalars()
    om = omega_table(mc, K).values
    pp = mc.qpoch(K)
    return [om[k] * pv**k / pp[k] for k in range(K + 1)]


def gfun_G(p, a, z, ctx=None, route: str = "series"):
    """``G(z) = sum_k omega_k(a,p) (pz)^k / (p;p)_k``.

    ``route="product"`` evaluates ``(z; 1/p)_inf 1phi1(0; z; 1/p, a z)``
    instead.  The series is summed until a term falls below the tolerance
    relative to the largest partial sum and the last three terms decrease.
    """
    mc = _p_context(p, a, ctx)
    mp = mc.mp
    av, pv = (convert(v, mp) for v in mc.scalars())
    z = convert(z, mp)
    if route == "product":
        qc = QContext(q=1 / pv, a=1, precision_bits=mc.precision_bits)
        return qpoch_inf(z, qc.qv, qc) * phi11(z, qc.qv, av * z, qc)
    if route != "series":
        raise DomainError(f"unknown G route {route!r}")
    tol = mp.ldexp(1, -(mc.precision_bits + 8))
    # omega via the three-term recurrence, (p;p)_k incrementally
    w_prev, w = mp.zero, mp.one
    pk, poch = mp.one, mp.one
    total, biggest = mp.one, mp.one
    recent = [mp.one]
    pz = pv * z
    term_pow = mp.one
    for k in range(1, 20000):
        w_prev, w = w, (av + 1) * w - (av * (1 - 1 / pk) * w_prev if k > 1 else 0)
        pk *= pv
        poch *= 1 - pk
        term_pow *= pz
        term = w * term_pow / poch
        total += term
        biggest = max(biggest, abs(total))
        recent = (recent + [abs(term)])[-3:]
        if len(recent) == 3 and abs(term) < tol * biggest and recent[0] >= recent[1] >= recent[2]:
            return total
    raise NonConvergent("G series did not converge")


def qdiff_residual(p, a, z, ctx=None):
    """``G(z) - (1-(a+1)z) G(z/p) + a z^2 G(z/p^2)/p`` relative to its largest term."""
    mc = _p_context(p, a, ctx)
    mp = mc.mp
    av, pv = (convert(v, mp) for v in mc.scalars())
    z = convert(z, mp)
    g0, g1, g2 = (gfun_G(p, a, z / pv**s, mc) for s in range(3))
    terms = (g0, (1 - (av + 1) * z) * g1, av * z * z * g2 / pv)
    res = terms[0] - terms[1] + terms[2]
    return abs(res) / max(abs(t) for t in terms)


def ratio_taylor(p, a, N: int, ctx=None) -> list:
    """Taylor coefficients of ``G(z/p) / G(z)`` at 0 up to order N (series division)."""
    mc = _p_context(p, a, ctx)
    _, pv = mc.scalars()
    g = g_coefficients(p, a, N, mc)
    h = [g[k] / pv**k for k in range(N + 1)]
    c = []
    for n in range(N + 1):
        s = h[n]
        for k in range(1, n + 1):
            s -= g[k] * c[n - k]
        c.append(s / g[0])
    return c


def van_assche_error(p, a, x, n: int, ctx=None):
    """``|x^-n F_n(a,p;x) - G(1/x)|`` relative to ``|G(1/x)|``."""
    mc = _p_context(p, a, ctx)
    mp = mc.mp
    av, pv = (convert(v, mp) for v in mc.scalars())
    x = convert(x, mp)
    if x == 0:
        raise DomainError("the limit is stated for x != 0")
    F, _ = _fg_run(av, pv, x, n)
    g = gfun_G(p, a, 1 / x, mc)
    return abs(F[n] / x**n - g) / abs(g)


def moment_tail_points(ctx: QContext, n: int, deficit) -> int:
    """Number of mass points after which ``sum rho x^n`` is below ``deficit``.

    Uses the same weight asymptotics as :func:`qlommel.measures.tail_bound`
    with monomial weighting ``x^n ~ q^(-mn)``; stated here as ``degree = n/2``.
    """
    return required_points(ctx, deficit, math.ceil(n / 2))
