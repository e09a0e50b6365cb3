"""Arbitrary-precision q-series kernels.

All floating evaluations run under a :class:`QContext`.  The context fixes
the parameters ``q`` and ``a``, the working precision and the series
truncation tolerance.  Contexts are immutable; every function here is a pure
function of (context, arguments) and may be called from several threads.

Truncation rules
----------------
* ``qpoch_inf`` multiplies factors ``1 - z q^j`` until ``|z q^j| < tol (1-q)``.
  The omitted tail then changes the product by a relative amount below ``tol``.
* ``phi11`` (and its derivatives) stop at the first index where the current
  term is below ``tol`` times the largest partial-sum magnitude seen so far
  and the last three terms are non-increasing in absolute value.  After
  ``max_terms`` terms :class:`NonConvergent` is raised.

Before summing, the magnitude of the largest series term is estimated in
floating point.  The sum is then carried out with that many extra bits, so
the result keeps the context precision even when large terms cancel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import NamedTuple, Union

from mpmath.ctx_mp import MPContext

from .errors import DomainError, NonConvergent, PoleError

DEFAULT_PRECISION = 256
GUARD_BITS = 20

Number = Union[int, float, str, Fraction, "object"]


@lru_cache(maxsize=None)
def mp_at(prec: int) -> MPContext:
    """Shared mpmath context at ``prec`` bits.  Never mutate the result."""
    ctx = MPContext()
    ctx.prec = int(prec)
    return ctx


class _Infinity:
    """The point at infinity of the extended real line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(t) -> bool:
    return t is INF


def is_exact(x) -> bool:
    return isinstance(x, Fraction) or (isinstance(x, int) and not isinstance(x, bool))


def parse_number(text: str):
    """Parse ``"num/den"`` to a Fraction, ``"inf"`` to INF; keep decimals as strings."""
    s = text.strip()
    if s.lower() in ("inf", "+inf", "infinity", "oo"):
        return INF
    if "/" in s:
        return Fraction(s)
    try:
        return int(s)
    except ValueError:
        float(s)  # raises ValueError on garbage
        return s


def convert(x, mp: MPContext):
    """Convert a number (Fraction, int, float, decimal string, mpf) into ``mp``."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    if isinstance(x, str) and "/" in x:
        f = Fraction(x)
        return mp.mpf(f.numerator) / f.denominator
    if x is INF:
        raise DomainError("cannot convert the extended point INF to a real number")
    return mp.mpf(x)


@dataclass(frozen=True)
class QContext:
    """Immutable parameter record: ``q``, ``a`` and the numerics.

    ``q`` and ``a`` may be given as Fractions (or ``"num/den"`` strings); the
    moment routes then run in exact rational arithmetic.  ``series_tol`` of
    ``None`` means ``2**-(precision_bits + 8)``.
    """

    q: Number
    a: Number = 1
    precision_bits: int = DEFAULT_PRECISION
    series_tol: Number | None = None
    max_terms: int = 20000

    def __post_init__(self):
        for name in ("q", "a"):
            v = getattr(self, name)
            if isinstance(v, str) and "/" in v:
                object.__setattr__(self, name, Fraction(v))
        if int(self.precision_bits) < 64:
            raise DomainError(f"precision_bits must be >= 64, got {self.precision_bits}")
        if self.max_terms < 1:
            raise DomainError("max_terms must be positive")
        if not 0 < self.qv < 1:
            raise DomainError(f"q must lie in (0, 1), got {self.q}")
        if not self.av > 0:
            raise DomainError(f"a must be positive, got {self.a}")
        if not 0 < self.tol < 1:
            raise DomainError("series_tol must lie in (0, 1)")

    @cached_property
    def mp(self) -> MPContext:
        return mp_at(self.precision_bits)

    @cached_property
    def qv(self):
        return convert(self.q, self.mp)

    @cached_property
    def av(self):
        return convert(self.a, self.mp)

    @cached_property
    def tol(self):
        if self.series_tol is None:
            return self.mp.ldexp(self.mp.one, -(self.precision_bits + 8))
        return convert(self.series_tol, self.mp)

    @property
    def exact(self) -> bool:
        return is_exact(self.q) and is_exact(self.a)

    @property
    def indeterminate(self) -> bool:
        return self.qv < self.av < 1 / self.qv

    @property
    def a_is_one(self) -> bool:
        """``|a - 1| < 2^(-P/2)``: the a=1 formulas are used."""
        return abs(self.av - 1) < self.mp.ldexp(1, -(self.precision_bits // 2))

    @property
    def a_near_one(self) -> bool:
        """``|a - 1| < 2^(-P/4)``: both branches are evaluated and compared."""
        return abs(self.av - 1) < self.mp.ldexp(1, -(self.precision_bits // 4))

    def num(self, x):
        return convert(x, self.mp)

    def scalars(self, *extra):
        """``(a, q, *extra)`` as Fractions when everything is exact, else as mpf."""
        if self.exact and all(is_exact(v) for v in extra):
            return (Fraction(self.a), Fraction(self.q), *(Fraction(v) for v in extra))
        return (self.av, self.qv, *(convert(v, self.mp) for v in extra))

    def require_indeterminate(self):
        if not self.indeterminate:
            raise DomainError(
                f"a={self.a} is outside the indeterminate range (q, 1/q) for q={self.q}"
            )

    def with_precision(self, bits: int) -> "QContext":
        if bits == self.precision_bits:
            return self
        return replace(self, precision_bits=int(bits))

    def with_params(self, *, q=None, a=None) -> "QContext":
        return replace(self, q=self.q if q is None else q, a=self.a if a is None else a)

    def bits_for_index(self, m: int) -> int:
        """Precision needed when magnitudes like q^(-m^2) enter a computation."""
        need = 64 + math.ceil(4 * m * m * math.log2(1 / float(self.qv)))
        return max(self.precision_bits, need)

    def for_index(self, m: int) -> "QContext":
        return self.with_precision(self.bits_for_index(max(int(m), 0)))


DEFAULT_CONTEXT = QContext(q=Fraction(1, 2), a=1)


def _numeric(ctx: QContext | None) -> QContext:
    return DEFAULT_CONTEXT if ctx is None else ctx


# ---------------------------------------------------------------------------
# q-Pochhammer symbols and q-binomials


def qpoch_finite(z, q, n: int, ctx: QContext | None = None):
    """``(z; q)_n``; exact when ``z`` and ``q`` are exact and no context is given."""
    if n < 0:
        raise DomainError("qpoch_finite needs n >= 0")
    if ctx is None and is_exact(z) and is_exact(q):
        out, zq = Fraction(1), Fraction(z)
        for _ in range(n):
            out *= 1 - zq
            zq *= q
        return out
    mp = _numeric(ctx).mp
    z, q = convert(z, mp), convert(q, mp)
    out, zq = mp.one, z
    for _ in range(n):
        out *= 1 - zq
        zq *= q
    return out


def qpoch_inf(z, q, ctx: QContext | None = None):
    """``(z; q)_inf`` for ``0 < q < 1``."""
    ctx = _numeric(ctx)
    mp = ctx.mp
    z, q = convert(z, mp), convert(q, mp)
    if q >= 1:
        raise NonConvergent("(z;q)_inf diverges for q >= 1")
    if q <= 0:
        raise DomainError("qpoch_inf needs 0 < q < 1")
    stop = ctx.tol * (1 - q)
    out, zq = mp.one, z
    for _ in range(ctx.max_terms):
        if abs(zq) < stop:
            return out
        out *= 1 - zq
        zq *= q
    raise NonConvergent("qpoch_inf did not converge within max_terms factors")


def qpoch_table(q, n: int, ctx: QContext | None = None) -> list:
    """``[(q;q)_0, ..., (q;q)_n]``."""
    if ctx is None and is_exact(q):
        one, q = Fraction(1), Fraction(q)
    else:
        mp = _numeric(ctx).mp
        one, q = mp.one, convert(q, mp)
    out = [one]
    qj = q
    for _ in range(n):
        out.append(out[-1] * (1 - qj))
        qj *= q
    return out


def qbinomial(n: int, k: int, q, ctx: QContext | None = None):
    """Gaussian binomial ``[n, k]_q``; valid for any q != root of unity."""
    if k < 0 or n < 0 or k > n:
        raise DomainError(f"qbinomial needs 0 <= k <= n, got n={n}, k={k}")
    if ctx is None and is_exact(q):
        q = Fraction(q)
        out = Fraction(1)
    else:
        mp = _numeric(ctx).mp
        q = convert(q, mp)
        out = mp.one
    k = min(k, n - k)
    for j in range(1, k + 1):
        out = out * (1 - q ** (n - k + j)) / (1 - q**j)
    return out


# ---------------------------------------------------------------------------
# the 1phi1(0; b; q, z) kernel


class Phi11Jet(NamedTuple):
    value: object
    dz: object = None
    dz2: object = None
    db: object = None
    db_dz: object = None


def _peak_bits(b: float, q: float, log2z: float) -> int:
    """log2 of the largest |term| of the 1phi1 series, estimated in floats."""
    lq = math.log2(q)
    lt = peak = 0.0
    for n in range(1_000_000):
        qn1 = 2.0 ** ((n + 1) * lq)
        bqn = b * 2.0 ** (n * lq)
        d = abs((1.0 - qn1) * (1.0 - bqn))
        if d == 0.0:
            break
        lt += n * lq + log2z - math.log2(d)
        peak = max(peak, lt)
        if n * lq + log2z < -1.0 and lt < peak - 8.0:
            break
    return max(0, math.ceil(peak))


def phi11_jet(b, q, z, ctx: QContext | None = None, *, order: int = 0,
              param: bool = False) -> Phi11Jet:
    """Value and requested derivatives of ``1phi1(0; b; q, z)``.

    ``order`` selects z-derivatives up to 2; ``param`` adds the derivative in
    ``b`` and its z-derivative.  The b-derivative is summed term by term using
    ``d/db 1/(b;q)_n = (1/(b;q)_n) sum_{j<n} q^j / (1 - b q^j)``.
    """
    ctx = _numeric(ctx)
    mp = ctx.mp
    b, q, z = convert(b, mp), convert(q, mp), convert(z, mp)
    if not 0 < q < 1:
        raise DomainError("1phi1 kernel needs 0 < q < 1")
    if z == 0:
        log2z = -math.inf
        peak = 0
    else:
        log2z = float(mp.log(abs(z), 2))
        peak = _peak_bits(float(b), float(q), log2z)
    wbits = ctx.precision_bits + peak + GUARD_BITS
    wp = mp_at(wbits)
    b, q, z = wp.mpf(b), wp.mpf(q), wp.mpf(z)
    tol = wp.mpf(ctx.tol)
    pole_eps = wp.ldexp(wp.one, -(wbits - 4))

    want = [True, order >= 1, order >= 2, param, param and order >= 1]
    acc = [wp.zero] * 5
    top = [wp.zero] * 5
    hist = [[], [], [], [], []]

    c = wp.one          # c_n = (-1)^n q^{n(n-1)/2} / ((q;q)_n (b;q)_n)
    qn = wp.one         # q^n
    s = wp.zero         # sum_{j<n} q^j / (1 - b q^j)
    p0, p1, p2 = wp.one, wp.zero, wp.zero  # z^n, n-shifted powers (zero below 0)
    for n in range(ctx.max_terms):
        terms = [
            c * p0,
            n * c * p1 if want[1] else None,
            n * (n - 1) * c * p2 if want[2] else None,
            c * s * p0 if want[3] else None,
            n * c * s * p1 if want[4] else None,
        ]
        done = True
        for i in range(5):
            if not want[i]:
                continue
            t = terms[i]
            acc[i] += t
            mag = abs(acc[i])
            if mag > top[i]:
                top[i] = mag
            h = hist[i]
            h.append(abs(t))
            if len(h) > 3:
                h.pop(0)
            small = h[-1] <= tol * top[i] if top[i] else h[-1] == 0
            falling = len(h) == 3 and h[0] >= h[1] >= h[2]
            if not (small and falling):
                done = False
        if done:
            break
        denom_b = 1 - b * qn
        if abs(denom_b) <= pole_eps:
            raise PoleError(f"(b;q)_n vanishes at n={n + 1} (b = q^-{n})")
        qn1 = qn * q
        s_next = s + qn / denom_b if param else s
        c = -c * qn / ((1 - qn1) * denom_b)
        s = s_next
        qn = qn1
        p2, p1, p0 = p1, p0, p0 * z
    else:
        raise NonConvergent(f"1phi1 series did not converge in {ctx.max_terms} terms")

    out = [mp.mpf(v) if w else None for v, w in zip(acc, want)]
    return Phi11Jet(*out)


def phi11(b, q, z, ctx: QContext | None = None):
    """``1phi1(0; b; q, z) = sum (-1)^n q^{n(n-1)/2} z^n / ((q;q)_n (b;q)_n)``."""
    return phi11_jet(b, q, z, ctx).value


def phi11_dz(b, q, z, ctx: QContext | None = None):
    return phi11_jet(b, q, z, ctx, order=1).dz


def phi11_dz2(b, q, z, ctx: QContext | None = None):
    return phi11_jet(b, q, z, ctx, order=2).dz2


def chi1(q, z, ctx: QContext | None = None):
    """Parameter derivative ``d/dp 1phi1(0; p; q, z)`` at ``p = q``."""
    return phi11_jet(q, q, z, ctx, param=True).db


def chi1_dz(q, z, ctx: QContext | None = None):
    return phi11_jet(q, q, z, ctx, order=1, param=True).db_dz


def hahn_exton_J(nu, z, q, ctx: QContext | None = None):
    """Hahn-Exton q-Bessel function ``J_nu(z; q)`` for real ``z > 0``."""
    ctx = _numeric(ctx)
    mp = ctx.mp
    nu, z, q = convert(nu, mp), convert(z, mp), convert(q, mp)
    if z <= 0:
        raise DomainError("hahn_exton_J is evaluated on the real branch z > 0 only")
    b = q ** (nu + 1)
    pref = z**nu * qpoch_inf(b, q, ctx) / qpoch_inf(q, q, ctx)
    return pref * phi11(b, q, q * z * z, ctx)
