"""Bracketing root engine for real entire functions.

Functions are passed as ``f(x, ctx)`` so that each root can be refined in a
context whose precision depends on the root index.  Brackets are located on
geometric grids and refined by Illinois (modified regula falsi) steps, with a
bisection step whenever a step fails to halve the bracket.  A root is
accepted only after a sign change is verified across an interval of relative
width ``2^-(P-16)`` around it.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

from .errors import BracketError, NonConvergent
from .qcore import QContext, convert, phi11

RealFn = Callable[[object, QContext], object]


class Bracket(NamedTuple):
    lo: object
    hi: object
    flo: object
    fhi: object


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def scan_geometric(f: RealFn, ctx: QContext, start, ratio, stop, count: int) -> list[Bracket]:
    """Sign-change cells of ``f`` on ``start * ratio^s`` for ``|x| <= |stop|``.

    ``start`` may be negative to scan the negative half-line outward.
    Exact zeros on the grid are returned as degenerate brackets.
    """
    mp = ctx.mp
    x = convert(start, mp)
    ratio = convert(ratio, mp)
    stop = abs(convert(stop, mp))
    fx = f(x, ctx)
    out: list[Bracket] = []
    while len(out) < count:
        if fx == 0:
            out.append(Bracket(x, x, fx, fx))
            x = x * ratio
            fx = f(x, ctx)
            continue
        nx = x * ratio
        if abs(nx) > stop:
            break
        fn = f(nx, ctx)
        if fn != 0 and _sign(fn) != _sign(fx):
            lo, hi, flo, fhi = (x, nx, fx, fn) if x < nx else (nx, x, fn, fx)
            out.append(Bracket(lo, hi, flo, fhi))
        x, fx = nx, fn
    return out


def refine(f: RealFn, br: Bracket, ctx: QContext, max_iter: int = 2000):
    """Shrink a sign-change bracket to a certified root at ``ctx`` precision."""
    mp = ctx.mp
    lo, hi = mp.mpf(br.lo), mp.mpf(br.hi)
    if lo == hi:
        return lo
    flo, fhi = f(lo, ctx), f(hi, ctx)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if _sign(flo) == _sign(fhi):
        raise BracketError(f"no sign change on [{mp.nstr(lo, 12)}, {mp.nstr(hi, 12)}]")
    rel = mp.ldexp(1, -(ctx.precision_bits - 16))
    floor = mp.ldexp(1, -ctx.precision_bits)
    side = 0
    prev = None
    checkpoint = hi - lo
    for it in range(max_iter):
        width = hi - lo
        if width <= rel * max(abs(lo), abs(hi), floor):
            return (lo + hi) / 2
        bisect = False
        if it % 4 == 3:
            # four Illinois steps that failed to halve the bracket: bisect once
            bisect = width > checkpoint / 2
            checkpoint = width
        if bisect:
            x = (lo + hi) / 2
        else:
            x = (lo * fhi - hi * flo) / (fhi - flo)
            if not lo < x < hi:
                x = (lo + hi) / 2
        fx = f(x, ctx)
        if fx == 0:
            return x
        # once successive estimates settle, try to certify a tiny bracket
        delta = rel * max(abs(x), floor) / 4
        if prev is not None and abs(x - prev) <= mp.ldexp(delta, 24) and width > 8 * delta:
            a_, b_ = max(x - delta, lo), min(x + delta, hi)
            fa, fb = f(a_, ctx), f(b_, ctx)
            if fa != 0 and fb != 0 and _sign(fa) != _sign(fb):
                return x
            if fa == 0:
                return a_
            if fb == 0:
                return b_
        prev = x
        if _sign(fx) == _sign(flo):
            lo, flo = x, fx
            if side == -1:
                fhi = fhi / 2
            side = -1
        else:
            hi, fhi = x, fx
            if side == 1:
                flo = flo / 2
            side = 1
    raise NonConvergent("root refinement did not reach the requested width")


def phi11_char(w) -> RealFn:
    return lambda x, c: phi11(w, c.qv, x, c)


_ZEROS: dict = {}


def _extend_zeros(roots: list, w, base: QContext, M: int, indexed: bool) -> None:
    mp = base.mp
    f = phi11_char(w)
    ratio = mp.power(base.qv, mp.mpf(-1) / 8)
    if roots:
        start = roots[-1] * (1 + mp.ldexp(1, -40))
    else:
        # below (1-q)(1-w) the series alternates with decreasing terms and stays
        # above 1 - x / ((1-q)(1-w)), so half of that is a safe, root-free start
        start = min((1 - base.qv) * (1 - w) / 2, mp.mpf("0.1"))
    while len(roots) < M:
        m = len(roots)
        limit = start * mp.ldexp(1, 20) / base.qv**3
        found = scan_geometric(f, base, start, ratio, limit, 1)
        if not found:
            raise BracketError(
                f"zero #{m} of 1phi1(0;{mp.nstr(w, 10)};q,.) not found in "
                f"[{mp.nstr(start, 10)}, {mp.nstr(limit, 10)}]"
            )
        cm = base.for_index(m) if indexed else base
        r = refine(f, found[0], cm)
        roots.append(base.mp.mpf(r) if not indexed else r)
        start = found[0].hi


def phi11_zeros(w, ctx: QContext, M: int, indexed: bool = True) -> list:
    """The ``M`` smallest zeros of ``x -> 1phi1(0; w; q, x)`` for ``0 <= w < 1``.

    Zero ``m`` is refined at the index-``m`` precision of the context unless
    ``indexed`` is false.  Results are cached per (w, q, precision).
    """
    w_mp = convert(w, ctx.mp)
    base = QContext(q=ctx.q, a=1, precision_bits=ctx.precision_bits, max_terms=ctx.max_terms)
    key = (w_mp, base.qv, ctx.precision_bits, indexed)
    roots = _ZEROS.setdefault(key, [])
    if len(roots) < M:
        work = list(roots)
        _extend_zeros(work, w_mp, base, M, indexed)
        _ZEROS[key] = roots = work
    return roots[:M]
