"""Command-line interface: batch tables in CSV or JSON.

Every output starts with the schema line ``# qlommel v<version> schema=1``
(CSV) or carries it in the ``schema`` field (JSON).  Exit codes: 0 success,
2 invalid input, 3 numerical failure, 4 verification failure.

The default working precision is read from ``QLOMMEL_PRECISION`` and
overridden by ``--precision``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

from mpmath.libmp import to_str

from . import __version__
from .asymptotics import daalhuis_check, identity_checks, zeta_table
from .errors import (BracketError, BranchMismatch, DomainError, NonConvergent,
                     NonPositiveWeight, NotARoot, PoleError, QLommelError)
from .measures import DensitySpec, ac_density, n_extremal
from .moments import ROUTES, MomentContext, moments
from .nevanlinna import phi_psi_identity, quad
from .polyrec import genfun_check, poly_values
from .qcore import DEFAULT_PRECISION, QContext, is_inf, mp_at, parse_number

SCHEMA = f"# qlommel v{__version__} schema=1"
PRECISION_ENV = "QLOMMEL_PRECISION"

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# formatting


def format_value(v, bits: int) -> str:
    """Text that parses back to the same value at ``bits`` precision."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if is_inf(v):
        return "inf"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return v
    if hasattr(v, "_mpf_"):
        digits = int(math.ceil(bits * math.log10(2))) + 2
        return to_str(v._mpf_, digits)
    return str(v)


def emit(rows: list[dict], columns: list[str], fmt: str, out, bits: int, meta: dict | None = None):
    meta = meta or {}
    if fmt == "json":
        doc = {
            "schema": SCHEMA[2:],
            "meta": {k: format_value(v, bits) for k, v in meta.items()},
            "rows": [{c: format_value(r.get(c), bits) for c in columns} for r in rows],
        }
        out.write(json.dumps(doc, indent=1) + "\n")
        return
    out.write(SCHEMA + "\n")
    for k, v in meta.items():
        out.write(f"# {k}={format_value(v, bits)}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_value(r.get(c), bits) for c in columns])


def write_plot(path: str, rows: list[dict], columns: list[str], bits: int):
    """Whitespace-separated numeric columns for plotting tools."""
    with open(path, "w") as fh:
        fh.write("# " + " ".join(columns) + "\n")
        for r in rows:
            fh.write(" ".join(format_value(r.get(c), min(bits, 64)) for c in columns) + "\n")


# ---------------------------------------------------------------------------
# argument parsing


def _number(text: str):
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _number_list(text: str) -> list:
    return [_number(t) for t in text.split(",") if t.strip()]


def _grid(text: str) -> list:
    """``lo:hi:n`` (n equally spaced points) or a comma-separated list."""
    if ":" not in text:
        return _number_list(text)
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:n, got {text!r}")
    lo, hi = _number(parts[0]), _number(parts[1])
    n = int(parts[2])
    if n < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points")
    return [("grid", lo, hi, n, i) for i in range(n)]


def _default_precision() -> int:
    env = os.environ.get(PRECISION_ENV)
    if env is None:
        return DEFAULT_PRECISION
    try:
        return int(env)
    except ValueError:
        raise InputError(f"{PRECISION_ENV} must be an integer, got {env!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=_number, default=Fraction(1, 2), help="base q in (0,1); 'n/d' is exact")
    common.add_argument("--a", type=_number, default=Fraction(7, 10), help="parameter a > 0; 'n/d' is exact")
    common.add_argument("--precision", type=int, default=None,
                        help=f"working precision in bits (default ${PRECISION_ENV} or {DEFAULT_PRECISION})")
    common.add_argument("--tol", type=_number, default=None, help="relative series truncation tolerance")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", default="-", help="output file ('-' for stdout)")
    common.add_argument("--plot", default=None, help="also write plot-ready columns to this file")

    p = argparse.ArgumentParser(prog="qlommel", description="q-Lommel polynomials and their moment problem")
    p.add_argument("--version", action="version", version=f"qlommel {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("poly", parents=[common], help="F, G, P, Q values")
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--x", type=_number_list, required=True, help="comma-separated points")

    s = sub.add_parser("measure", parents=[common], help="N-extremal measure mu_t")
    s.add_argument("--t", type=_number, required=True, help="real t or 'inf'")
    s.add_argument("--M", type=int, required=True, help="number of mass points")

    s = sub.add_parser("moments", parents=[common], help="moment table by several routes")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--routes", default="all", help=f"'all' or a comma list of {', '.join(ROUTES)}")

    s = sub.add_parser("verify", parents=[common], help="identity suites")
    s.add_argument("--suite", default="all", choices=("all",) + tuple(SUITES))
    s.add_argument("--genfun-N", type=int, default=150, help="partial-sum length for the genfun suite")

    s = sub.add_parser("roots", parents=[common], help="zeros of 1phi1(0; w; q, .) with predictions")
    s.add_argument("--w", type=_number, required=True)
    s.add_argument("--M", type=int, required=True)

    s = sub.add_parser("nevanlinna", parents=[common], help="A, B, C, D values")
    s.add_argument("--z", type=_number_list, required=True)

    s = sub.add_parser("density", parents=[common], help="absolutely continuous density")
    s.add_argument("--beta", type=_number, required=True)
    s.add_argument("--gamma", type=_number, required=True)
    s.add_argument("--x-grid", type=_grid, required=True, help="lo:hi:n or a comma list")
    return p


def _context(args, a=None) -> QContext:
    bits = args.precision if args.precision is not None else _default_precision()
    try:
        return QContext(q=args.q, a=args.a if a is None else a, precision_bits=bits, series_tol=args.tol)
    except DomainError as exc:
        raise InputError(str(exc))


def _expand_grid(points: list, mp) -> list:
    out = []
    for p in points:
        if isinstance(p, tuple) and p[0] == "grid":
            _, lo, hi, n, i = p
            lo_v, hi_v = _mpf(lo, mp), _mpf(hi, mp)
            out.append(lo_v + (hi_v - lo_v) * i / (n - 1))
        else:
            out.append(p)
    return out


def _mpf(x, mp):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


# ---------------------------------------------------------------------------
# commands


def cmd_poly(args):
    ctx = _context(args)
    if args.n_max < 0:
        raise InputError("--n-max must be >= 0")
    rows = []
    for x in args.x:
        for v in poly_values(ctx, args.n_max, x):
            rows.append(dict(n=v.n, x=x, F=v.F, G=v.G, P=v.P, Q=v.Q))
    return rows, ["n", "x", "F", "G", "P", "Q"], {}, ["n", "F"]


def cmd_measure(args):
    ctx = _context(args)
    if args.M < 1:
        raise InputError("--M must be >= 1")
    ctx.require_indeterminate()
    mu = n_extremal(ctx, args.t, args.M)
    rows = [dict(m=m, point=x, weight=w) for m, (x, w) in enumerate(zip(mu.points, mu.weights))]
    meta = dict(t=args.t, M=mu.M, mass=mu.mass(), tail_bound=mu.tail_bound)
    return rows, ["m", "point", "weight"], meta, ["point", "weight"]


def cmd_moments(args):
    ctx = _context(args)
    routes = ROUTES if args.routes == "all" else tuple(r.strip() for r in args.routes.split(","))
    for r in routes:
        if r not in ROUTES:
            raise InputError(f"unknown route {r!r}; choose from {', '.join(ROUTES)}")
    if args.N < 0:
        raise InputError("--N must be >= 0")
    mc = MomentContext.of(ctx)
    tables = [moments(mc, args.N, r) for r in routes]
    ref = tables[0]
    rows = []
    for n in range(args.N + 1):
        row = {"n": n}
        for t in tables:
            row[f"m_{t.route}"] = t.values[n]
            row[f"delta_{t.route}"] = t.values[n] - ref.values[n]
        rows.append(row)
    cols = ["n"] + [f"m_{r}" for r in routes] + [f"delta_{r}" for r in routes]
    meta = dict(reference=ref.route, exact=mc.exact)
    return rows, cols, meta, ["n", f"m_{ref.route}"]


def cmd_roots(args):
    ctx = _context(args, a=1)
    if args.M < 1:
        raise InputError("--M must be >= 1")
    w = _mpf(args.w, ctx.mp)
    if not 0 <= w < 1:
        raise InputError("--w must lie in [0, 1)")
    rows = [r._asdict() for r in zeta_table(args.w, ctx, range(args.M))]
    cols = ["m", "zeta", "predicted", "correction_ratio", "derivative", "derivative_predicted",
            "derivative_ratio"]
    return rows, cols, dict(w=args.w), ["m", "zeta"]


def cmd_nevanlinna(args):
    ctx = _context(args)
    ctx.require_indeterminate()
    rows = []
    for z in args.z:
        Q = quad(ctx, z)
        rows.append(dict(z=z, A=Q.A, B=Q.B, C=Q.C, D=Q.D, det=Q.det))
    return rows, ["z", "A", "B", "C", "D", "det"], {}, ["z", "A", "B", "C", "D"]


def cmd_density(args):
    ctx = _context(args)
    ctx.require_indeterminate()
    try:
        spec = DensitySpec(args.beta, args.gamma)
    except DomainError as exc:
        raise InputError(str(exc))
    rows = []
    for x in _expand_grid(args.x_grid, ctx.mp):
        rows.append(dict(x=x, density=ac_density(ctx, spec, x)))
    return rows, ["x", "density"], dict(beta=args.beta, gamma=args.gamma), ["x", "density"]


# ---------------------------------------------------------------------------
# verification suites


def _a_grid(q):
    """Five values of a spanning (q, 1/q), including a=1."""
    mp = mp_at(64)
    qv = _mpf(q, mp)
    out = []
    for theta in ("0.75", "0.4", "0", "-0.4", "-0.75"):
        out.append(1 if theta == "0" else mp.nstr(mp.power(qv, mp.mpf(theta)), 18))
    return out


_GRID_Q = ("0.3", "0.5", "0.8")
_GRID_Z = (-5, -1, 0, 1, 5, 20, 50)


def suite_determinant(ctx: QContext, args):
    for q in _GRID_Q:
        for a in _a_grid(q):
            c = QContext(q=q, a=a, precision_bits=ctx.precision_bits)
            for z in _GRID_Z:
                yield f"q={q},a={a},z={z}", abs(quad(c, z).det - 1), c.mp.mpf("1e-30")


def suite_phipsi(ctx: QContext, args):
    for q in _GRID_Q:
        for a in _a_grid(q):
            c = QContext(q=q, a=a, precision_bits=ctx.precision_bits)
            for z in _GRID_Z:
                lhs, rhs = phi_psi_identity(c, z)
                yield f"q={q},a={a},z={z}", abs(lhs - rhs) / abs(rhs), c.mp.mpf("1e-30")


def suite_daalhuis(ctx: QContext, args):
    for q in ("0.5", "0.3"):
        c = QContext(q=q, a=1, precision_bits=ctx.precision_bits)
        mp = c.mp
        tol = mp.ldexp(1, -(c.precision_bits - 24))
        for e in ("-0.4", "0.6", "1.7", "3", "4.5", "7.3", "9.1"):
            z = mp.power(c.qv, -mp.mpf(e))
            yield f"q={q},z=q^-{e}", daalhuis_check(q, z, c), tol


def suite_theta(ctx: QContext, args):
    c = QContext(q="0.5", a=1, precision_bits=ctx.precision_bits)
    tol = c.mp.ldexp(1, -(c.precision_bits - 24))
    for r in identity_checks(c):
        yield f"{r.name}{r.params}", r.error, tol


def suite_genfun(ctx: QContext, args):
    c = QContext(q="0.5", a="0.7", precision_bits=ctx.precision_bits)
    for x in (0, "1.5"):
        for t in ("0.1", "0.2", "0.3"):
            lhs, rhs = genfun_check(c, x, t, args.genfun_N)
            yield f"x={x},t={t},N={args.genfun_N}", abs(lhs - rhs), c.mp.mpf("1e-30")


def suite_moments(ctx: QContext, args):
    exact = MomentContext("1/2", "3/4")
    tables = [moments(exact, 30, r) for r in ROUTES]
    mp = ctx.mp
    for t in tables[1:]:
        bad = sum(1 for u, v in zip(t.values, tables[0].values) if u != v)
        yield f"exact:{t.route}", mp.mpf(bad), mp.zero
    real = MomentContext(ctx.q if not ctx.exact else "0.5", ctx.a if not ctx.exact else "0.7",
                         ctx.precision_bits)
    tables = [moments(real, 30, r) for r in ROUTES]
    for t in tables[1:]:
        err = max(abs(u / v - 1) for u, v in zip(t.values, tables[0].values))
        yield f"real:{t.route}", err, mp.mpf("1e-35")


SUITES = {
    "determinant": suite_determinant,
    "phipsi": suite_phipsi,
    "daalhuis": suite_daalhuis,
    "theta": suite_theta,
    "genfun": suite_genfun,
    "moments": suite_moments,
}


def cmd_verify(args):
    ctx = _context(args)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    rows = []
    for name in names:
        for case, err, tol in SUITES[name](ctx, args):
            rows.append(dict(suite=name, case=case, error=err, tol=tol, passed=bool(err <= tol)))
    return rows, ["suite", "case", "error", "tol", "passed"], {}, None


COMMANDS = {
    "poly": cmd_poly,
    "measure": cmd_measure,
    "moments": cmd_moments,
    "verify": cmd_verify,
    "roots": cmd_roots,
    "nevanlinna": cmd_nevanlinna,
    "density": cmd_density,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        rows, cols, meta, plot_cols = COMMANDS[args.command](args)
    except (InputError, DomainError) as exc:
        print(f"qlommel: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BracketError, NonConvergent, PoleError, NotARoot, NonPositiveWeight, BranchMismatch) as exc:
        print(f"qlommel: numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except QLommelError as exc:
        print(f"qlommel: failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    bits = args.precision if args.precision is not None else _default_precision()
    buf = io.StringIO()
    emit(rows, cols, args.format, buf, bits, meta)
    if args.output == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.output, "w") as fh:
            fh.write(buf.getvalue())
    if args.plot and plot_cols:
        write_plot(args.plot, rows, plot_cols, bits)
    if args.command == "verify":
        failed = [r for r in rows if not r["passed"]]
        for r in failed:
            print(f"qlommel: FAIL {r['suite']} {r['case']}", file=sys.stderr)
        return EXIT_VERIFY if failed else EXIT_OK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
