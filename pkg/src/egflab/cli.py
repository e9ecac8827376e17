"""Command-line front end: every module behind one `egflab` command.

Output formats: pretty (aligned text), csv, json (each payload carries a
versioned "schema" field).  Numbers print as exact fraction strings unless
--decimal asks for 12-significant-digit floats, a display-only rendering.

Series arguments take either a catalog name (exp, exp-1, z*exp, z, one,
zero) or comma-separated EGF coefficients ("0,1,1/2"), padded with zeros
up to the working order.  Matrices on the command line use "PxQ:" plus the
row-major entries, e.g. "2x2:1,0,0,1".

Exit codes: 0 success, 1 domain error, 2 usage error, 3 resource guard.
The enumeration budget for exhaustive scans can be set via EGFLAB_BUDGET.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from ._backend import backend_name
from .errors import DomainError, EgflabError, ResourceLimitError
from .expformula import (
    ConnectedCounts,
    matrix_from_connected_counts,
    oracle_equivalence,
    oracle_idempotent,
)
from .montecarlo import ExperimentSpec, conjecture_table, run_experiment
from .partitions import canonical_class, enum_diagrams_with_mult, mult_fast, mult_rows, spot_types
from .riordan import RiordanPair, fractional_power, matrix_from_pair, tri_log
from .series import Series, hadamard
from .vecfield import field_rows, vector_field_table

_CATALOG = {
    "exp": Series.exp_z,
    "exp-1": Series.exp_z_minus_one,
    "z*exp": Series.z_exp_z,
    "z": Series.z,
    "one": Series.one,
    "zero": Series.zero,
}


def parse_series(text: str, order: int) -> Series:
    key = text.strip().lower()
    if key in _CATALOG:
        return _CATALOG[key](order)
    try:
        vals = [Fraction(tok.strip()) for tok in text.split(",")]
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"cannot read series {text!r}: {e}") from e
    if len(vals) > order + 1:
        raise DomainError(f"series {text!r} has more than order+1 = {order + 1} terms")
    vals += [Fraction(0)] * (order + 1 - len(vals))
    return Series(vals)


def parse_matrix_arg(text: str):
    try:
        shape, flat = text.split(":", 1)
        p, q = (int(t) for t in shape.lower().split("x"))
        vals = [int(t) for t in flat.split(",")]
    except ValueError as e:
        raise DomainError(f"cannot read matrix {text!r}; want 'PxQ:a,b,...'") from e
    if p < 1 or q < 1 or len(vals) != p * q:
        raise DomainError(f"matrix {text!r}: need exactly {p}x{q} entries")
    return tuple(tuple(vals[i * q : (i + 1) * q]) for i in range(p))


def parse_int_list(text: str) -> list:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError as e:
        raise DomainError(f"cannot read integer list {text!r}") from e


def render(x, decimal: bool) -> str:
    if decimal and isinstance(x, Fraction):
        return format(float(x), ".12g")
    return str(x)


def emit_json(obj):
    print(json.dumps(obj, indent=2))


def emit_table(header, rows, fmt):
    if fmt == "csv":
        w = csv.writer(sys.stdout)
        w.writerow(header)
        w.writerows(rows)
        return
    cells = [[str(c) for c in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(header)]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())


def print_matrix(m, fmt, decimal, kind):
    n = m.size
    if fmt == "json":
        obj = m.to_json_obj()
        if decimal:
            obj["rows"] = [[render(Fraction(v), True) for v in row] for row in obj["rows"]]
        emit_json({"schema": "egflab.matrix/1", "kind": kind, **obj})
        return
    grid = [[render(m.entry(i, j), decimal) for j in range(n)] for i in range(n)]
    if fmt == "csv":
        csv.writer(sys.stdout).writerows(grid)
        return
    widths = [max(len(grid[i][j]) for i in range(n)) for j in range(n)]
    for row in grid:
        print("  ".join(c.rjust(w) for c, w in zip(row, widths)))


def print_series(s: Series, fmt, decimal):
    coeffs = [render(c, decimal) for c in s.coeffs]
    if fmt == "json":
        emit_json({"schema": "egflab.series/1", "order": s.order, "egf_coeffs": coeffs})
    elif fmt == "csv":
        emit_table(["n", "egf"], list(enumerate(coeffs)), "csv")
    else:
        emit_table(["n", "egf"], list(enumerate(coeffs)), "pretty")


def cmd_hadamard(args):
    f = parse_series(args.f, args.order)
    g = parse_series(args.g, args.order)
    print_series(hadamard(f, g), args.format, args.decimal)


def cmd_diagrams(args):
    tally = enum_diagrams_with_mult(args.n)
    rows = list(mult_rows(args.n, tally))
    if args.format == "json":
        emit_json(
            {
                "schema": "egflab.diagrams/1",
                "n": args.n,
                "rows": [
                    {"matrix": shape, "mult": mult, "alpha": a, "beta": b}
                    for _, shape, mult, a, b in rows
                ],
                "classes": len(rows),
                "total_mult": sum(r[2] for r in rows),
            }
        )
        return
    emit_table(["n", "matrix", "mult", "alpha", "beta"], rows, args.format)


def cmd_mult(args):
    d = canonical_class(parse_matrix_arg(args.matrix))
    if args.brute:
        value = enum_diagrams_with_mult(d.weight)[d]
    else:
        value = mult_fast(d)
    alpha, beta = spot_types(d)
    flat = ",".join(str(v) for r in d.canon for v in r)
    shape = f"{d.rows}x{d.cols}:{flat}"
    if args.format == "json":
        emit_json(
            {
                "schema": "egflab.mult/1",
                "matrix": shape,
                "weight": d.weight,
                "mult": value,
                "alpha": str(alpha),
                "beta": str(beta),
            }
        )
        return
    emit_table(
        ["matrix", "weight", "mult", "alpha", "beta"],
        [(shape, d.weight, value, str(alpha), str(beta))],
        args.format,
    )


def _pair_from_args(args, order):
    g = parse_series(args.g, order)
    phi = parse_series(args.phi, order)
    return RiordanPair(g, phi)


def cmd_riordan(args):
    order = args.order if args.order is not None else max(args.size - 1, 1)
    m = matrix_from_pair(_pair_from_args(args, order), args.size)
    print_matrix(m, args.format, args.decimal, "unitriangular")


def cmd_power(args):
    order = max(args.size - 1, 1)
    m = matrix_from_pair(_pair_from_args(args, order), args.size)
    print_matrix(fractional_power(m, Fraction(args.t)), args.format, args.decimal, "unitriangular")


def cmd_log(args):
    order = max(args.size - 1, 1)
    m = matrix_from_pair(_pair_from_args(args, order), args.size)
    print_matrix(tri_log(m), args.format, args.decimal, "strictly-lower")


def cmd_field(args):
    phi = parse_series(args.phi, max(args.size - 1, 1))
    q = vector_field_table(phi, args.size)
    rows = list(field_rows(q))
    if args.format == "json":
        emit_json(
            {
                "schema": "egflab.field/1",
                "size": args.size,
                "rows": [{"n": i, "egf": a, "taylor": t} for i, a, t in rows],
            }
        )
        return
    emit_table(["n", "egf", "taylor"], rows, args.format)


def cmd_expformula(args):
    c = ConnectedCounts.of(parse_int_list(args.counts))
    m = matrix_from_connected_counts(c, args.size)
    if args.oracle == "none":
        print_matrix(m, args.format, args.decimal, "unitriangular")
        return
    scan = oracle_equivalence if args.oracle == "equivalence" else oracle_idempotent
    rows = []
    for n in range(1, args.size):
        table = scan(n)
        for k in range(1, n + 1):
            rows.append((n, k, render(m.entry(n, k), args.decimal), table.get(k, 0)))
    if args.format == "json":
        emit_json(
            {
                "schema": "egflab.expformula/1",
                "oracle": args.oracle,
                "rows": [
                    {"n": n, "k": k, "matrix": mv, "oracle": ov} for n, k, mv, ov in rows
                ],
            }
        )
        return
    emit_table(["n", "k", "matrix", "oracle"], rows, args.format)


def cmd_montecarlo(args):
    if args.action == "table":
        if args.ns is None or args.rs is None:
            raise DomainError("table needs --ns and --rs")
        rows = conjecture_table(parse_int_list(args.ns), parse_int_list(args.rs), budget=args.budget)
        rendered = [
            (n, r, render(p, args.decimal), render(b, args.decimal), render(ratio, args.decimal))
            for n, r, p, b, ratio in rows
        ]
        if args.format == "json":
            emit_json(
                {
                    "schema": "egflab.conjecture/1",
                    "rows": [
                        {"n": n, "r": r, "p_exact": p, "bound": b, "ratio": ratio}
                        for n, r, p, b, ratio in rendered
                    ],
                }
            )
        else:
            emit_table(["n", "r", "p_exact", "bound", "ratio"], rendered, args.format)
        return
    spec = ExperimentSpec(
        n=args.n,
        r=args.r,
        drawings=args.drawings,
        seed=args.seed,
        mode=args.mode,
        eps=Fraction(args.eps),
        zero_based=args.zero_based,
    )
    res = run_experiment(spec, workers=args.workers)
    if args.format == "json":
        obj = res.to_json_obj()
        if args.decimal:
            obj["estimate"] = render(res.estimate, True)
            obj["wilson95"] = [render(res.wilson_low, True), render(res.wilson_high, True)]
            obj["bound"] = render(res.bound_value, True)
        emit_json(obj)
        return
    row = (
        spec.n,
        spec.r,
        spec.drawings,
        spec.seed,
        spec.mode,
        res.hits,
        render(res.estimate, args.decimal),
        render(res.wilson_low, args.decimal),
        render(res.wilson_high, args.decimal),
        render(res.bound_value, args.decimal),
    )
    emit_table(
        ["n", "r", "drawings", "seed", "mode", "hits", "estimate", "wilson_low", "wilson_high", "bound"],
        [row],
        args.format,
    )


def cmd_backend(args):
    print(backend_name())


def _add_common(sp, default_format="pretty"):
    sp.add_argument("--format", choices=("json", "csv", "pretty"), default=default_format)
    sp.add_argument("--decimal", action="store_true", help="render numbers as floats (display only)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="egflab",
        description="Exact workbench for substitution matrices, diagram expansions, and random unipotent matrices.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("hadamard", help="componentwise product of two EGF coefficient sequences")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--order", type=int, required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_hadamard)

    sp = sub.add_parser("diagrams", help="diagram classes of partition pairs with multiplicities")
    sp.add_argument("--n", type=int, required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_diagrams)

    sp = sub.add_parser("mult", help="multiplicity and spot types of one packed-matrix class")
    sp.add_argument("--matrix", required=True, help="'PxQ:a,b,...' row-major")
    sp.add_argument("--brute", action="store_true", help="count by full enumeration instead of the stabilizer formula")
    _add_common(sp)
    sp.set_defaults(func=cmd_mult)

    sp = sub.add_parser("riordan", help="matrix of a substitution with prefunction")
    sp.add_argument("--g", required=True)
    sp.add_argument("--phi", required=True)
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--order", type=int)
    _add_common(sp)
    sp.set_defaults(func=cmd_riordan)

    sp = sub.add_parser("power", help="rational power M^t of a pair matrix")
    sp.add_argument("--g", required=True)
    sp.add_argument("--phi", required=True)
    sp.add_argument("--t", required=True)
    sp.add_argument("--size", type=int, required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_power)

    sp = sub.add_parser("log", help="matrix logarithm of a pair matrix")
    sp.add_argument("--g", required=True)
    sp.add_argument("--phi", required=True)
    sp.add_argument("--size", type=int, required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_log)

    sp = sub.add_parser("field", help="vector field generating a pure substitution matrix")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--size", type=int, required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_field)

    sp = sub.add_parser("expformula", help="component-count matrix of a class of connected structures")
    sp.add_argument("--counts", required=True, help="c_1,c_2,... connected counts")
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--oracle", choices=("none", "equivalence", "idempotent"), default="none")
    _add_common(sp)
    sp.set_defaults(func=cmd_expformula)

    sp = sub.add_parser("montecarlo", help="random unipotent matrices against the substitution tests")
    sp.add_argument("action", nargs="?", choices=("run", "table"), default="run")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--r", type=int, default=10)
    sp.add_argument("--drawings", type=int, default=275)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--mode", choices=("exact", "tolerance"), default="exact")
    sp.add_argument("--eps", default="0")
    sp.add_argument("--zero-based", action="store_true")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--ns", help="table: sizes, e.g. 3,4")
    sp.add_argument("--rs", help="table: ranges, e.g. 2,10,50")
    sp.add_argument("--budget", type=int)
    _add_common(sp, default_format="json")
    sp.set_defaults(func=cmd_montecarlo)

    sp = sub.add_parser("backend", help="print which kernel core is active")
    sp.set_defaults(func=cmd_backend, format="pretty", decimal=False)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ResourceLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except EgflabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
