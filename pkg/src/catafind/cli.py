"""Command-line front end.

Subcommands: `find` (multistart catastrophe search), `check` (pointwise
determinant/subrank verdicts), `scan` (parameter-plane steady-state census
as CSV), `count-minors` (exact minor-counting recurrence), and `boardman`
(singularity symbol of a field with parameters fixed).

Reports are JSON with a `"schema": 1` field; grids are CSV.  All floats are
printed with 17 significant digits and results are sorted before emission,
so identical commands on identical inputs produce byte-identical output.
Exit codes: 0 success (including empty result sets), 2 usage or parse
error, 3 numerical failure.  The env var CATAFIND_THREADS caps workers.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import expr as ex
from . import determinants as det
from . import solver
from . import boardman as bo
from .scenarios import (DomainError, PrimaryFormSpec, make_primary_form,
                        make_reaction_diffusion)


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# deterministic serialization

def _fmt_float(v: float) -> str:
    if not np.isfinite(v):
        return "null"
    s = "%.17g" % v
    # keep JSON-valid: bare integers stay parseable as numbers anyway
    return s


def _to_json(value, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _fmt_float(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_to_json(v, indent + 1)}"
                 for k, v in value.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{inner}{_to_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _document(argv, input_text, **payload) -> dict:
    doc = {
        "schema": 1,
        "tool": f"catafind {__version__}",
        "input_sha256": (hashlib.sha256(input_text.encode("utf-8")).hexdigest()
                         if input_text is not None else None),
        "command": list(argv),
    }
    doc.update(payload)
    return doc


# ---------------------------------------------------------------------------
# flag parsing helpers

def _parse_pairs(text: str) -> dict:
    """\"a=1,b=-2.5\" -> {\"a\": 1.0, \"b\": -2.5}"""
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or not name:
            raise UsageError(f"expected name=value, got {item!r}")
        if name in out:
            raise UsageError(f"duplicate assignment for {name!r}")
        try:
            out[name] = float(value)
        except ValueError:
            raise UsageError(f"bad numeric value in {item!r}") from None
    return out


def _parse_intervals(text: str) -> list:
    """\"-1:1,0:2\" -> [(-1.0, 1.0), (0.0, 2.0)]"""
    out = []
    for item in text.split(","):
        lo, sep, hi = item.partition(":")
        if not sep:
            raise UsageError(f"expected lo:hi, got {item!r}")
        try:
            out.append((float(lo), float(hi)))
        except ValueError:
            raise UsageError(f"bad interval {item!r}") from None
    return out


def _make_builtin(spec: str):
    name, _, rest = spec.partition(":")
    if name == "rd":
        if rest:
            raise UsageError("builtin rd takes no options")
        return make_reaction_diffusion()
    if name == "primary":
        opts = {}
        for item in (rest.split(",") if rest else []):
            k, sep, v = item.partition("=")
            if not sep:
                raise UsageError(f"expected key=value in builtin spec, got {item!r}")
            opts[k.strip()] = v
        try:
            n = int(opts.pop("n", "2"))
            r = int(opts.pop("r", "2"))
            lam = tuple(float(t) for t in opts.pop("lam").split(":")) if "lam" in opts else ()
            tau = tuple(float(t) for t in opts.pop("tau").split(":")) if "tau" in opts else ()
        except ValueError:
            raise UsageError(f"bad numeric value in builtin spec {spec!r}") from None
        if opts:
            raise UsageError(f"unknown primary options: {', '.join(sorted(opts))}")
        return make_primary_form(PrimaryFormSpec(n, r, lam, tau))
    raise UsageError(f"unknown builtin {name!r} (expected rd or primary:...)")


def _load_field(args):
    """Returns (field, canonical input text)."""
    if args.builtin and args.field:
        raise UsageError("give either a field file or --builtin, not both")
    if args.builtin:
        field = _make_builtin(args.builtin)
        return field, ex.format_vector_field(field)
    if args.field:
        try:
            with open(args.field, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read {args.field}: {e}") from None
        name = os.path.splitext(os.path.basename(args.field))[0]
        return ex.parse_vector_field(text, name=name), text
    raise UsageError("a field file or --builtin is required")


def _parse_unfold(field: ex.VectorField, text: str | None):
    if not text:
        return None
    order = []
    for name in text.split(","):
        name = name.strip()
        if name not in field.param_names:
            raise UsageError(f"--unfold: {name!r} is not a declared parameter")
        order.append(field.param_names.index(name))
    return tuple(order)


def _parse_point(field: ex.VectorField, text: str | None) -> ex.Point:
    vals = _parse_pairs(text or "")
    known = set(field.var_names) | set(field.param_names)
    for name in vals:
        if name not in known:
            raise UsageError(f"--at: unknown identifier {name!r}")
    return ex.Point(tuple(vals.get(nm, 0.0) for nm in field.var_names),
                    tuple(vals.get(nm, 0.0) for nm in field.param_names))


def _worker_count() -> int:
    env = os.environ.get("CATAFIND_THREADS", "").strip()
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise UsageError(f"CATAFIND_THREADS must be an integer, got {env!r}")
        if cap < 1:
            raise UsageError("CATAFIND_THREADS must be >= 1")
        return cap
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# report serialization

def _report_json(field: ex.VectorField, rep: solver.CatastropheReport) -> dict:
    return {
        "x": list(rep.point.x),
        "alpha": list(rep.point.alpha),
        "var_names": list(field.var_names),
        "param_names": list(field.param_names),
        "codim": rep.codim,
        "label": rep.label,
        "residual": rep.residual,
        "b_values": list(rep.b_values),
        "g_values": [
            {"index": list(K), "value": rep.g_values[K],
             "scale": rep.g_scales[K]}
            for K in rep.g_values
        ],
        "full": rep.full,
        "subrank": rep.subrank,
        "subrank_ok": rep.subrank_ok,
    }


# ---------------------------------------------------------------------------
# subcommands

def cmd_find(args) -> int:
    field, text = _load_field(args)
    unfold = _parse_unfold(field, args.unfold)
    fixed = _parse_pairs(args.fix or "")
    for name in fixed:
        if name not in field.param_names:
            raise UsageError(f"--fix: {name!r} is not a declared parameter")
    opts = solver.SolveOptions(seed_count=args.seeds, tol_b=args.tol_b,
                               tol_g=args.tol_g,
                               dedup_radius=args.dedup_radius)
    n_unknowns = field.n + args.codim
    box = (_parse_intervals(args.box) if args.box
           else [(-1.5, 1.5)] * n_unknowns)
    if len(box) != n_unknowns:
        raise UsageError(
            f"--box needs {n_unknowns} intervals (states then unfolding "
            f"parameters), got {len(box)}")
    reports = solver.find_catastrophes(field, args.codim, box, opts,
                                       fixed=fixed, param_order=unfold)
    doc = _document(args._argv, text,
                    reports=[_report_json(field, rep) for rep in reports])
    _emit(_to_json(doc) + "\n", args.out)
    if not reports:
        print("warning: no catastrophe points converged in the given box",
              file=sys.stderr)
    return 0


def _check_verdict(canonical_zero, full, subrank_ok, b1_zero, r, n) -> str:
    if canonical_zero:
        label = solver.classify(r)
        if not subrank_ok:
            return (f"degenerate: subrank below {n - 1}, "
                    "not a valid underlying catastrophe")
        if full:
            return f"underlying catastrophe: {label} (full)"
        return f"underlying catastrophe: {label} (not full)"
    if not b1_zero:
        return "no singularity"
    return f"no codimension-{r} catastrophe"


def cmd_check(args) -> int:
    field, text = _load_field(args)
    p = _parse_point(field, args.at)
    r = args.codim
    unfold = _parse_unfold(field, args.unfold)
    D = det.DeterminantSet(field, param_order=unfold)
    memo: dict = {}
    f_values = [ex.evaluate(c, p, memo) for c in field.components]
    b_entries = []
    zero_by_key = {}
    for i in range(1, r + 1):
        for K in det.index_strings(field.n, i - 1):
            value, scale = D.b_at(i, K, p, memo)
            zero = det.is_zero(value, scale, args.tol_b)
            zero_by_key[(i, K)] = zero
            b_entries.append({"level": i, "index": list(K),
                              "value": value, "scale": scale, "zero": zero})
    g_entries = []
    nonzero_flags = []
    for K in det.index_strings(field.n, r - 1):
        value, scale = D.g_at(r, K, p, memo)
        nz = det.is_nonzero(value, scale, args.tol_g)
        nonzero_flags.append(nz)
        g_entries.append({"index": list(K), "value": value,
                          "scale": scale, "nonzero": nz})
    sr = det.subrank(field, p, args.tol_b)
    full = all(nonzero_flags)
    canonical_zero = all(zero_by_key[(i, (1,) * (i - 1))] for i in range(1, r + 1))
    verdict = _check_verdict(canonical_zero, full, sr == field.n - 1,
                             zero_by_key[(1, ())], r, field.n)
    report = {
        "x": list(p.x),
        "alpha": list(p.alpha),
        "codim": r,
        "f_values": f_values,
        "b_values": b_entries,
        "g_values": g_entries,
        "full": full,
        "subrank": sr,
        "subrank_ok": sr == field.n - 1,
        "verdict": verdict,
    }
    doc = _document(args._argv, text, reports=[report])
    _emit(_to_json(doc) + "\n", args.out)
    return 0


def cmd_scan(args) -> int:
    field, text = _load_field(args)
    axes = [a.strip() for a in args.axes.split(",")]
    if len(axes) != 2:
        raise UsageError("--axes needs exactly two parameter names")
    for a in axes:
        if a not in field.param_names:
            raise UsageError(f"--axes: {a!r} is not a declared parameter")
    ranges = _parse_intervals(args.range)
    if len(ranges) != 2:
        raise UsageError("--range needs two intervals lo:hi,lo:hi")
    try:
        cells = tuple(int(t) for t in args.cells.split(","))
    except ValueError:
        raise UsageError(f"bad --cells {args.cells!r}") from None
    if len(cells) != 2 or min(cells) < 1:
        raise UsageError("--cells needs two positive integers")
    fixed = _parse_pairs(args.fix or "")
    for name in fixed:
        if name not in field.param_names:
            raise UsageError(f"--fix: {name!r} is not a declared parameter")
    box = (_parse_intervals(args.box_x) if args.box_x
           else [(-3.0, 3.0)] * field.n)
    if len(box) != field.n:
        raise UsageError(f"--box-x needs {field.n} intervals")
    opts = solver.SolveOptions(seed_count=args.seeds, tol_b=args.tol_b,
                               tol_g=args.tol_g,
                               dedup_radius=args.dedup_radius)
    idx = [field.param_names.index(a) for a in axes]
    base_alpha = solver._resolve_fixed(field, fixed)

    def cell_value(axis: int, k: int) -> float:
        lo, hi = ranges[axis]
        return lo + (k + 0.5) * (hi - lo) / cells[axis]

    def work(cell):
        i, j = cell
        v1, v2 = cell_value(0, i), cell_value(1, j)
        alpha = list(base_alpha)
        alpha[idx[0]] = v1
        alpha[idx[1]] = v2
        census = solver.count_steady_states(field, alpha, box, opts)
        n_attracting = sum(1 for _p, label in census.states
                           if label == "attracting")
        return v1, v2, census.count, n_attracting

    grid = [(i, j) for i in range(cells[0]) for j in range(cells[1])]
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        rows = list(pool.map(work, grid))
    lines = [f"{axes[0]},{axes[1]},n_states,n_attracting"]
    for v1, v2, n_states, n_attracting in rows:
        lines.append(f"{_fmt_float(v1)},{_fmt_float(v2)},"
                     f"{n_states},{n_attracting}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_count_minors(args) -> int:
    if args.corank_seq:
        try:
            seq = tuple(int(t) for t in args.corank_seq.split(","))
        except ValueError:
            raise UsageError(f"bad --corank-seq {args.corank_seq!r}") from None
    elif args.codim is not None:
        seq = (1,) * args.codim
    else:
        raise UsageError("need --codim or --corank-seq")
    try:
        mc = bo.minor_count(args.dim, seq)
    except ValueError as e:
        raise UsageError(str(e)) from None
    doc = _document(args._argv, None, counts={
        "dim": mc.n,
        "corank_seq": list(mc.corank_seq),
        "stage_counts": list(mc.stage_counts),
        "cumulative": list(mc.cumulative),
        "appendix_total": mc.appendix_total,
        "table_total": mc.table_total,
        "bg_condition_count": bo.bg_condition_count(args.dim, len(seq)),
    })
    _emit(_to_json(doc) + "\n", args.out)
    return 0


def cmd_boardman(args) -> int:
    field, text = _load_field(args)
    fixed = _parse_pairs(args.fix or "")
    for name in fixed:
        if name not in field.param_names:
            raise UsageError(f"--fix: {name!r} is not a declared parameter")
    alpha = solver._resolve_fixed(field, fixed)
    frozen = ex.fix_parameters(field, alpha)
    at = _parse_pairs(args.at or "")
    for name in at:
        if name not in field.var_names:
            raise UsageError(f"--at: {name!r} is not a state variable")
    p = ex.Point(tuple(at.get(nm, 0.0) for nm in field.var_names), ())
    symbol = bo.boardman_symbol(frozen, p, max_depth=args.max_depth,
                                cap=args.cap, tol=args.tol_b)
    mc = bo.minor_count(field.n, symbol) if symbol else None
    doc = _document(args._argv, text, boardman={
        "x": list(p.x),
        "alpha": list(alpha),
        "symbol": list(symbol),
        "stage_minor_counts": list(mc.stage_counts) if mc else [],
        "stage_sizes": list(mc.cumulative) if mc else [field.n],
    })
    _emit(_to_json(doc) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# argument plumbing

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catafind",
        description="Locate and classify degenerate zeros of parameterized "
                    "vector fields via nested determinant conditions.")
    parser.add_argument("--version", action="version",
                        version=f"catafind {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    field_p = argparse.ArgumentParser(add_help=False)
    field_p.add_argument("field", nargs="?",
                         help="vector-field definition file")
    field_p.add_argument("--builtin",
                         help="built-in field: rd | "
                              "primary:n=N,r=R[,lam=v:..,tau=v:..]")

    tol_p = argparse.ArgumentParser(add_help=False)
    tol_p.add_argument("--tol-b", type=float, default=det.DEFAULT_TOL_B,
                       help="scaled zero threshold for level determinants")
    tol_p.add_argument("--tol-g", type=float, default=det.DEFAULT_TOL_G,
                       help="scaled nonzero threshold for extended determinants")
    tol_p.add_argument("--dedup-radius", type=float, default=1e-6,
                       help="max-norm radius for merging converged roots")

    out_p = argparse.ArgumentParser(add_help=False)
    out_p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("find", parents=[field_p, tol_p, out_p],
                       help="multistart search for codimension-r points")
    p.add_argument("--codim", type=int, required=True)
    p.add_argument("--box",
                   help="seed box lo:hi,... over states then unfolding "
                        "parameters (default -1.5:1.5 each)")
    p.add_argument("--seeds", type=int, default=256)
    p.add_argument("--fix", help="fixed parameter values name=value,...")
    p.add_argument("--unfold",
                   help="comma-separated unfolding parameter names, in order")
    p.set_defaults(func=cmd_find)

    p = sub.add_parser("check", parents=[field_p, tol_p, out_p],
                       help="evaluate all determinant conditions at a point")
    p.add_argument("--at", required=True,
                   help="point name=value,... (unlisted coordinates are 0)")
    p.add_argument("--codim", type=int, required=True)
    p.add_argument("--unfold",
                   help="comma-separated unfolding parameter names, in order")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("scan", parents=[field_p, tol_p, out_p],
                       help="steady-state census over a parameter-plane grid")
    p.add_argument("--axes", required=True,
                   help="two parameter names, comma-separated")
    p.add_argument("--range", required=True, help="lo:hi,lo:hi per axis")
    p.add_argument("--cells", default="21,21", help="grid size c1,c2")
    p.add_argument("--fix", help="fixed parameter values name=value,...")
    p.add_argument("--box-x",
                   help="state seed box lo:hi,... (default -3:3 each)")
    p.add_argument("--seeds", type=int, default=64)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("count-minors", parents=[out_p],
                       help="exact minor-counting recurrence")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--codim", type=int)
    p.add_argument("--corank-seq", help="explicit corank sequence i1,i2,...")
    p.set_defaults(func=cmd_count_minors)

    p = sub.add_parser("boardman", parents=[field_p, out_p],
                       help="singularity symbol at a point, parameters fixed")
    p.add_argument("--at", help="state values name=value,... (default origin)")
    p.add_argument("--fix", help="parameter values name=value,...")
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--cap", type=int, default=10_000)
    p.add_argument("--tol-b", type=float, default=det.DEFAULT_TOL_B)
    p.set_defaults(func=cmd_boardman)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    args._argv = argv
    try:
        return args.func(args)
    except (ex.EvaluationError, bo.ToleranceError, np.linalg.LinAlgError,
            ZeroDivisionError, FloatingPointError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except (UsageError, ex.ParseError, DomainError, bo.CapExceededError,
            ValueError, IndexError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
