"""Command-line front door.

Subcommands: gen, exponent, norm, maximal, gradient, verify, report.
Exit codes: 0 success; 1 a verify assertion (provable direction) failed or a
solver gave up; 2 malformed input.  All numeric output goes through the
canonical 17-significant-digit writer so identical inputs give byte-identical
outputs.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .characterizations import FUNCTIONALS, equivalence_report
from .exponent import exponent_range, log_holder_estimate
from .generators import gen_exponent, gen_grid, gen_random_cloud
from .gradient import SolverError, minimal_gradient
from .io import (
    InputError,
    dump_json,
    fmt_num,
    load_exponent,
    load_function,
    load_space,
    save_exponent,
    save_space,
)
from .lebesgue import FunctionField, modular, vlp_norm
from .maximal import hl_maximal, minimal_h, overline_sharp, sharp_maximal, tilde_sharp
from .space import SpaceError

__all__ = ["main", "dispatch"]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="hajlasz", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a space fixture (grid or random cloud)")
    g.add_argument("--kind", choices=["grid", "cloud"], required=True)
    g.add_argument("--dim", type=int, default=1)
    g.add_argument("--side", type=int, default=3, help="grid points per axis")
    g.add_argument("--n", type=int, default=16, help="cloud size")
    g.add_argument("--beta", type=float, default=1.0, help="snowflake power for grids")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--exponent-kind", choices=["constant", "affine", "bump"])
    g.add_argument("--exponent-params", default="{}", help="JSON dict of parameters")
    g.add_argument("--exponent-out")

    e = sub.add_parser("exponent", help="exponent range and log-Holder constants")
    e.add_argument("--space", required=True)
    e.add_argument("--exponent", required=True)
    e.add_argument("--pinf", type=float, default=None)
    e.add_argument("--quantize", type=int, default=None)
    e.add_argument("--out")

    n = sub.add_parser("norm", help="Luxemburg norm of a function")
    n.add_argument("--space", required=True)
    n.add_argument("--exponent", required=True)
    n.add_argument("--function", required=True)
    n.add_argument("--tol", type=float, default=1e-10)
    n.add_argument("--quantize", type=int, default=None)
    n.add_argument("--out")

    m = sub.add_parser("maximal", help="maximal functionals of a function")
    m.add_argument("--space", required=True)
    m.add_argument("--function", required=True)
    m.add_argument("--kind", choices=["hl", "sharp", "tilde", "overline", "minh"], required=True)
    m.add_argument("--u", type=float, default=1.0)
    m.add_argument("--s", type=float, default=1.0)
    m.add_argument("--quantize", type=int, default=None)
    m.add_argument("--out")

    r = sub.add_parser("gradient", help="minimal-norm fractional gradient")
    r.add_argument("--space", required=True)
    r.add_argument("--exponent", required=True)
    r.add_argument("--function", required=True)
    r.add_argument("--s", type=float, default=1.0)
    r.add_argument("--tol", type=float, default=1e-6)
    r.add_argument("--quantize", type=int, default=None)
    r.add_argument("--out")

    v = sub.add_parser("verify", help="norm-equivalence report over a corpus")
    v.add_argument("--space", required=True)
    v.add_argument("--exponent", required=True)
    v.add_argument("--s", type=float, default=1.0)
    v.add_argument("--u", type=float, default=1.0)
    v.add_argument("--q", type=float, default=1.0)
    v.add_argument("--tol", type=float, default=1e-6)
    src = v.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus", help="directory of function files (*.json)")
    src.add_argument("--random", type=int, help="number of random normal fields")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--threads", type=int, default=None)
    v.add_argument("--quantize", type=int, default=None)
    v.add_argument("--csv")
    v.add_argument("--json", dest="json_out")

    t = sub.add_parser("report", help="render a verify CSV as an aligned table")
    t.add_argument("--csv", required=True)
    t.add_argument("--out")

    return top


def _cmd_gen(args) -> int:
    if args.kind == "grid":
        space = gen_grid(args.dim, args.side, args.beta)
    else:
        space = gen_random_cloud(args.n, args.dim, args.seed)
    save_space(space, args.out)
    if args.exponent_kind:
        if not args.exponent_out:
            raise InputError("--exponent-out is required with --exponent-kind")
        params = json.loads(args.exponent_params)
        if not isinstance(params, dict):
            raise InputError("--exponent-params must be a JSON object")
        save_exponent(gen_exponent(space, args.exponent_kind, **params), args.exponent_out)
    return 0


def _cmd_exponent(args) -> int:
    space = load_space(args.space, args.quantize)
    p = load_exponent(args.exponent, space.n)
    p_minus, p_plus = exponent_range(p)
    c_log, c_inf = log_holder_estimate(space, p, args.pinf)
    _emit(
        dump_json({"p_minus": p_minus, "p_plus": p_plus, "c_log": c_log, "c_inf": c_inf}),
        args.out,
    )
    return 0


def _cmd_norm(args) -> int:
    space = load_space(args.space, args.quantize)
    p = load_exponent(args.exponent, space.n)
    f = load_function(args.function, space.n)
    value = vlp_norm(space, p, f, args.tol)
    mod = modular(space, p, f, value) if value > 0 else 0.0
    _emit(dump_json({"norm": value, "modular_at_norm": mod}), args.out)
    return 0


def _cmd_maximal(args) -> int:
    space = load_space(args.space, args.quantize)
    f = load_function(args.function, space.n)
    if args.kind == "hl":
        out = hl_maximal(space, f)
    elif args.kind == "sharp":
        out = sharp_maximal(space, f, args.u, args.s)
    elif args.kind == "tilde":
        out = tilde_sharp(space, f, args.u, args.s)
    elif args.kind == "overline":
        out = overline_sharp(space, f, args.u, args.s)
    else:
        out = minimal_h(space, f, args.s)
    _emit(dump_json({"values": list(out.values)}), args.out)
    return 0


def _cmd_gradient(args) -> int:
    space = load_space(args.space, args.quantize)
    p = load_exponent(args.exponent, space.n)
    f = load_function(args.function, space.n)
    cert = minimal_gradient(space, p, f, args.s, args.tol)
    _emit(
        dump_json({"norm": cert.norm, "g": list(cert.g.values), "slack": cert.slack}),
        args.out,
    )
    return 0


def _verify_csv(report) -> str:
    pairs = [
        f"{a}_over_{b}"
        for i, a in enumerate(FUNCTIONALS)
        for b in FUNCTIONALS[i + 1 :]
    ]
    header = ["item", "label", "nf", *FUNCTIONALS, *pairs, "error"]
    lines = [",".join(header)]
    for row in report.rows:
        cells = [str(row.index), row.label]
        if row.error is None:
            cells.append(fmt_num(row.nf))
            cells.extend(fmt_num(row.functional(name)) for name in FUNCTIONALS)
            for i, a in enumerate(FUNCTIONALS):
                for b in FUNCTIONALS[i + 1 :]:
                    den = row.functional(b)
                    cells.append(fmt_num(row.functional(a) / den) if den > 0 else "")
        else:
            cells.extend([""] * (1 + len(FUNCTIONALS) + len(pairs)))
        cells.append(row.error or "")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _verify_summary(report, args) -> dict:
    return {
        "params": {
            "s": report.s,
            "u": report.u,
            "q": report.q,
            "tol": report.tol,
            "seed": args.seed,
            "space": str(args.space),
            "exponent": str(args.exponent),
        },
        "n_items": len(report.rows),
        "n_errors": sum(1 for r in report.rows if r.error is not None),
        "assertions": report.assertions,
        "max_nw_excess": report.max_nw_excess,
        "max_na_excess": report.max_na_excess,
        "ratios": report.ratio_stats,
    }


def _cmd_verify(args) -> int:
    space = load_space(args.space, args.quantize)
    p = load_exponent(args.exponent, space.n)
    if args.corpus is not None:
        paths = sorted(Path(args.corpus).glob("*.json"))
        if not paths:
            raise InputError(f"no function files (*.json) found in {args.corpus}")
        corpus = [load_function(path, space.n) for path in paths]
        labels = [path.stem for path in paths]
    else:
        if args.random < 1:
            raise InputError("--random must be >= 1")
        rng = np.random.default_rng(args.seed)
        corpus = [FunctionField(rng.standard_normal(space.n)) for _ in range(args.random)]
        labels = [f"random{i}" for i in range(args.random)]
    report = equivalence_report(
        space,
        p,
        corpus,
        s=args.s,
        u=args.u,
        q=args.q,
        tol=args.tol,
        threads=args.threads,
        labels=labels,
    )
    _emit(_verify_csv(report), args.csv)
    _emit(dump_json(_verify_summary(report, args)), args.json_out)
    if not report.ok:
        failed = sorted(k for k, v in report.assertions.items() if not v)
        print(f"assertion failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def _cmd_report(args) -> int:
    text = Path(args.csv).read_text(encoding="utf-8")
    rows = [line.split(",") for line in text.splitlines() if line]
    if not rows:
        raise InputError(f"empty CSV: {args.csv}")

    def shorten(cell: str) -> str:
        try:
            return f"{float(cell):.6g}"
        except ValueError:
            return cell

    rendered = [rows[0]] + [[shorten(c) for c in row] for row in rows[1:]]
    widths = [max(len(r[i]) for r in rendered if i < len(r)) for i in range(len(rows[0]))]
    lines = [
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
        for row in rendered
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


_HANDLERS = {
    "gen": _cmd_gen,
    "exponent": _cmd_exponent,
    "norm": _cmd_norm,
    "maximal": _cmd_maximal,
    "gradient": _cmd_gradient,
    "verify": _cmd_verify,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    except (InputError, SpaceError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


dispatch = main
