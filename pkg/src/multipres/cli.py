"""Command-line front end.

Exit codes: 0 on success, 1 on input errors (parsing, validation, bad
arguments), 2 when an experiment or verification fails.  Reports print
exact rationals first with 6-place decimal approximations in parentheses,
and identical configuration plus seed gives byte-identical output.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import experiments, fio
from .fibered import barcode, restrict, simplify_barcode
from .functors import grid_align, interpolate, merge_module, simplify
from .grades import Grade, GridFunction, LineSpec, rat, rat_str
from .metrics import (
    bottleneck,
    matching_distance,
    path_length_d0,
    rank_lower_bound,
    sample_lines,
    verify_interleaving,
)
from .presentation import PresentationError, betti_and_grid, minimize
from .blocks import block_matching_distance, extend_block

INF = math.inf


class InputError(Exception):
    pass


def _q(value) -> str:
    if value in (INF, -INF):
        return rat_str(value)
    return f"{rat_str(value)} ({float(value):.6f})"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_fpres(path: str):
    try:
        return fio.parse_fpres(_read(path))
    except fio.FormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _parse_grade(text: str) -> Grade:
    try:
        return Grade([rat(tok) for tok in text.replace(",", " ").split()])
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad grade {text!r}: {exc}") from exc


def _parse_grid(args) -> GridFunction:
    if args.grid_of:
        data = betti_and_grid(_load_fpres(args.grid_of))
        return data.grid
    if args.grid:
        try:
            axes = [
                [rat(tok) for tok in axis.replace(",", " ").split()]
                for axis in args.grid.split(";")
            ]
            return GridFunction(axes)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad grid {args.grid!r}: {exc}") from exc
    raise InputError("need --grid or --grid-of")


def _parse_line(args, n: int) -> LineSpec:
    try:
        direction = [rat(tok) for tok in args.direction.replace(",", " ").split()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad direction {args.direction!r}: {exc}") from exc
    if len(direction) != n:
        raise InputError(f"direction needs {n} components")
    if args.through:
        return LineSpec.through(_parse_grade(args.through), direction)
    base = _parse_grade(args.base) if args.base else Grade([0] * n)
    top = max(direction)
    return LineSpec([d / top for d in direction], base)


def _rational(text: str) -> Fraction:
    try:
        return rat(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {text!r}") from exc


def _report(args, rows: list[tuple[str, object]]) -> None:
    """Emit (key, value) rows as prose or as tab-separated key/exact/decimal."""
    tabular = getattr(args, "format", "text") == "tabular"
    sep = "\t" if tabular else " "
    out = []
    for key, value in rows:
        if isinstance(value, Fraction) or value in (INF, -INF):
            if tabular:
                dec = "" if value in (INF, -INF) else f"{float(value):.6f}"
                out.append(f"{key}\t{rat_str(value)}\t{dec}".rstrip())
            else:
                out.append(f"{key} {_q(value)}")
        else:
            out.append(f"{key}{sep}{value}")
    print("\n".join(out))


# -- subcommand bodies -----------------------------------------------------------


def _cmd_minimize(args) -> int:
    P = _load_fpres(args.module)
    _emit(fio.serialize_fpres(minimize(P)), args.output)
    return 0


def _cmd_betti(args) -> int:
    data = betti_and_grid(_load_fpres(args.module))
    lines = []
    for name, counter in (("xi0", data.xi0), ("xi1", data.xi1)):
        for g in sorted(counter, key=lambda x: x.lex_key()):
            lines.append(f"{name} {g} x{counter[g]}")
    for i, axis in enumerate(data.grid.axes):
        lines.append(f"axis {i} " + " ".join(rat_str(v) for v in axis))
    lines.append(f"controlling-constant {rat_str(data.c)}")
    lines.append(f"partial-complexity {data.partial_complexity}")
    _emit("\n".join(lines), args.output)
    return 0


def _cmd_hilbert(args) -> int:
    P = _load_fpres(args.module)
    a = _parse_grade(args.at)
    print(P.hilbert(a))
    return 0


def _cmd_merge(args) -> int:
    P = _load_fpres(args.module)
    grid = _parse_grid(args)
    out = merge_module(P, grid, _rational(args.delta), args.variant,
                       minimized=not args.raw)
    _emit(fio.serialize_fpres(out), args.output)
    return 0


def _cmd_simplify(args) -> int:
    P = _load_fpres(args.module)
    out = simplify(P, _rational(args.eps), minimized=not args.raw)
    _emit(fio.serialize_fpres(out), args.output)
    return 0


def _cmd_grid_align(args) -> int:
    P = _load_fpres(args.module)
    grid = _parse_grid(args)
    try:
        result = grid_align(P, grid, _rational(args.kap_eps))
    except PresentationError as exc:
        raise InputError(str(exc)) from exc
    _emit(fio.serialize_fpres(result.module), args.output)
    print(f"# certified interleaving budget {_q(result.budget)}", file=sys.stderr)
    return 0


def _cmd_restrict(args) -> int:
    P = _load_fpres(args.module)
    line = _parse_line(args, P.n)
    _emit(fio.serialize_fpres(restrict(P, line)), args.output)
    return 0


def _cmd_barcode(args) -> int:
    P = _load_fpres(args.module)
    if P.n != 1:
        if not args.direction:
            raise InputError("multiparameter module: pass --direction (and --base/--through) to restrict first")
        line = _parse_line(args, P.n)
        P = restrict(P, line)
    B = barcode(P)
    if args.simplify is not None:
        B = simplify_barcode(B, _rational(args.simplify))
    _emit(fio.serialize_barcode(B), args.output)
    return 0


def _cmd_match_dist(args) -> int:
    P = _load_fpres(args.module)
    Q = _load_fpres(args.other)
    sample = sample_lines(P, Q, slopes=args.lines, seed=args.seed,
                          extra=args.extra if args.seed is not None else 0)
    report = matching_distance(P, Q, sample=sample, adaptive_rounds=args.adaptive)
    rows = [("matching-distance", report.value), ("kind", report.kind),
            ("lines", len(sample.lines))]
    if args.emit_argmax and report.argmax_line is not None:
        rows.append(("argmax", str(report.argmax_line)))
    _report(args, rows)
    return 0


def _cmd_bottleneck(args) -> int:
    try:
        B1 = fio.parse_barcode(_read(args.first))
        B2 = fio.parse_barcode(_read(args.second))
    except fio.FormatError as exc:
        raise InputError(str(exc)) from exc
    _report(args, [("bottleneck", bottleneck(B1, B2))])
    return 0


def _cmd_verify(args) -> int:
    P = _load_fpres(args.module)
    Q = _load_fpres(args.other)
    try:
        w = fio.parse_witness(_read(args.witness), P, Q)
    except fio.FormatError as exc:
        raise InputError(f"{args.witness}: {exc}") from exc
    report = verify_interleaving(P, Q, w)
    print(report.render())
    return 0 if report.accepted else 2


def _cmd_lower_bound(args) -> int:
    P = _load_fpres(args.module)
    Q = _load_fpres(args.other)
    probes = [_parse_grade(s) for s in args.probe] if args.probe else None
    report = rank_lower_bound(P, Q, probes)
    _report(args, [("interleaving-lower-bound", report.value), ("kind", report.kind)])
    return 0


def _cmd_interpolate(args) -> int:
    try:
        J = fio.parse_joint(_read(args.joint))
        out = interpolate(J, _rational(args.t))
    except (fio.FormatError, PresentationError) as exc:
        raise InputError(str(exc)) from exc
    _emit(fio.serialize_fpres(out), args.output)
    return 0


def _cmd_path_length(args) -> int:
    mods = [_load_fpres(p) for p in args.modules]
    try:
        total = path_length_d0(mods, slopes=args.lines)
    except (ValueError, PresentationError) as exc:
        raise InputError(str(exc)) from exc
    _report(args, [("path-length", total)])
    return 0


def _cmd_blocks(args) -> int:
    try:
        A = fio.parse_blocks(_read(args.first))
        if args.blocks_cmd == "extend":
            lines = []
            for blk in A:
                r = extend_block(blk)
                u1, u2 = r.upper
                lines.append(
                    f"rect {blk.kind} [{rat_str(r.lower.coords[0])}, {rat_str(u1)}) x "
                    f"[{rat_str(r.lower.coords[1])}, {rat_str(u2)})"
                )
            _emit("\n".join(lines), None)
            return 0
        B = fio.parse_blocks(_read(args.second))
    except fio.FormatError as exc:
        raise InputError(str(exc)) from exc
    _report(args, [("block-matching-distance", block_matching_distance(A, B))])
    return 0


def _cmd_experiment(args) -> int:
    if args.experiment == "example31":
        report = experiments.run_example31(min_lines=args.lines or 500)
    elif args.experiment == "local-equiv":
        report = experiments.run_local_equiv(seed=args.seed or 0,
                                             instances=args.instances)
    else:
        report = experiments.run_sandwich(seed=args.seed or 0,
                                          cases=args.instances * 10)
    print(report.render())
    return 0 if report.passed else 2


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="multipres",
        description="finitely presented multiparameter persistence modules",
        epilog="MULTIPERS_THREADS caps internal parallelism (0 = auto); "
               "identical flags and seed give byte-identical reports",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def module_cmd(name, func, help_, other=False):
        p = sub.add_parser(name, help=help_)
        p.add_argument("module")
        if other:
            p.add_argument("other")
        p.add_argument("-o", "--output")
        p.set_defaults(func=func)
        return p

    module_cmd("minimize", _cmd_minimize, "emit a minimal presentation")
    module_cmd("betti", _cmd_betti, "Betti multisets, grid and controlling constant")

    p = sub.add_parser("hilbert", help="pointwise dimension at a grade")
    p.add_argument("module")
    p.add_argument("--at", required=True, help="grade, e.g. '1 1/2'")
    p.set_defaults(func=_cmd_hilbert)

    p = module_cmd("merge", _cmd_merge, "snap grades onto a grid")
    p.add_argument("--grid", help="axis lists, e.g. '0 1; 0 3'")
    p.add_argument("--grid-of", help="use this module's Betti grid")
    p.add_argument("--delta", required=True)
    p.add_argument("--variant", choices=["two_sided", "plus", "minus"], default="two_sided")
    p.add_argument("--raw", action="store_true", help="skip minimization")

    p = module_cmd("simplify", _cmd_simplify, "delete features shorter than eps")
    p.add_argument("--eps", required=True)
    p.add_argument("--raw", action="store_true", help="skip minimization")

    p = module_cmd("grid-align", _cmd_grid_align, "pull Betti grades onto a grid")
    p.add_argument("--grid")
    p.add_argument("--grid-of")
    p.add_argument("--kap-eps", required=True, help="base step budget")

    p = module_cmd("restrict", _cmd_restrict, "1-parameter restriction to a line")
    p.add_argument("--direction", required=True, help="positive components, e.g. '1 2'")
    p.add_argument("--base", help="base point with last coordinate 0")
    p.add_argument("--through", help="any point the line should pass through")

    p = module_cmd("barcode", _cmd_barcode, "barcode of a 1-parameter module or restriction")
    p.add_argument("--direction", help="restrict first when the module is multiparameter")
    p.add_argument("--base")
    p.add_argument("--through")
    p.add_argument("--simplify", help="apply barcode simplification at this eps")

    p = sub.add_parser("match-dist", help="sampled matching distance")
    p.add_argument("module")
    p.add_argument("other")
    p.add_argument("--lines", type=int, default=64, help="slope count of the sampling grid")
    p.add_argument("--adaptive", type=int, default=0, help="refinement rounds")
    p.add_argument("--seed", type=int, help="seed for jittered extra lines")
    p.add_argument("--extra", type=int, default=0, help="jittered lines to append")
    p.add_argument("--emit-argmax", action="store_true")
    p.add_argument("--format", choices=["text", "tabular"], default="text")
    p.set_defaults(func=_cmd_match_dist)

    p = sub.add_parser("bottleneck", help="exact bottleneck distance of two barcode files")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--format", choices=["text", "tabular"], default="text")
    p.set_defaults(func=_cmd_bottleneck)

    p = sub.add_parser("verify", help="check an interleaving witness")
    p.add_argument("module")
    p.add_argument("other")
    p.add_argument("witness")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("lower-bound", help="rank-condition interleaving lower bound")
    p.add_argument("module")
    p.add_argument("other")
    p.add_argument("--probe", action="append", help="extra probe grade, repeatable")
    p.add_argument("--format", choices=["text", "tabular"], default="text")
    p.set_defaults(func=_cmd_lower_bound)

    p = sub.add_parser("interpolate", help="waypoint of a joint presentation")
    p.add_argument("joint")
    p.add_argument("--t", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_interpolate)

    p = sub.add_parser("path-length", help="summed matching distance over waypoints")
    p.add_argument("modules", nargs="+")
    p.add_argument("--lines", type=int, default=16)
    p.add_argument("--format", choices=["text", "tabular"], default="text")
    p.set_defaults(func=_cmd_path_length)

    p = sub.add_parser("blocks", help="interlevel-set block operations")
    bsub = p.add_subparsers(dest="blocks_cmd", required=True)
    pe = bsub.add_parser("extend", help="print the rectangle extensions")
    pe.add_argument("first")
    pe.set_defaults(func=_cmd_blocks)
    pd = bsub.add_parser("dist", help="block-matching interleaving distance")
    pd.add_argument("first")
    pd.add_argument("second")
    pd.add_argument("--format", choices=["text", "tabular"], default="text")
    pd.set_defaults(func=_cmd_blocks)

    p = sub.add_parser("experiment", help="built-in experiment harnesses")
    p.add_argument("experiment", choices=["example31", "local-equiv", "sandwich"])
    p.add_argument("--seed", type=int)
    p.add_argument("--lines", type=int)
    p.add_argument("--instances", type=int, default=5)
    p.set_defaults(func=_cmd_experiment)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PresentationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
