"""Command line front end.

Exit codes: 0 valid (and Delaunay where checked), 2 valid with Delaunay
violations, 3 invalid triangulation, 4 input or precondition error,
5 internal defect.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from . import __version__
from .delaunay import FlipLimitExceeded, NonConvexQuad, check_delaunay, repair_flip
from .formats import MeshFormat, ParseError, dumps_report, parse_mesh, write_mesh
from .model import PreconditionViolation
from .pstv import FailureKind, brute_force_valid, normalize_orientation, validate
from .testkit import AllCollinear, Distribution, DistributionSpec, generate_points, reference_delaunay

EXIT_OK = 0
EXIT_NOT_DELAUNAY = 2
EXIT_INVALID = 3
EXIT_INPUT = 4
EXIT_INTERNAL = 5

TOOL = "meshcert"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as "not Delaunay"
    def error(self, message: str):
        raise UsageError(message)


def _use_color(stream) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _diag(level: str, message: str) -> None:
    color = {"error": "31", "warning": "33", "note": "36"}.get(level)
    tag = f"{level}:"
    if color and _use_color(sys.stderr):
        tag = f"\x1b[{color}m{tag}\x1b[0m"
    print(f"{TOOL}: {tag} {message}", file=sys.stderr)


def _input_error(path, exc: Exception) -> str:
    # parse errors already carry their file name
    return str(exc) if isinstance(exc, ParseError) else f"{path}: {exc}"


def _doc(command: str, mesh=None) -> dict:
    doc = {"tool": TOOL, "version": __version__, "command": command}
    if mesh is not None:
        doc["input"] = mesh.as_dict()
    return doc


def _stats_line(path, report) -> str:
    s = report.stats
    return (
        f"{path}: OT {s.ot_calls} calls, {s.ot_fallbacks} exact; "
        f"ICT {s.ict_calls} calls, {s.ict_fallbacks} exact; {report.elapsed:.3g} s"
    )


def _run_one(command: str, path: str, fmt: str | None, normalize: bool) -> tuple[int, dict, list[str]]:
    """Validate (and for ``check`` test Delaunay) one mesh; returns code, report, diagnostics."""
    notes: list[str] = []
    try:
        d, mesh = parse_mesh(path, fmt)
    except (ParseError, PreconditionViolation) as exc:
        doc = _doc(command)
        doc["error"] = {"kind": "input", "message": str(exc)}
        return EXIT_INPUT, doc, [_input_error(path, exc)]
    except OSError as exc:
        doc = _doc(command)
        doc["error"] = {"kind": "input", "message": str(exc)}
        return EXIT_INPUT, doc, [f"{path}: {exc.strerror or exc}"]

    doc = _doc(command, mesh)
    rep = validate(d, normalize=normalize)
    doc["validation"] = rep.as_dict()
    notes.append("stats " + _stats_line(path, rep))
    if not rep.valid:
        f = rep.failure
        notes.append(f"{path}: Invalid ({f.kind.value}): {f.message}")
        return (EXIT_INPUT if f.kind is FailureKind.PRECONDITION else EXIT_INVALID), doc, notes
    if command == "check":
        if normalize:
            d = normalize_orientation(d)
        dr = check_delaunay(d)
        doc["delaunay"] = dr.as_dict()
        if not dr.all_delaunay:
            notes.append(f"{path}: {len(dr.violating_edges)} non-Delaunay edge(s)")
            return EXIT_NOT_DELAUNAY, doc, notes
    return EXIT_OK, doc, notes


def _emit(doc: dict, report_path: str | None) -> None:
    text = dumps_report(doc)
    if report_path:
        Path(report_path).write_text(text)
    else:
        sys.stdout.write(text)


def _flush_notes(notes: Sequence[str], stats: bool) -> None:
    for n in notes:
        if n.startswith("stats "):
            if stats:
                _diag("note", n[6:])
        elif "Invalid" in n or "non-Delaunay" in n:
            _diag("warning", n)
        else:
            _diag("error", n)


def cmd_validate(args) -> int:
    paths = args.mesh
    jobs = max(1, args.jobs)
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(
                _run_one, [args.command] * len(paths), paths,
                [args.format] * len(paths), [args.normalize_orientation] * len(paths),
            ))
    else:
        results = [_run_one(args.command, p, args.format, args.normalize_orientation) for p in paths]
    for _, _, notes in results:
        _flush_notes(notes, args.stats)
    if len(results) == 1:
        _emit(results[0][1], args.report)
    else:
        _emit({"tool": TOOL, "version": __version__, "results": [r[1] for r in results]}, args.report)
    return max(r[0] for r in results)


def cmd_repair(args) -> int:
    try:
        d, mesh = parse_mesh(args.mesh, args.format)
    except (ParseError, PreconditionViolation) as exc:
        _diag("error", _input_error(args.mesh, exc))
        return EXIT_INPUT
    doc = _doc("repair", mesh)
    rep = validate(d, normalize=args.normalize_orientation)
    doc["validation"] = rep.as_dict()
    if args.stats:
        _diag("note", _stats_line(args.mesh, rep))
    if not rep.valid:
        f = rep.failure
        _diag("warning", f"{args.mesh}: Invalid ({f.kind.value}): {f.message}; nothing written")
        _emit(doc, args.report)
        return EXIT_INPUT if f.kind is FailureKind.PRECONDITION else EXIT_INVALID
    if args.normalize_orientation:
        d = normalize_orientation(d)
    try:
        out, dr = repair_flip(d)
    except (NonConvexQuad, FlipLimitExceeded) as exc:
        _diag("error", f"repair aborted: {exc}")
        return EXIT_INTERNAL
    write_mesh(out, args.output, args.out_format, hexfloat=args.hexfloat)
    doc["repair"] = dr.as_dict()
    doc["output"] = str(args.output)
    _emit(doc, args.report)
    if not dr.all_delaunay:
        _diag("warning", f"{len(dr.violating_edges)} constrained edge(s) remain non-Delaunay")
        return EXIT_NOT_DELAUNAY
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        spec = DistributionSpec(Distribution(args.dist), args.n, args.seed)
        start = time.perf_counter()
        d = reference_delaunay(generate_points(spec))
    except (ValueError, AllCollinear) as exc:
        _diag("error", str(exc))
        return EXIT_INPUT
    write_mesh(d, args.output, args.out_format, hexfloat=args.hexfloat)
    if args.stats:
        _diag("note", f"generated {d.n_points} nodes, {d.n_triangles} triangles in {time.perf_counter() - start:.3g} s")
    return EXIT_OK


def cmd_oracle(args) -> int:
    try:
        d, mesh = parse_mesh(args.mesh, args.format)
    except (ParseError, PreconditionViolation) as exc:
        _diag("error", _input_error(args.mesh, exc))
        return EXIT_INPUT
    if d.n_points > args.max_nodes:
        _diag("error", f"{d.n_points} nodes exceeds --max-nodes {args.max_nodes}; the oracle is quadratic")
        return EXIT_INPUT
    if args.normalize_orientation:
        d = normalize_orientation(d)
    start = time.perf_counter()
    ok = brute_force_valid(d)
    doc = _doc("oracle", mesh)
    doc["oracle"] = {
        "verdict": "Valid" if ok else "Invalid",
        "elapsed": float(f"{time.perf_counter() - start:.3g}"),
    }
    _emit(doc, args.report)
    return EXIT_OK if ok else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=[f.value for f in MeshFormat], help="input format (default: by extension)")
    common.add_argument("--normalize-orientation", action="store_true", help="reorder clockwise triangles before validating")
    common.add_argument("--report", metavar="PATH", help="write the report here instead of standard output")
    common.add_argument("--stats", action="store_true", help="print predicate counters to standard error")

    out = _Parser(add_help=False)
    out.add_argument("-o", "--output", required=True, metavar="PATH")
    out.add_argument("--out-format", choices=[f.value for f in MeshFormat], help="output format (default: by extension)")
    out.add_argument("--hexfloat", action="store_true", help="write native coordinates as hexadecimal floats")

    p = _Parser(prog=TOOL, description="Validate 2D triangulations and check or repair the Delaunay property.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, help_ in (("validate", "check that the triangles tile the region"), ("check", "validate, then test every interior edge")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("mesh", nargs="+")
        s.add_argument("--jobs", type=int, default=1, help="meshes processed in parallel")
        s.set_defaults(func=cmd_validate)

    s = sub.add_parser("repair", parents=[common, out], help="validate, then flip edges until Delaunay")
    s.add_argument("mesh")
    s.set_defaults(func=cmd_repair)

    s = sub.add_parser("generate", parents=[out], help="write a reference Delaunay mesh")
    s.add_argument("--dist", required=True, choices=[k.value for k in Distribution])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stats", action="store_true")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("oracle", parents=[common], help="brute-force validation for small meshes")
    s.add_argument("mesh")
    s.add_argument("--max-nodes", type=int, default=2000)
    s.set_defaults(func=cmd_oracle)
    return p


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _diag("error", str(exc))
        return EXIT_INPUT
    try:
        return args.func(args)
    except OSError as exc:
        _diag("error", str(exc))
        return EXIT_INPUT
    except Exception:
        _diag("error", "internal defect")
        traceback.print_exc(file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
