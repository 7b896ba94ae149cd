"""Command-line driver: lay out a graph file or run the layout service.

Exit codes: 0 success, 1 fatal diagnostics (any diagnostic with --strict),
2 usage errors.  Diagnostics are printed to stderr as JSON lines.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .ingest import ParseError, parse_function_network, parse_generic
from .model import CompoundGraph, Diagnostic
from .pipeline import FatalDiagnosticsError, LayoutConfig, run_pipeline
from .scene import compute_metrics, to_json, to_svg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="portlayout",
        description="Overview+detail layout for ported compound graphs.",
    )
    parser.add_argument("--in", dest="input", metavar="FILE", help="input graph file")
    parser.add_argument(
        "--format",
        choices=("generic", "fn"),
        help="input format (default: by extension, .fn.json selects fn)",
    )
    parser.add_argument(
        "--expand",
        default="",
        metavar="IDS",
        help="comma-separated group ids to expand",
    )
    parser.add_argument(
        "--duplicate-mode",
        choices=("each", "single"),
        default="each",
        help="expand every duplicate sibling, or one representative with dashed links",
    )
    parser.add_argument(
        "--suppress-duplicate-edges",
        action="store_true",
        help="omit the dashed links between duplicates and their representative",
    )
    parser.add_argument(
        "--baseline",
        action="store_true",
        help="use the centred right-growing placement (for metric comparisons)",
    )
    parser.add_argument("--svg", metavar="PATH", help="write SVG rendering here")
    parser.add_argument("--json", metavar="PATH", help="write scene JSON here")
    parser.add_argument(
        "--metrics", action="store_true", help="print layout metrics JSON to stdout"
    )
    parser.add_argument(
        "--strict", action="store_true", help="treat every diagnostic as fatal"
    )
    parser.add_argument(
        "--sibling-gap", type=float, default=30.0, metavar="N",
        help="minimum clearance between detail frames (default 30)",
    )
    parser.add_argument(
        "--proximity-metric", choices=("edge", "center"), default="edge",
        help="how anchor-to-boundary proximity picks the growth direction",
    )
    parser.add_argument(
        "--no-reverse-arrows",
        action="store_true",
        help="keep function-network wire direction instead of flow direction",
    )
    parser.add_argument(
        "--serve", type=int, metavar="PORT", help="run the layout HTTP service"
    )
    parser.add_argument(
        "--ui", metavar="DIR", help="static explorer bundle to serve alongside the API"
    )
    return parser


def load_graph(path: str, fmt: str | None, *, reverse_arrows: bool = True) -> CompoundGraph:
    text = Path(path).read_text(encoding="utf-8")
    if fmt is None:
        fmt = "fn" if path.endswith(".fn.json") else "generic"
    if fmt == "fn":
        return parse_function_network(text, reverse_arrows=reverse_arrows)
    return parse_generic(text)


def _emit_diagnostics(diagnostics: tuple[Diagnostic, ...]) -> None:
    for d in diagnostics:
        print(json.dumps(d.to_dict(), sort_keys=True), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.serve is not None:
        from .service import serve

        serve(args.serve, ui_dir=args.ui)
        return 0

    if not args.input:
        parser.error("--in FILE is required unless --serve is given")

    config = LayoutConfig(
        sibling_gap=args.sibling_gap,
        proximity_metric=args.proximity_metric,
        duplicate_mode=args.duplicate_mode,
        suppress_duplicate_edges=args.suppress_duplicate_edges,
        baseline=args.baseline,
        reverse_arrows=not args.no_reverse_arrows,
    )

    try:
        graph = load_graph(
            args.input, args.format, reverse_arrows=config.reverse_arrows
        )
    except FileNotFoundError:
        parser.error(f"input file not found: {args.input}")
    except ParseError as exc:
        parser.error(str(exc))

    expand = {gid for gid in args.expand.split(",") if gid}
    try:
        result = run_pipeline(graph, expand, config)
    except FatalDiagnosticsError as exc:
        _emit_diagnostics(exc.diagnostics)
        return 1
    except ValueError as exc:
        parser.error(str(exc))

    _emit_diagnostics(result.diagnostics)

    if args.svg:
        Path(args.svg).write_text(to_svg(result.scene), encoding="utf-8")
    if args.json:
        Path(args.json).write_text(to_json(result.scene), encoding="utf-8")
    if args.metrics:
        metrics = compute_metrics(result.scene, result.tree)
        print(json.dumps(metrics.to_dict(), sort_keys=True))
    if not (args.svg or args.json or args.metrics):
        print(to_json(result.scene))

    if args.strict and result.diagnostics:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
