"""Command-line entry point: ``cyclic-ph``.

Exit codes: 0 success, 1 usage error, 2 input error, 3 oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bench import run_bench
from .dynamics import Contractible, homotopy_type
from .errors import CyclicPHError, InputError, NotConvexPosition
from .geometry import (
    Circle,
    Ellipse,
    PointCloud,
    SymmetricMomentCurve,
    build_filtration,
    graph_at_scale,
    sample_curve,
)
from .graph import Filtration
from .oracle import DEFAULT_CAP, oracle_barcode
from .persistence import full_persistence

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_MISMATCH = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="cyclic-ph",
        description="Persistent homology of filtrations of cyclic graphs.",
    )
    src = p.add_mutually_exclusive_group()
    src.add_argument("--points", metavar="FILE", help="CSV of points, one per line")
    src.add_argument("--filtration", metavar="FILE", help="filtration JSON")
    src.add_argument("--curve", choices=("circle", "ellipse", "moment"), help="sample a curve")
    src.add_argument("--bench", metavar="N1,N2,...", help="time the circle pipeline at these sizes")

    c = p.add_argument_group("curve sampling")
    c.add_argument("--a", type=float, default=1.2, help="ellipse semi-major axis")
    c.add_argument("--b", type=float, default=1.0, help="ellipse semi-minor axis")
    c.add_argument("--alpha", type=float, default=0.5, help="moment-curve alpha")
    c.add_argument("--radius", type=float, default=1.0, help="circle radius")
    c.add_argument("--n", type=int, default=30, help="number of samples")
    c.add_argument("--seed", type=int, default=None, help="seed for random angles")
    c.add_argument("--angles", choices=("uniform", "random"), default=None,
                   help="angle scheme (default: random when --seed is given)")

    p.add_argument("--r", type=float, default=None,
                   help="scale: with --homotopy pick the graph at r, otherwise stop the filtration at r")
    p.add_argument("--max-dim", type=int, default=None,
                   help="largest homological dimension (default 2, or 4 with --bench)")
    red = p.add_mutually_exclusive_group()
    red.add_argument("--reduced", dest="reduced", action="store_true", default=True)
    red.add_argument("--unreduced", dest="reduced", action="store_false")
    p.add_argument("--oracle-check", action="store_true", help="compare with brute-force persistence")
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--homotopy", action="store_true", help="print the homotopy type of one graph")
    p.add_argument("--events", metavar="FILE", help="write the event log as JSON lines")
    p.add_argument("--export-filtration", metavar="FILE", help="write the filtration JSON")
    p.add_argument("--reps", type=int, default=1, help="bench repetitions")
    p.add_argument("--out", metavar="FILE", help="write output here instead of stdout")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return p


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_filtration(args) -> Filtration:
    if args.filtration:
        text = _read(args.filtration)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(exc.msg, exc.lineno, exc.colno) from None
        return Filtration.from_dict(data)
    if args.points:
        cloud = PointCloud.from_csv(_read(args.points))
        return build_filtration(cloud) if cloud.dim == 2 else build_filtration(cloud, order=range(cloud.n))
    if args.curve == "circle":
        spec = Circle(args.radius)
    elif args.curve == "ellipse":
        spec = Ellipse(args.a, args.b)
    else:
        spec = SymmetricMomentCurve(args.alpha)
    angles = args.angles or ("random" if args.seed is not None else "uniform")
    cloud = sample_curve(spec, args.n, angles, args.seed)
    if args.curve == "moment":
        return build_filtration(cloud, order=range(cloud.n), on_violation="truncate")
    return build_filtration(cloud, on_violation="truncate")


def _truncate(filt: Filtration, r: float) -> Filtration:
    if filt.scales is None:
        raise InputError("--r needs a filtration with scales")
    count = int(np.searchsorted(filt.scales, r, side="right"))
    cone = filt.cone if count == len(filt) and filt.cone and filt.cone.scale <= r else None
    vsteps = {i: s for i, s in filt.vertex_steps.items() if i < count}
    return Filtration.from_sources(
        filt.initial, filt.sources[:count], filt.scales[:count], cone, filt.order, vsteps, validate=False
    )


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _homotopy(args, filt: Filtration) -> int:
    if args.r is not None and filt.scales is not None:
        graph, coned = graph_at_scale(filt, args.r)
        kind = Contractible() if coned else homotopy_type(graph)
    else:
        kind = Contractible() if filt.cone is not None else homotopy_type(filt.final_graph())
    if args.format == "json":
        _emit(args, json.dumps({"homotopy": kind.to_dict(), "text": str(kind)}) + "\n")
    else:
        _emit(args, f"{kind}\n")
    return EXIT_OK


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_dim is None:
        args.max_dim = 4 if args.bench else 2
    if args.max_dim < 0:
        build_parser().error("--max-dim must be non-negative")
    if args.bench:
        try:
            sizes = [int(s) for s in args.bench.split(",") if s.strip()]
        except ValueError:
            build_parser().error("--bench takes a comma-separated list of integers")
        if not sizes or min(sizes) < 3:
            build_parser().error("--bench sizes must be at least 3")
        result = run_bench(sizes, args.max_dim, max(1, args.reps))
        _emit(args, result.to_csv())
        return EXIT_OK
    if not (args.points or args.filtration or args.curve):
        build_parser().error("one of --points, --filtration, --curve or --bench is required")

    try:
        filt = _load_filtration(args)
        if args.export_filtration:
            with open(args.export_filtration, "w", encoding="utf-8") as fh:
                fh.write(filt.to_json())
        if args.homotopy:
            return _homotopy(args, filt)
        if args.r is not None:
            filt = _truncate(filt, args.r)
        if filt.truncated is not None:
            pair, scale = filt.truncated
            print(f"note: stopped at scale {scale}: edge {pair} has no cyclic orientation", file=sys.stderr)
        bars, events = full_persistence(filt, args.max_dim, reduced=args.reduced, events=True)
    except NotConvexPosition as exc:
        print(f"error: {exc} (point index {exc.index})", file=sys.stderr)
        return EXIT_INPUT
    except (CyclicPHError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.events:
        with open(args.events, "w", encoding="utf-8") as fh:
            fh.write(events.to_jsonl())
    _emit(args, bars.to_json(indent=None) + "\n" if args.format == "json" else bars.to_text())

    if args.oracle_check:
        if filt.n_final > args.oracle_cap:
            print(f"note: oracle skipped, {filt.n_final} vertices exceed the cap of {args.oracle_cap}",
                  file=sys.stderr)
            return EXIT_OK
        ref = oracle_barcode(filt, args.max_dim, reduced=args.reduced, cap=args.oracle_cap)
        diff = bars.first_difference(ref)
        if diff is not None:
            print(f"oracle mismatch: {diff} (first = fast scan, second = oracle)", file=sys.stderr)
            return EXIT_MISMATCH
        print("oracle check passed", file=sys.stderr)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
