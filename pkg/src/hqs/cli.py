"""Command-line entry point: ``hqs evaluate | hai | build-ac | analyze-reward``.

Exit codes: 0 success, 2 usage or input validation error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys

from . import __version__
from .analysis import AnalysisParams, optimal_depth, optimal_g, value_curve
from .corpus import CorpusError, build_average_link_hierarchy, load_items
from .guidance import SimilarityKind, TemperatureSchedule
from .hierarchy import HierarchyError, load_hierarchy
from .metrics import Evaluator, default_workers, hai
from .pomdp import PomdpConfig

log = logging.getLogger("hqs")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

# agglomerative trees can be far deeper than the default limit allows json to nest
_RECURSION_LIMIT = 20000


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _grid(text: str) -> list[float]:
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start or start < 0:
        raise argparse.ArgumentTypeError(f"grid needs 0 <= start <= stop and step > 0, got {text!r}")
    n = int(round((stop - start) / step))
    return [start + k * step for k in range(n + 1)]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hqs", description="Score hierarchical clusterings for item search.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("evaluate", help="compute HQS of a hierarchy over an items file")
    e.add_argument("--hierarchy", required=True)
    e.add_argument("--items", required=True)
    e.add_argument("--similarity", choices=[k.value for k in SimilarityKind], default=SimilarityKind.AVG_COSINE.value)
    e.add_argument("--delta", type=float, default=0.01, help="base temperature (default 0.01)")
    e.add_argument("--nu", type=float, default=1.0, help="per-depth temperature growth (default 1)")
    e.add_argument("--sample-frac", type=float, default=1.0)
    e.add_argument("--seed", type=int, default=None, help="sampling seed (default 0 when sampling)")
    e.add_argument("--workers", type=_positive_int, default=None, help="default: available CPUs")
    e.add_argument("--out", help="report path; omitted means summary line only")
    e.add_argument("--format", choices=["json", "csv"], default="json")
    e.add_argument("--summary-only", action="store_true", help="omit per-item traces from a JSON report")
    e.add_argument("--timing", action="store_true", help="record wall time in the report (makes it run-dependent)")

    h = sub.add_parser("hai", help="hierarchical agreement index of A against reference B")
    h.add_argument("a")
    h.add_argument("b")

    b = sub.add_parser("build-ac", help="average-link agglomerative hierarchy from an items file")
    b.add_argument("--items", required=True)
    b.add_argument("--out", required=True)

    r = sub.add_parser("analyze-reward", help="value-versus-depth curve of the constant-guidance model")
    r.add_argument("--gamma", type=float, required=True)
    g = r.add_mutually_exclusive_group(required=True)
    g.add_argument("--g", type=float)
    g.add_argument("--optimal-g", action="store_true")
    r.add_argument("--grid", type=_grid, default=_grid("0:10:0.5"), help="start:stop:step (default 0:10:0.5)")
    r.add_argument("--out", help="CSV path; default stdout")
    return p


def cmd_evaluate(args) -> int:
    h = load_hierarchy(args.hierarchy)
    cat = load_items(args.items)
    if not 0.0 < args.sample_frac <= 1.0:
        raise UsageError(f"--sample-frac must lie in (0, 1], got {args.sample_frac}")
    try:
        sched = TemperatureSchedule(args.delta, args.nu)
    except ValueError as e:
        raise UsageError(str(e)) from e
    cfg = PomdpConfig(sched, SimilarityKind(args.similarity))
    ev = Evaluator(h, cat, cfg)
    workers = args.workers or default_workers()
    if args.sample_frac < 1.0:
        seed = 0 if args.seed is None else args.seed
        report = ev.sampled(args.sample_frac, seed, workers)
    else:
        report = ev.report(cat.ids, 1.0, args.seed, workers)
    if args.out:
        if args.format == "csv":
            text = report.to_csv()
        else:
            text = report.to_json(include_items=not args.summary_only, include_time=args.timing)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    print(f"HQS={report.hqs!r} over {report.n_items_evaluated}/{report.n_items_total} items")
    return EXIT_OK


def cmd_hai(args) -> int:
    res = hai(load_hierarchy(args.a), load_hierarchy(args.b))
    print(f"HAI={res.hai!r}")
    return EXIT_OK


def cmd_build_ac(args) -> int:
    h = build_average_link_hierarchy(load_items(args.items))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(h.to_json())
        fh.write("\n")
    print(f"wrote {h.node_count} nodes over {h.n_items} items (height {h.height}) to {args.out}")
    return EXIT_OK


def cmd_analyze_reward(args) -> int:
    g = optimal_g() if args.optimal_g else args.g
    try:
        p = AnalysisParams(args.gamma, g)
    except ValueError as e:
        raise UsageError(str(e)) from e
    fh = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ell", "value"])
        for ell, v in value_curve(p, args.grid):
            w.writerow([repr(ell), repr(v)])
    finally:
        if args.out:
            fh.close()
    if args.out:
        ell = optimal_depth(p) if g > 0 else None
        print(f"g={g!r} ell_opt={'none' if ell is None else repr(ell)}")
    return EXIT_OK


COMMANDS = {
    "evaluate": cmd_evaluate,
    "hai": cmd_hai,
    "build-ac": cmd_build_ac,
    "analyze-reward": cmd_analyze_reward,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    sys.setrecursionlimit(max(sys.getrecursionlimit(), _RECURSION_LIMIT))
    try:
        return COMMANDS[args.command](args)
    except (HierarchyError, CorpusError, UsageError, OSError) as e:
        print(f"hqs: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (FloatingPointError, OverflowError) as e:
        print(f"hqs: numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
