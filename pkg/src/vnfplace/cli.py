"""Command-line driver.

Single-shot mode (no ``--z``): run the chosen algorithms once on the instance
as loaded (its own demands and capacities) and print the processed traffic.
Sweep mode (``--z`` given): regenerate demands per seed, stretch capacities
per z value, and write the per-cell CSV.

Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .errors import VnfPlaceError
from .experiment import ALGORITHMS, ExperimentConfig, records_to_csv, run_sweep
from .model import (
    compute_paths,
    line_topology,
    load_instance,
    random_topology,
    ring_topology,
)

_TOPOLOGIES = {
    "line": line_topology,
    "ring": ring_topology,
    "random": random_topology,
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vnfplace",
        description="Place VNF nodes and allocate traffic; optionally sweep "
        "capacity stretch and budget, writing results as CSV.",
    )
    src = p.add_argument_group("instance source")
    src.add_argument("--instance", metavar="PATH", help="instance file to load")
    src.add_argument(
        "--format",
        choices=["json", "sndlib"],
        default="json",
        help="instance file format (default: json)",
    )
    src.add_argument(
        "--capacity-config",
        metavar="PATH",
        help="companion JSON with resources/capacities/functions for formats "
        "that carry only topology and rates",
    )
    src.add_argument("--generate", action="store_true", help="generate a synthetic instance")
    src.add_argument("--nodes", type=int, metavar="N", help="generator: node count")
    src.add_argument("--flows", type=int, metavar="F", help="generator: flow count")
    src.add_argument("--topology", choices=sorted(_TOPOLOGIES), help="generator: shape")

    run = p.add_argument_group("run parameters")
    run.add_argument(
        "--budget", default="1", metavar="K[,K...]", help="placement budgets (default: 1)"
    )
    run.add_argument("--z", metavar="Z[,Z...]", help="capacity stretch values; enables sweep mode")
    run.add_argument(
        "--algorithm",
        default="ssg-pra",
        metavar="LIST",
        help=f"comma-separated subset of {{{','.join(ALGORITHMS)}}} (default: ssg-pra)",
    )
    run.add_argument("--seed", default="0", metavar="S[,S...]", help="demand seeds (default: 0)")
    run.add_argument(
        "--demand-range",
        default="0:20",
        metavar="LO:HI",
        help="uniform per-unit demand range for regenerated demands (default: 0:20)",
    )
    run.add_argument("--resources", type=int, default=2, metavar="R", help="resource count (default: 2)")
    run.add_argument(
        "--path-metric",
        choices=["cost", "hops"],
        default="cost",
        help="shortest-path metric when paths must be computed (default: cost)",
    )
    run.add_argument("--output", metavar="PATH", help="CSV output path (default: stdout)")
    return p


def _split_ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t)


def _split_floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t)


def _load(args) -> tuple[object, str]:
    if args.instance and args.generate:
        raise ValueError("--instance and --generate are mutually exclusive")
    metric = "routing_cost" if args.path_metric == "cost" else "hop_count"
    if args.instance:
        fmt = "sndlib_native" if args.format == "sndlib" else "json"
        inst = load_instance(args.instance, format=fmt, capacity_config=args.capacity_config)
        if any(not f.path for f in inst.flows):
            inst = compute_paths(inst, metric)
        return inst, args.instance
    if args.generate:
        if not (args.nodes and args.flows and args.topology):
            raise ValueError("--generate requires --nodes, --flows and --topology")
        inst = _TOPOLOGIES[args.topology](args.nodes, args.flows)
        if metric != "routing_cost":
            inst = compute_paths(inst, metric)
        return inst, f"{args.topology}-{args.nodes}n-{args.flows}f"
    raise ValueError("provide --instance PATH or --generate with generator params")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        instance, instance_id = _load(args)
        budgets = _split_ints(args.budget)
        seeds = _split_ints(args.seed)
        algorithms = tuple(a.strip() for a in args.algorithm.split(",") if a.strip())
        lo, _, hi = args.demand_range.partition(":")
        demand_range = (float(lo), float(hi))
        z_values = _split_floats(args.z) if args.z else ()
        config = ExperimentConfig(
            instance=instance,
            instance_id=instance_id,
            budgets=budgets,
            z_values=z_values,
            algorithms=algorithms,
            seeds=seeds,
            demand_range=demand_range,
            num_resources=args.resources,
            regenerate_demands=bool(z_values),
            output=None,
        )
    except (ValueError, VnfPlaceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        records = run_sweep(config)
        if config.regenerate_demands or args.output:
            text = records_to_csv(records)
            if args.output:
                with open(args.output, "w", newline="") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        else:
            for r in records:
                print(
                    f"{r.algorithm} k={r.k}: processed {r.processed:.9g} of "
                    f"{r.total:.9g} ({r.pct:.4f}) on [{','.join(r.placed_nodes)}]"
                    + ("" if r.status == "ok" else f" [{r.status}]")
                )
        bad = [r for r in records if r.status != "ok"]
        if bad:
            print(f"warning: {len(bad)} cell(s) failed", file=sys.stderr)
    except VnfPlaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
