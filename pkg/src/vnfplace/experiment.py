"""Sweep harness: run placement + allocation combinations over a grid of
demand seeds, capacity stretches and budgets, and persist one CSV row per
cell.  Records appear in deterministic cartesian order (seeds, then stretch
values, then budgets, then algorithms); per-cell failures land in the
``status`` column instead of aborting the sweep.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import integral, oracle, placement
from .errors import VnfPlaceError
from .model import Instance, generate_demands

__all__ = [
    "ALGORITHMS",
    "CSV_HEADER",
    "ExperimentConfig",
    "RunRecord",
    "run_sweep",
    "records_to_csv",
]

ALGORITHMS = ("ssg-pra", "ssg-nra", "sg-pra", "sg-nra", "optimal")
CSV_HEADER = (
    "instance,algorithm,k,z,seed,processed,total,pct,runtime_ms,placed_nodes,status"
)


@dataclass(frozen=True)
class ExperimentConfig:
    instance: Instance                      # base topology (paths already set)
    instance_id: str
    budgets: tuple[int, ...]
    z_values: tuple[float, ...]             # capacity stretch per cell; empty = keep as-is
    algorithms: tuple[str, ...]
    seeds: tuple[int, ...] = (0,)
    demand_range: tuple[float, float] = (0.0, 20.0)
    num_resources: int = 2
    regenerate_demands: bool = True         # False: use the instance's own demands/capacities
    output: Optional[str] = None

    def __post_init__(self):
        if not self.budgets or not self.algorithms:
            raise ValueError("budgets and algorithms must be non-empty")
        if self.regenerate_demands and not self.z_values:
            raise ValueError("z_values must be non-empty when regenerating demands")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        for z in self.z_values:
            if z <= 1.0:
                raise ValueError("capacity stretch values must exceed 1")
        if any(k < 1 for k in self.budgets):
            raise ValueError("budgets must be >= 1")


@dataclass(frozen=True)
class RunRecord:
    instance_id: str
    algorithm: str
    k: int
    z: float
    seed: int
    processed: float
    total: float
    pct: float
    runtime_ms: float
    placed_nodes: tuple[str, ...]
    status: str = "ok"


def _fmt(x: float) -> str:
    return "%.9g" % x


def _record_row(r: RunRecord) -> list[str]:
    return [
        r.instance_id,
        r.algorithm,
        str(r.k),
        _fmt(r.z),
        str(r.seed),
        _fmt(r.processed),
        _fmt(r.total),
        _fmt(r.pct),
        _fmt(r.runtime_ms),
        ";".join(r.placed_nodes),
        r.status,
    ]


def records_to_csv(records: Sequence[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER.split(","))
    for r in records:
        w.writerow(_record_row(r))
    return buf.getvalue()


def _run_cell(
    instance: Instance,
    algorithm: str,
    k: int,
    placements: dict,
) -> tuple[float, tuple[str, ...]]:
    """Returns (processed traffic, placed nodes) for one algorithm on one
    fully-specified instance.  ``placements`` caches greedy placements per
    (style, k) so pra/nra variants share the placement work."""
    if algorithm == "optimal":
        res = oracle.optimal_exact(instance, k)
        return res.value, tuple(sorted(res.nodes))
    style, alloc = algorithm.split("-")
    key = (style, k)
    if key not in placements:
        fn = placement.ssg if style == "ssg" else placement.sg
        placements[key] = fn(instance, k)
    placed = placements[key]
    norm = integral.normalize(instance, placed.sequence)
    if alloc == "pra":
        assign = integral.pra(instance, norm, placed.sequence)
    else:
        assign = integral.nra(instance, norm, placed.sequence, order=placed.sequence)
    return integral.processed_traffic(instance, assign), placed.sequence


def run_sweep(config: ExperimentConfig) -> list[RunRecord]:
    records: list[RunRecord] = []
    z_axis = config.z_values if config.regenerate_demands else (config.z_values or (0.0,))
    for seed in config.seeds:
        for z in z_axis:
            if config.regenerate_demands:
                inst = generate_demands(
                    config.instance,
                    config.demand_range,
                    config.num_resources,
                    z,
                    seed,
                )
            else:
                inst = config.instance
            total = sum(f.rate for f in inst.flows)
            placements: dict = {}
            for k in config.budgets:
                for algorithm in config.algorithms:
                    t0 = time.perf_counter()
                    try:
                        processed, placed = _run_cell(inst, algorithm, k, placements)
                        status = "ok"
                    except VnfPlaceError as exc:
                        processed, placed = 0.0, ()
                        status = type(exc).__name__
                    runtime_ms = (time.perf_counter() - t0) * 1000.0
                    pct = processed / total if total > 0 else 0.0
                    records.append(
                        RunRecord(
                            config.instance_id,
                            algorithm,
                            k,
                            z,
                            seed,
                            processed,
                            total,
                            pct,
                            runtime_ms,
                            placed,
                            status,
                        )
                    )
    if config.output:
        with open(config.output, "w", newline="") as fh:
            fh.write(records_to_csv(records))
    return records
