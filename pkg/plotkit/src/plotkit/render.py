"""Turn an experiment-sweep CSV into per-budget trend panels.

The input is the CSV written by the ``vnfplace`` sweep driver: one row per
(seed, z, k, algorithm) cell with a ``pct`` column holding the fraction of
total traffic processed.  Rendering groups rows by budget ``k`` (one panel
each) and algorithm (one series each), plots the chosen metric against the
capacity stretch ``z`` as the mean over seeds, and adds min/max whiskers to
show seed variance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyInput, SchemaMismatch

REQUIRED_COLUMNS = ("algorithm", "k", "z", "seed")


@dataclass(frozen=True)
class Point:
    z: float
    mean: float
    low: float
    high: float
    n_seeds: int


@dataclass(frozen=True)
class Panel:
    k: int
    series: dict[str, tuple[Point, ...]]  # algorithm -> points sorted by z


@dataclass(frozen=True)
class PlotSpec:
    inputs: tuple[str, ...]
    output: str
    metric: str = "pct"

    def __post_init__(self):
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        fmt = Path(self.output).suffix.lstrip(".").lower()
        if fmt not in ("png", "svg"):
            raise ValueError(f"unsupported output format {fmt!r} (use png or svg)")


def read_rows(paths) -> list[dict[str, str]]:
    """Read and concatenate CSV rows, validating each file's header."""
    rows: list[dict[str, str]] = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in REQUIRED_COLUMNS if c not in header]
            if missing:
                raise SchemaMismatch(
                    f"{path}: missing column(s) {', '.join(missing)}"
                )
            rows.extend(reader)
    if not rows:
        raise EmptyInput("no data rows in input CSV(s)")
    return rows


def build_panels(rows, metric: str = "pct") -> list[Panel]:
    """Aggregate rows into one panel per budget with per-algorithm series.

    Each series point is the mean of ``metric`` over seeds at a given z,
    with min/max kept for whiskers.  Rows whose status column (if present)
    is not "ok" are skipped, since their metric is not meaningful.
    """
    if rows and metric not in rows[0]:
        raise SchemaMismatch(f"missing column(s) {metric}")
    samples: dict[tuple[int, str, float], list[float]] = {}
    for row in rows:
        if row.get("status", "ok") != "ok":
            continue
        try:
            key = (int(row["k"]), row["algorithm"], float(row["z"]))
            value = float(row[metric])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaMismatch(f"unparsable row {row!r}") from exc
        samples.setdefault(key, []).append(value)
    if not samples:
        raise EmptyInput("all rows carry a failure status; nothing to plot")
    panels: dict[int, dict[str, list[Point]]] = {}
    for (k, alg, z), vals in sorted(samples.items()):
        point = Point(
            z=z,
            mean=sum(vals) / len(vals),
            low=min(vals),
            high=max(vals),
            n_seeds=len(vals),
        )
        panels.setdefault(k, {}).setdefault(alg, []).append(point)
    return [
        Panel(k=k, series={a: tuple(pts) for a, pts in series.items()})
        for k, series in sorted(panels.items())
    ]


def render(spec: PlotSpec) -> list[Panel]:
    """Render the spec to an image file and return the plotted structure."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    panels = build_panels(read_rows(spec.inputs), spec.metric)
    fig, axes = plt.subplots(
        1, len(panels), figsize=(4.2 * len(panels), 3.4), squeeze=False, sharey=True
    )
    for ax, panel in zip(axes[0], panels):
        for alg, points in sorted(panel.series.items()):
            xs = [p.z for p in points]
            ys = [p.mean for p in points]
            yerr = [
                [p.mean - p.low for p in points],
                [p.high - p.mean for p in points],
            ]
            ax.errorbar(xs, ys, yerr=yerr, marker="o", capsize=3, label=alg)
        ax.set_title(f"k = {panel.k}")
        ax.set_xlabel("capacity stretch z")
        ax.grid(True, alpha=0.3)
    axes[0][0].set_ylabel(spec.metric)
    if spec.metric == "pct":
        axes[0][0].set_ylim(0.0, 1.05)
    axes[0][-1].legend(loc="lower right", fontsize="small")
    fig.tight_layout()
    fig.savefig(spec.output)
    plt.close(fig)
    return panels
