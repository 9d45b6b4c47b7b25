"""``plot`` command line entry point."""

from __future__ import annotations

import argparse
import sys

from .errors import PlotkitError
from .render import PlotSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render an experiment-sweep CSV into per-budget trend panels.",
    )
    parser.add_argument(
        "--input",
        action="append",
        required=True,
        metavar="CSV",
        help="input CSV; repeat to concatenate several sweeps",
    )
    parser.add_argument(
        "--out", required=True, metavar="IMAGE", help="output image (.png or .svg)"
    )
    parser.add_argument(
        "--metric",
        default="pct",
        metavar="COLUMN",
        help="CSV column to plot on the y axis (default: pct)",
    )
    args = parser.parse_args(argv)
    try:
        spec = PlotSpec(tuple(args.input), args.out, args.metric)
        panels = render(spec)
    except (PlotkitError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    series = sum(len(p.series) for p in panels)
    print(f"wrote {args.out}: {len(panels)} panel(s), {series} series")
    return 0


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
