#!/usr/bin/env python3
"""Render a ``plotdata.csv`` as a log-scale bar chart (needs matplotlib).

    python3 scripts/plot_sobol.py runs/latest/joint/plotdata.csv --top 30 -o sobol.png
"""

from __future__ import annotations

import argparse
import csv
import sys


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("plotdata")
    p.add_argument("--top", type=int, default=30, help="number of index sets to show")
    p.add_argument("-o", "--output", default="sobol.png")
    args = p.parse_args(argv)
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is required: pip install 'artifact[plot]'", file=sys.stderr)
        return 2

    with open(args.plotdata, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.DictReader(fh) if float(r["index"]) > 0][: args.top]
    labels = [r["u"] for r in rows]
    values = [float(r["index"]) for r in rows]
    colors = ["tab:blue" if r["order"] == "1" else "tab:orange" for r in rows]
    fig, ax = plt.subplots(figsize=(max(6, 0.3 * len(rows)), 4))
    ax.bar(range(len(rows)), values, color=colors)
    ax.set_yscale("log")
    ax.set_xticks(range(len(rows)), labels, rotation=90)
    ax.set_ylabel("Sobol index")
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
