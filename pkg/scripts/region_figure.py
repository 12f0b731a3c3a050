#!/usr/bin/env python3
"""Stability-region boundary curves for one parameter set.

Writes the controlled boundary plus time-sharing and state-oblivious
baselines into the shared CSV schema, optionally adds grid-oracle rows, and
optionally renders a PNG when matplotlib is available.

Example:
    python3 scripts/region_figure.py --pi1 0.6 --pi2 0.6 --oracle --plot region.png
"""

import argparse
import sys

import numpy as np

from aloha_ge import (
    SystemParams,
    boundary_value,
    closed_form_boundary,
    from_stationary,
    grid_union_boundary,
    tdma_boundary,
    uncontrolled_boundary,
)
from aloha_ge.oracle import boundary_csv_rows


def build_rows(params: SystemParams, samples: int, oracle: bool, grid_n: int):
    boundary = closed_form_boundary(params)
    xs = np.linspace(0.0, boundary.lambda1_max, samples, endpoint=False)
    rows = []
    for x in xs:
        x = float(x)
        kind = "linear"
        for seg in boundary.segments:
            if seg.lambda1_lo <= x < seg.lambda1_hi:
                kind = seg.kind
                break
        rows.append((x, boundary_value(boundary, x), kind, "controlled"))
    for x in xs:
        x = float(x)
        rows.append((x, tdma_boundary(params, x), "linear", "tdma"))
    for x in xs:
        x = float(x)
        rows.append((x, uncontrolled_boundary(params, x), "sqrt", "uncontrolled"))
    if oracle:
        gb = grid_union_boundary(params, grid_n=grid_n, lambda1_samples=samples)
        rows.extend(boundary_csv_rows(gb))
    return boundary, rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pi1", type=float, default=0.6, help="good-state fraction, user 1")
    ap.add_argument("--pi2", type=float, default=0.6, help="good-state fraction, user 2")
    ap.add_argument("--f11", type=float, default=1.0)
    ap.add_argument("--f12", type=float, default=1.0)
    ap.add_argument("--mpr1", type=float, default=0.0)
    ap.add_argument("--mpr2", type=float, default=0.0)
    ap.add_argument("--samples", type=int, default=400)
    ap.add_argument("--oracle", action="store_true", help="add grid-search oracle rows")
    ap.add_argument("--grid-n", type=int, default=200)
    ap.add_argument("--out", default="region.csv")
    ap.add_argument("--plot", default=None, help="optional PNG path")
    args = ap.parse_args(argv)

    params = SystemParams(
        channel1=from_stationary(args.pi1),
        channel2=from_stationary(args.pi2),
        f11=args.f11,
        f12=args.f12,
        mpr1=args.mpr1,
        mpr2=args.mpr2,
    )
    boundary, rows = build_rows(params, args.samples, args.oracle, args.grid_n)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("lambda1,lambda2,segment_kind,source\n")
        for x, y, kind, source in rows:
            fh.write(f"{x:.12g},{y:.12g},{kind},{source}\n")
    print(f"shape_class={boundary.shape_class.value} lambda1_max={boundary.lambda1_max:.6g}")
    print(f"wrote {len(rows)} rows to {args.out}")

    if args.plot:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib not available, skipping plot", file=sys.stderr)
            return 0
        fig, ax = plt.subplots(figsize=(5.5, 4.5))
        for source, style in (
            ("controlled", "-"),
            ("tdma", "--"),
            ("uncontrolled", ":"),
        ):
            pts = [(x, y) for x, y, _, s in rows if s == source]
            ax.plot(*zip(*pts), style, label=source)
        oracle_pts = [(x, y) for x, y, _, s in rows if s == "grid_oracle"]
        if oracle_pts:
            ax.plot(*zip(*oracle_pts), ".", ms=3, alpha=0.5, label="grid oracle")
        ax.set_xlabel("lambda1")
        ax.set_ylabel("lambda2")
        ax.set_title(
            f"pi1={args.pi1}, pi2={args.pi2}, f=({args.f11},{args.f12}), "
            f"mpr=({args.mpr1},{args.mpr2})"
        )
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"wrote plot to {args.plot}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
