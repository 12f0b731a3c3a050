#!/usr/bin/env python3
"""Delay-vs-load curve for the symmetric system under the optimal policy.

Sweeps the per-user arrival rate up to a fraction of the stabilizable
maximum, reports the optimal good-state transmit probability and the
closed-form mean delay, optionally overlays simulated delays, and optionally
renders a PNG when matplotlib is available.

Example:
    python3 scripts/delay_figure.py --pi1 0.6 --simulate --plot delay.png
"""

import argparse
import sys

import numpy as np

from aloha_ge import (
    ArrivalRates,
    Policy,
    SimConfig,
    SimMode,
    SymmetricParams,
    SystemParams,
    average_delay,
    from_stationary,
    lambda_max,
    optimal_q11,
    run,
)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pi1", type=float, default=0.6, help="good-state fraction")
    ap.add_argument("--f11", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=30)
    ap.add_argument("--max-frac", type=float, default=0.95,
                    help="sweep up to this fraction of the stabilizable maximum")
    ap.add_argument("--simulate", action="store_true")
    ap.add_argument("--horizon", type=int, default=1_000_000)
    ap.add_argument("--warmup", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="delay.csv")
    ap.add_argument("--plot", default=None, help="optional PNG path")
    args = ap.parse_args(argv)

    cap = lambda_max(SymmetricParams(args.pi1, args.f11, 0.0))
    lams = np.linspace(0.0, args.max_frac * cap, args.points)
    system = SystemParams(
        channel1=from_stationary(args.pi1),
        channel2=from_stationary(args.pi1),
        f11=args.f11,
        f12=args.f11,
    )

    rows = []
    for i, lam in enumerate(lams):
        lam = float(lam)
        p = SymmetricParams(args.pi1, args.f11, lam)
        q_star = optimal_q11(p)
        analytic = average_delay(p, q_star)
        simulated = ci = None
        if args.simulate and lam > 0.0:
            stats = run(
                SimConfig(
                    system=system,
                    policy=Policy(q11=q_star, q12=q_star),
                    arrivals=ArrivalRates(lam, lam),
                    horizon=args.horizon,
                    warmup=args.warmup,
                    seed=args.seed + i,
                    mode=SimMode.ORIGINAL,
                )
            )
            if stats.mean_delay1 is not None and stats.mean_delay2 is not None:
                simulated = 0.5 * (stats.mean_delay1 + stats.mean_delay2)
                ci = stats.delay_ci95
        rows.append((lam, q_star, analytic, simulated, ci))

    def fmt(x):
        return "" if x is None else f"{x:.12g}"

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("lambda,q_star,delay_analytic,delay_simulated,ci95\n")
        for lam, q_star, analytic, simulated, ci in rows:
            fh.write(f"{fmt(lam)},{fmt(q_star)},{fmt(analytic)},{fmt(simulated)},{fmt(ci)}\n")
    print(f"pi1={args.pi1} f11={args.f11} lambda_max={cap:.6g}")
    print(f"wrote {len(rows)} rows to {args.out}")

    if args.plot:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib not available, skipping plot", file=sys.stderr)
            return 0
        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(5.5, 6.5), sharex=True)
        ax1.plot([r[0] for r in rows], [r[2] for r in rows], "-", label="closed form")
        sim_pts = [(r[0], r[3], r[4]) for r in rows if r[3] is not None]
        if sim_pts:
            xs, ys, cis = zip(*sim_pts)
            ax1.errorbar(xs, ys, yerr=cis, fmt=".", capsize=2, label="simulated")
        ax1.set_ylabel("mean delay (slots)")
        ax1.legend()
        ax2.plot([r[0] for r in rows], [r[1] for r in rows], "-")
        ax2.set_ylabel("optimal q11")
        ax2.set_xlabel("per-user arrival rate")
        ax2.set_ylim(0.0, 1.05)
        fig.suptitle(f"pi1={args.pi1}, f11={args.f11}")
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"wrote plot to {args.plot}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
