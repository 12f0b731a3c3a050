"""Command-line front end: region/delay curves, simulation runs, verification.

Scenario files are JSON (see model.scenario_from_dict for the schema); every
command accepts repeated --set dotted.path=value overrides so sweeps can be
scripted without editing files.  CSV output uses 12 significant digits, '.'
decimals and LF line endings so files are bit-stable across platforms.

Exit codes: 0 success, 1 verification failure, 2 invalid scenario or usage,
3 output write failure.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import verify as verify_mod
from .channel import stationary_distribution
from .delay import (
    SymmetricParams,
    Unstable,
    average_delay,
    lambda_max,
    optimal_q11,
)
from .model import (
    ArrivalRates,
    Policy,
    Scenario,
    ScenarioError,
    apply_overrides,
    scenario_from_dict,
)
from .sim import SimConfig, SimMode, run
from .stability import (
    DegenerateService,
    RegionBoundary,
    boundary_value,
    closed_form_boundary,
    tdma_boundary,
    uncontrolled_boundary,
)


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


def _thread_count() -> int:
    env = os.environ.get("ALOHA_GE_THREADS", "")
    if env.strip():
        try:
            n = int(env)
        except ValueError:
            raise click.UsageError(
                f"ALOHA_GE_THREADS must be an integer, got {env!r}"
            )
        if n < 1:
            raise click.UsageError("ALOHA_GE_THREADS must be positive")
        return n
    return min(8, os.cpu_count() or 1)


def _load_scenario(path: str, overrides: tuple[str, ...]) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise click.UsageError(f"cannot read scenario file: {exc}")
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"scenario file is not valid JSON: {exc}")
    try:
        if overrides:
            data = apply_overrides(data, overrides)
        return scenario_from_dict(data)
    except (ScenarioError, ValueError) as exc:
        raise click.UsageError(f"invalid scenario: {exc}")


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        click.echo(f"error: cannot write {path}: {exc}", err=True)
        sys.exit(3)


def _echo_or_write(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        _write_text(out, text)


def _segment_kind_at(boundary: RegionBoundary, x: float) -> str:
    for seg in boundary.segments:
        if seg.lambda1_lo <= x < seg.lambda1_hi:
            return seg.kind
    return boundary.segments[-1].kind


_SET_HELP = "Override one scenario field, e.g. --set f11=0.9 or --set channel1.p_b2g=0.3"


@click.group()
def main() -> None:
    """Stability regions and delay curves for two-user controlled random access."""


@main.command("region")
@click.argument("scenario_file", type=click.Path(dir_okay=False))
@click.option("--samples", default=256, show_default=True, help="Boundary sample count.")
@click.option("--baselines", is_flag=True, help="Add time-sharing and state-oblivious rows.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV path (stdout if omitted).")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help=_SET_HELP)
def cmd_region(scenario_file, samples, baselines, out, overrides) -> None:
    """Export the optimal-control stability boundary as CSV."""
    scenario = _load_scenario(scenario_file, overrides)
    if samples < 1:
        raise click.UsageError("--samples must be positive")
    try:
        boundary = closed_form_boundary(scenario.system)
    except DegenerateService as exc:
        raise click.UsageError(f"degenerate scenario: {exc}")
    xs = np.linspace(0.0, boundary.lambda1_max, samples, endpoint=False)
    lines = ["lambda1,lambda2,segment_kind,source"]
    for x in xs:
        x = float(x)
        y = boundary_value(boundary, x)
        lines.append(f"{_fmt(x)},{_fmt(y)},{_segment_kind_at(boundary, x)},controlled")
    if baselines:
        for x in xs:
            x = float(x)
            lines.append(f"{_fmt(x)},{_fmt(tdma_boundary(scenario.system, x))},linear,tdma")
        for x in xs:
            x = float(x)
            lines.append(
                f"{_fmt(x)},{_fmt(uncontrolled_boundary(scenario.system, x))},sqrt,uncontrolled"
            )
    _echo_or_write("\n".join(lines) + "\n", out)
    if out is not None:
        summary = {
            "shape_class": boundary.shape_class.value,
            "lambda1_max": boundary.lambda1_max,
            "segments": [
                {"kind": s.kind, "lambda1_lo": s.lambda1_lo, "lambda1_hi": s.lambda1_hi}
                for s in boundary.segments
            ],
            "csv": out,
        }
        click.echo(json.dumps(summary, indent=2, sort_keys=True))


def _parse_sweep(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise click.UsageError("--lambda-sweep must be start:stop:count")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise click.UsageError(f"bad --lambda-sweep value: {exc}")
    if n < 1 or a < 0.0 or b < a:
        raise click.UsageError("--lambda-sweep needs 0 <= start <= stop and count >= 1")
    return np.linspace(a, b, n)


@main.command("delay")
@click.argument("scenario_file", type=click.Path(dir_okay=False))
@click.option("--lambda-sweep", "sweep", default=None, metavar="A:B:N",
              help="Per-user arrival rates to evaluate (default 0 to 0.96*lambda_max, 25 points).")
@click.option("--simulate", is_flag=True, help="Add simulated delay and CI columns.")
@click.option("--horizon", default=2_000_000, show_default=True)
@click.option("--warmup", default=100_000, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV path (stdout if omitted).")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help=_SET_HELP)
def cmd_delay(scenario_file, sweep, simulate, horizon, warmup, seed, out, overrides) -> None:
    """Optimal transmit probability and mean delay across arrival rates.

    The scenario must be symmetric (identical channels and success
    probabilities, no joint-success capability); rates at or above the
    stabilizable maximum get status=unstable and empty value columns.
    """
    scenario = _load_scenario(scenario_file, overrides)
    system = scenario.system
    if (
        system.channel1 != system.channel2
        or system.f11 != system.f12
        or system.mpr1 != 0.0
        or system.mpr2 != 0.0
    ):
        raise click.UsageError(
            "delay analysis needs a symmetric scenario: identical channels, "
            "f11 == f12, and no joint-success capability"
        )
    pi1 = stationary_distribution(system.channel1).pi1
    if pi1 <= 0.0 or system.f11 <= 0.0:
        raise click.UsageError("degenerate scenario: a user can never succeed")
    lam_cap = lambda_max(SymmetricParams(pi1, system.f11, 0.0))
    lams = _parse_sweep(sweep) if sweep else np.linspace(0.0, 0.96 * lam_cap, 25)

    rows: list[dict] = []
    for idx, lam in enumerate(lams):
        lam = float(lam)
        row = {"idx": idx, "lambda": lam, "q_star": None, "analytic": None,
               "simulated": None, "ci95": None, "status": "ok"}
        p = SymmetricParams(pi1, system.f11, lam)
        try:
            q_star = optimal_q11(p)
            analytic = average_delay(p, q_star)
        except (Unstable, ValueError):
            row["status"] = "unstable"
        else:
            row["q_star"] = q_star
            row["analytic"] = analytic
        rows.append(row)

    if simulate:
        jobs = [r for r in rows if r["status"] == "ok" and r["lambda"] > 0.0]

        def run_one(row: dict) -> None:
            cfg = SimConfig(
                system=system,
                policy=Policy(q11=row["q_star"], q12=row["q_star"]),
                arrivals=ArrivalRates(row["lambda"], row["lambda"]),
                horizon=horizon,
                warmup=warmup,
                seed=seed + row["idx"],
                mode=SimMode.ORIGINAL,
            )
            stats = run(cfg)
            d1, d2 = stats.mean_delay1, stats.mean_delay2
            if d1 is not None and d2 is not None:
                row["simulated"] = (d1 + d2) / 2.0
            else:
                row["simulated"] = d1 if d1 is not None else d2
            row["ci95"] = stats.delay_ci95

        with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
            list(pool.map(run_one, jobs))

    lines = ["lambda,q_star,delay_analytic,delay_simulated,ci95,status"]
    for row in rows:
        lines.append(
            ",".join(
                [
                    _fmt(row["lambda"]),
                    _fmt(row["q_star"]),
                    _fmt(row["analytic"]),
                    _fmt(row["simulated"]),
                    _fmt(row["ci95"]),
                    row["status"],
                ]
            )
        )
    _echo_or_write("\n".join(lines) + "\n", out)


@main.command("simulate")
@click.argument("scenario_file", type=click.Path(dir_okay=False))
@click.option("--mode", default="original", show_default=True,
              type=click.Choice([m.value for m in SimMode]))
@click.option("--horizon", default=100_000, show_default=True)
@click.option("--warmup", default=0, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="JSON path (stdout if omitted).")
@click.option("--event-log", type=click.Path(dir_okay=False), default=None,
              help="Write a per-slot CSV event log (large: one row per slot).")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help=_SET_HELP)
def cmd_simulate(scenario_file, mode, horizon, warmup, seed, out, event_log, overrides) -> None:
    """Run one slot-level simulation and print summary statistics as JSON."""
    scenario = _load_scenario(scenario_file, overrides)
    if scenario.policy is None:
        raise click.UsageError("scenario must include a policy for simulation")
    arrivals = scenario.arrivals or ArrivalRates(0.0, 0.0)
    cfg = SimConfig(
        system=scenario.system,
        policy=scenario.policy,
        arrivals=arrivals,
        horizon=horizon,
        warmup=warmup,
        seed=seed,
        mode=SimMode(mode),
    )
    try:
        stats = run(cfg, event_log=event_log)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    except OSError as exc:
        click.echo(f"error: cannot write {event_log}: {exc}", err=True)
        sys.exit(3)
    text = json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n"
    _echo_or_write(text, out)


@main.command("verify")
@click.option("--suite", default="all", show_default=True,
              type=click.Choice(sorted(verify_mod.SUITES)))
@click.option("--budget", default="quick", show_default=True,
              type=click.Choice(["quick", "full"]))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Also write the JSON report to this path.")
def cmd_verify(suite, budget, out) -> None:
    """Run the verification battery; exit 0 only if every check passes."""
    results = []
    for criterion in verify_mod.SUITES[suite]:
        result = verify_mod.run_check(criterion, budget)
        flag = "PASS" if result.passed else "FAIL"
        click.echo(
            f"[{flag}] criterion {result.criterion}: {result.name} "
            f"({result.seconds:.1f}s)\n       {result.detail}",
            err=True,
        )
        results.append(result)
    report = {
        "suite": suite,
        "budget": budget,
        "all_passed": all(r.passed for r in results),
        "results": [
            {
                "criterion": r.criterion,
                "name": r.name,
                "passed": r.passed,
                "detail": r.detail,
                "seconds": round(r.seconds, 3),
            }
            for r in results
        ],
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    click.echo(text, nl=False)
    if out is not None:
        _write_text(out, text)
    if not report["all_passed"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
