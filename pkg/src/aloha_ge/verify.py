"""End-to-end verification battery: closed forms vs oracles vs simulation.

Each check pits an analytical result against an independent reference (dense
policy-grid maximization, brute-force minimization, or the slot simulator) on
randomized or anchored inputs, and returns a CheckResult with a pass flag and
a short numeric summary.  The "full" budget runs the complete protocol; the
"quick" budget shrinks sample counts and horizons for fast smoke runs while
keeping every tolerance identical.

All randomness is seeded, so the battery is deterministic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import delay as dl
from . import oracle, sim
from .channel import from_stationary, stationary_distribution
from .model import ArrivalRates, Policy, SystemParams
from .stability import (
    RegionBoundary,
    ShapeClass,
    _segments_basic,
    _segments_general,
    boundary_achieving_policy,
    boundary_value,
    closed_form_boundary,
    uncontrolled_boundary,
)


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str
    seconds: float


def _symmetric_system(pi1: float, f: float = 1.0) -> SystemParams:
    ch = from_stationary(pi1)
    return SystemParams(channel1=ch, channel2=ch, f11=f, f12=f)


def _sample_collision_sets(
    rng: np.random.Generator, per_class: int
) -> list[SystemParams]:
    """Random channel/f sets, half with a curved middle piece, half polygonal."""
    three: list[SystemParams] = []
    poly: list[SystemParams] = []
    while len(three) < per_class or len(poly) < per_class:
        pi1 = rng.uniform(0.08, 0.97)
        pi2 = rng.uniform(0.08, 0.97)
        f11 = rng.uniform(0.3, 1.0)
        f12 = rng.uniform(0.3, 1.0)
        params = SystemParams(
            channel1=from_stationary(pi1),
            channel2=from_stationary(pi2),
            f11=f11,
            f12=f12,
        )
        bucket = three if pi1 + pi2 > 1.0 else poly
        if len(bucket) < per_class:
            bucket.append(params)
    return three + poly


def _sample_mpr_sets(
    rng: np.random.Generator, per_class: int
) -> list[SystemParams]:
    """Random sets with nonzero simultaneous-success probabilities."""
    three: list[SystemParams] = []
    while len(three) < per_class:
        pi1, pi2 = rng.uniform(0.7, 0.97, 2)
        f11, f12 = rng.uniform(0.4, 1.0, 2)
        mpr1 = rng.uniform(0.02, 0.3) * f11
        mpr2 = rng.uniform(0.02, 0.3) * f12
        if pi2 * (1.0 - mpr1 / f11) + pi1 * (1.0 - mpr2 / f12) > 1.0:
            three.append(
                SystemParams(
                    channel1=from_stationary(pi1),
                    channel2=from_stationary(pi2),
                    f11=f11,
                    f12=f12,
                    mpr1=mpr1,
                    mpr2=mpr2,
                )
            )
    poly: list[SystemParams] = []
    while len(poly) < per_class:
        pi1, pi2 = rng.uniform(0.1, 0.9, 2)
        f11, f12 = rng.uniform(0.3, 1.0, 2)
        mpr1 = rng.uniform(0.05, 1.0) * f11
        mpr2 = rng.uniform(0.05, 1.0) * f12
        if pi2 * (1.0 - mpr1 / f11) + pi1 * (1.0 - mpr2 / f12) <= 1.0:
            poly.append(
                SystemParams(
                    channel1=from_stationary(pi1),
                    channel2=from_stationary(pi2),
                    f11=f11,
                    f12=f12,
                    mpr1=mpr1,
                    mpr2=mpr2,
                )
            )
    return three + poly


def _grid_vs_closed_form(
    sets: list[SystemParams], grid_n: int, samples: int
) -> float:
    worst = 0.0
    for params in sets:
        boundary = closed_form_boundary(params)
        gb = oracle.grid_union_boundary(
            params, grid_n=grid_n, lambda1_samples=samples
        )
        for x, y in zip(gb.lambda1, gb.lambda2):
            worst = max(worst, abs(boundary_value(boundary, float(x)) - float(y)))
    return worst


#: canned parameter sets for quick smoke runs: curved symmetric, polygonal
#: symmetric, and an asymmetric mix with imperfect good-state successes
_CANNED_SETS = (
    _symmetric_system(0.6, 1.0),
    _symmetric_system(0.4, 1.0),
    SystemParams(
        channel1=from_stationary(0.8),
        channel2=from_stationary(0.45),
        f11=0.9,
        f12=0.7,
    ),
)


def check_region_grid_collision(budget: str = "full") -> CheckResult:
    """Closed-form boundary equals the policy-grid union (no joint successes)."""
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    if budget == "full":
        sets, grid_n, samples = _sample_collision_sets(rng, 10), 400, 100
    else:
        sets, grid_n, samples = list(_CANNED_SETS), 150, 40
    worst = _grid_vs_closed_form(sets, grid_n, samples)
    elapsed = time.perf_counter() - start
    passed = worst <= 5e-3 and elapsed <= 60.0
    return CheckResult(
        1,
        "region boundary vs grid oracle (collision-only)",
        passed,
        f"max_abs_err={worst:.2e} over {len(sets)} sets "
        f"(grid_n={grid_n}, samples={samples}), elapsed={elapsed:.1f}s",
        elapsed,
    )


def check_region_grid_mpr(budget: str = "full") -> CheckResult:
    """Grid-oracle agreement with joint successes, plus exact reduction at zero."""
    start = time.perf_counter()
    rng = np.random.default_rng(202)
    per_class, grid_n, samples = (10, 400, 100) if budget == "full" else (2, 150, 40)
    sets = _sample_mpr_sets(rng, per_class)
    worst = _grid_vs_closed_form(sets, grid_n, samples)
    # with joint successes switched off, the general formulas must reproduce
    # the collision-only ones to machine precision
    reduction_sets = _sample_collision_sets(rng, 3)[:5]
    worst_red = 0.0
    for params in reduction_sets:
        pi1 = stationary_distribution(params.channel1).pi1
        pi2 = stationary_distribution(params.channel2).pi1
        segs_b, shape_b, m_b = _segments_basic(pi1, pi2, params.f11, params.f12)
        segs_g, shape_g, m_g = _segments_general(
            pi1, pi2, params.f11, params.f12, 1.0, 1.0
        )
        bb = RegionBoundary(segs_b, shape_b, m_b)
        bg = RegionBoundary(segs_g, shape_g, m_g)
        for x in np.linspace(0.0, m_b, 1000, endpoint=False):
            worst_red = max(
                worst_red,
                abs(boundary_value(bb, float(x)) - boundary_value(bg, float(x))),
            )
        if shape_b is not shape_g:
            worst_red = np.inf
    elapsed = time.perf_counter() - start
    passed = worst <= 5e-3 and worst_red <= 1e-12
    return CheckResult(
        2,
        "region boundary vs grid oracle (simultaneous successes)",
        passed,
        f"max_abs_err={worst:.2e} over {len(sets)} sets; "
        f"zero-capability reduction err={worst_red:.2e}",
        elapsed,
    )


def check_time_sharing_reduction(budget: str = "full") -> CheckResult:
    """Half-good symmetric channels with sure successes give the line x+y=1/2."""
    start = time.perf_counter()
    params = _symmetric_system(0.5, 1.0)
    boundary = closed_form_boundary(params)
    worst = 0.0
    for x in np.linspace(0.0, boundary.lambda1_max, 1000, endpoint=False):
        worst = max(worst, abs(boundary_value(boundary, float(x)) - (0.5 - float(x))))
    shape_above = closed_form_boundary(_symmetric_system(0.51)).shape_class
    shape_below = closed_form_boundary(_symmetric_system(0.49)).shape_class
    flips = (
        shape_above is ShapeClass.THREE_PIECE
        and shape_below is ShapeClass.POLYGON
    )
    elapsed = time.perf_counter() - start
    passed = worst <= 1e-12 and flips
    return CheckResult(
        3,
        "symmetric half-good channels reduce to time sharing",
        passed,
        f"max_abs_err={worst:.2e}; shape flips across the transition: {flips}",
        elapsed,
    )


def check_control_dominates(budget: str = "full") -> CheckResult:
    """Optimal control is never below state-oblivious access, strictly above
    somewhere when the bad-state fractions do not sum to one."""
    start = time.perf_counter()
    rng = np.random.default_rng(404)
    n_sets = 10 if budget == "full" else 3
    worst_violation = -np.inf
    min_best_gap = np.inf
    for _ in range(n_sets):
        pi1 = rng.uniform(0.08, 0.97)
        pi2 = rng.uniform(0.08, 0.97)
        f11 = rng.uniform(0.3, 1.0)
        f12 = rng.uniform(0.3, 1.0)
        params = SystemParams(
            channel1=from_stationary(pi1),
            channel2=from_stationary(pi2),
            f11=f11,
            f12=f12,
        )
        boundary = closed_form_boundary(params)
        gaps = []
        for x in np.linspace(0.0, boundary.lambda1_max, 1000, endpoint=False):
            gap = boundary_value(boundary, float(x)) - uncontrolled_boundary(
                params, float(x)
            )
            gaps.append(gap)
        gaps = np.asarray(gaps)
        worst_violation = max(worst_violation, float(-gaps.min()))
        if abs((1.0 - pi1) + (1.0 - pi2) - 1.0) > 1e-9:
            min_best_gap = min(min_best_gap, float(gaps.max()))
    elapsed = time.perf_counter() - start
    passed = worst_violation <= 1e-12 and min_best_gap >= 1e-6
    return CheckResult(
        4,
        "control dominates state-oblivious access",
        passed,
        f"worst_violation={worst_violation:.2e}; "
        f"smallest best-case gap={min_best_gap:.2e} over {n_sets} sets",
        elapsed,
    )


def check_saturated_rates(budget: str = "full") -> CheckResult:
    """Simulated saturated/dominant service rates match the closed forms."""
    start = time.perf_counter()
    horizon = 1_000_000 if budget == "full" else 200_000
    warmup = 10_000 if budget == "full" else 2_000

    cases = []
    # symmetric, always-transmit, sure successes when alone
    sys_a = _symmetric_system(0.6, 1.0)
    cases.append(
        (
            "saturated symmetric",
            sim.SimConfig(
                system=sys_a,
                policy=Policy(q11=1.0, q12=1.0),
                arrivals=ArrivalRates(0.0, 0.0),
                horizon=horizon,
                warmup=warmup,
                seed=501,
                mode=sim.SimMode.SATURATED_BOTH,
            ),
            (0.24, 0.24),
        )
    )
    # asymmetric with bad-state transmissions
    sys_b = SystemParams(
        channel1=from_stationary(0.7),
        channel2=from_stationary(0.5),
        f11=0.9,
        f12=0.8,
    )
    t1 = 0.3 * 0.3 + 0.7 * 0.8
    t2 = 0.5 * 0.2 + 0.5 * 0.9
    cases.append(
        (
            "saturated with bad-state transmissions",
            sim.SimConfig(
                system=sys_b,
                policy=Policy(q11=0.8, q12=0.9, q01=0.3, q02=0.2),
                arrivals=ArrivalRates(0.0, 0.0),
                horizon=horizon,
                warmup=warmup,
                seed=502,
                mode=sim.SimMode.SATURATED_BOTH,
            ),
            (0.7 * 0.8 * 0.9 * (1.0 - t2), 0.5 * 0.9 * 0.8 * (1.0 - t1)),
        )
    )
    # dominant run: the real queue's per-busy-slot rate is the saturated rate
    cases.append(
        (
            "dominant, partner backed by dummies",
            sim.SimConfig(
                system=sys_a,
                policy=Policy(q11=1.0, q12=1.0),
                arrivals=ArrivalRates(0.2, 0.12),
                horizon=horizon,
                warmup=warmup,
                seed=503,
                mode=sim.SimMode.DOMINANT_S1,
            ),
            (None, 0.24),
        )
    )
    # joint successes, both saturated
    sys_d = SystemParams(
        channel1=from_stationary(0.8),
        channel2=from_stationary(0.7),
        f11=1.0,
        f12=0.9,
        mpr1=0.4,
        mpr2=0.36,
    )
    cases.append(
        (
            "saturated with joint successes",
            sim.SimConfig(
                system=sys_d,
                policy=Policy(q11=1.0, q12=1.0),
                arrivals=ArrivalRates(0.0, 0.0),
                horizon=horizon,
                warmup=warmup,
                seed=504,
                mode=sim.SimMode.SATURATED_BOTH,
            ),
            (0.8 * 1.0 * (1.0 - 0.7 * 0.6), 0.7 * 0.9 * (1.0 - 0.8 * 0.6)),
        )
    )
    cases.append(
        (
            "dominant with joint successes",
            sim.SimConfig(
                system=sys_d,
                policy=Policy(q11=1.0, q12=1.0),
                arrivals=ArrivalRates(0.2, 0.1),
                horizon=horizon,
                warmup=warmup,
                seed=505,
                mode=sim.SimMode.DOMINANT_S2,
            ),
            (0.8 * 1.0 * (1.0 - 0.7 * 0.6), None),
        )
    )

    details = []
    passed = True
    slowest = 0.0
    for label, cfg, targets in cases:
        t0 = time.perf_counter()
        est = sim.estimate_service_rates(cfg)
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        for rate, n, target in (
            (est.rate1, est.n1, targets[0]),
            (est.rate2, est.n2, targets[1]),
        ):
            if target is None:
                continue
            sigma = np.sqrt(target * (1.0 - target) / n)
            z = abs(rate - target) / sigma
            if z > 3.0:
                passed = False
            details.append(f"{label}: z={z:.2f}")
    if slowest > 30.0:
        passed = False
    elapsed = time.perf_counter() - start
    return CheckResult(
        5,
        "simulated saturated service rates match closed forms",
        passed,
        "; ".join(details) + f"; slowest run {slowest:.1f}s",
        elapsed,
    )


def check_delay_formula(budget: str = "full") -> CheckResult:
    """Simulated symmetric mean delay is within 2% of the closed form."""
    start = time.perf_counter()
    rng = np.random.default_rng(606)
    n_cfg, horizon, warmup = (
        (10, 2_000_000, 100_000) if budget == "full" else (3, 400_000, 40_000)
    )
    worst_rel = 0.0
    details = []
    configs = []
    for i in range(n_cfg):
        pi1 = rng.uniform(0.3, 0.9)
        f11 = rng.uniform(0.5, 1.0)
        q11 = rng.uniform(0.4, 1.0)
        a = pi1 * q11
        service = a * f11 * (1.0 - a)
        lam = rng.uniform(0.2, 0.8) * service
        configs.append((pi1, f11, q11, lam, 600 + i))
    # anchored case: half-good channel, sure successes, light load
    configs.append((0.5, 1.0, 1.0, 0.1, 699))
    anchor_ok = abs(dl.average_delay(dl.SymmetricParams(0.5, 1.0, 0.1), 1.0) - 17.0 / 6.0) <= 1e-12
    for pi1, f11, q11, lam, seed in configs:
        p = dl.SymmetricParams(pi1, f11, lam)
        target = dl.average_delay(p, q11)
        cfg = sim.SimConfig(
            system=_symmetric_system(pi1, f11),
            policy=Policy(q11=q11, q12=q11),
            arrivals=ArrivalRates(lam, lam),
            horizon=horizon,
            warmup=warmup,
            seed=seed,
            mode=sim.SimMode.ORIGINAL,
        )
        trace = sim.run_trace(cfg)
        pooled = np.concatenate([trace.delays1, trace.delays2])
        measured = float(pooled.mean())
        rel = abs(measured - target) / target
        worst_rel = max(worst_rel, rel)
        details.append(f"rel={rel * 100:.2f}%")
    elapsed = time.perf_counter() - start
    passed = worst_rel <= 0.02 and anchor_ok
    return CheckResult(
        6,
        "simulated symmetric delay matches closed form",
        passed,
        f"worst rel err={worst_rel * 100:.2f}% over {len(configs)} configs; "
        f"anchor formula exact: {anchor_ok}",
        elapsed,
    )


def check_optimal_q(budget: str = "full") -> CheckResult:
    """Closed-form delay minimizer agrees with brute-force search."""
    start = time.perf_counter()
    rng = np.random.default_rng(707)
    n = 200 if budget == "full" else 40
    worst = 0.0
    always_one_ok = True
    for _ in range(n):
        pi1 = rng.uniform(0.05, 0.95)
        f11 = rng.uniform(0.2, 1.0)
        p0 = dl.SymmetricParams(pi1, f11, 0.0)
        lam = rng.uniform(0.02, 0.97) * dl.lambda_max(p0)
        p = dl.SymmetricParams(pi1, f11, lam)
        q_formula = dl.optimal_q11(p)
        q_brute, _ = oracle.brute_force_optimal_q(p)
        worst = max(worst, abs(q_formula - q_brute))
        if 1.0 - pi1 >= 0.5 and q_formula != 1.0:
            always_one_ok = False
    elapsed = time.perf_counter() - start
    passed = worst <= 1e-3 and always_one_ok
    return CheckResult(
        7,
        "optimal transmit probability matches brute-force search",
        passed,
        f"max |q_formula - q_brute|={worst:.2e} over {n} instances; "
        f"bad-half channels always 1: {always_one_ok}",
        elapsed,
    )


def check_root_identities(budget: str = "full") -> CheckResult:
    """The two printed forms of the delay stationary points agree, and the
    stability and delay roots interleave wherever all are real."""
    start = time.perf_counter()
    rng = np.random.default_rng(808)
    n = 10_000 if budget == "full" else 2_000
    worst_pair = 0.0
    worst_order = -np.inf
    for _ in range(n):
        pi1 = rng.uniform(0.05, 1.0)
        f11 = rng.uniform(0.1, 1.0)
        lam = rng.uniform(0.0, 0.999)
        p = dl.SymmetricParams(pi1, f11, lam)
        pa = dl.delay_roots(p)
        pb = dl.delay_roots_expanded(p)
        worst_pair = max(worst_pair, abs(pa[0] - pb[0]), abs(pa[1] - pb[1]))
        if lam <= f11 / 4.0:
            s1, s2 = dl.stability_roots(p)
            worst_order = max(
                worst_order, s1 - pa[0], pa[0] - s2, s2 - pa[1]
            )
    elapsed = time.perf_counter() - start
    passed = worst_pair <= 1e-12 and worst_order <= 1e-12
    return CheckResult(
        8,
        "delay stationary points: dual forms and root ordering",
        passed,
        f"max form disagreement={worst_pair:.2e}; "
        f"worst ordering violation={worst_order:.2e} over {n} triples",
        elapsed,
    )


def check_dominance_coupling(budget: str = "full") -> CheckResult:
    """Under shared randomness the dummy-backed run's partner queue is a
    slot-by-slot upper bound on the actual run's."""
    start = time.perf_counter()
    seeds = (11, 12, 13, 14, 15) if budget == "full" else (11, 12)
    horizon = 100_000
    system = SystemParams(
        channel1=from_stationary(0.6, 0.3),
        channel2=from_stationary(0.55, 0.3),
        f11=0.9,
        f12=0.85,
        mpr1=0.2,
        mpr2=0.15,
    )
    policy = Policy(q11=0.8, q12=0.7, q01=0.1, q02=0.05)
    arrivals = ArrivalRates(0.15, 0.2)
    all_ok = True
    for seed in seeds:
        base = dict(
            system=system,
            policy=policy,
            arrivals=arrivals,
            horizon=horizon,
            warmup=0,
            seed=seed,
        )
        tr_orig = sim.run_trace(sim.SimConfig(mode=sim.SimMode.ORIGINAL, **base))
        tr_dom = sim.run_trace(sim.SimConfig(mode=sim.SimMode.DOMINANT_S1, **base))
        coupled = bool(
            np.all(tr_orig.state1 == tr_dom.state1)
            and np.all(tr_orig.state2 == tr_dom.state2)
            and np.all(tr_orig.arr1 == tr_dom.arr1)
            and np.all(tr_orig.arr2 == tr_dom.arr2)
        )
        dominated = bool(np.all(tr_dom.queue2 >= tr_orig.queue2))
        if not (coupled and dominated):
            all_ok = False
    elapsed = time.perf_counter() - start
    return CheckResult(
        9,
        "path-coupled dominant run bounds the actual queue",
        all_ok,
        f"{len(seeds)} seeds x {horizon} slots, "
        f"coupling and slot-wise dominance both hold: {all_ok}",
        elapsed,
    )


def check_stability_detection(budget: str = "full") -> CheckResult:
    """The trend detector classifies points at 0.8x and 1.2x of the boundary."""
    start = time.perf_counter()
    params = _symmetric_system(0.6, 1.0)
    boundary = closed_form_boundary(params)
    n_pts = 20 if budget == "full" else 4
    horizon = 1_000_000
    warmup = 100_000
    fracs = np.linspace(0.04, 0.96, n_pts)
    correct = 0
    total = 0
    wrong = []
    for i, frac in enumerate(fracs):
        x = float(frac) * boundary.lambda1_max
        y = boundary_value(boundary, x)
        policy = boundary_achieving_policy(params, x)
        for scale, expect, seed in (
            (0.8, sim.SimVerdict.STABLE_LIKELY, 9000 + i),
            (1.2, sim.SimVerdict.UNSTABLE_LIKELY, 9500 + i),
        ):
            cfg = sim.SimConfig(
                system=params,
                policy=policy,
                arrivals=ArrivalRates(scale * x, scale * y),
                horizon=horizon,
                warmup=warmup,
                seed=seed,
                mode=sim.SimMode.ORIGINAL,
            )
            verdict = sim.detect_stability(cfg)
            total += 1
            if verdict is expect:
                correct += 1
            else:
                wrong.append(f"frac={frac:.2f} scale={scale}: {verdict.value}")
    elapsed = time.perf_counter() - start
    need = total - 2 if budget == "full" else total - 1
    passed = correct >= need
    detail = f"{correct}/{total} classified correctly"
    if wrong:
        detail += "; misses: " + ", ".join(wrong[:4])
    return CheckResult(
        10,
        "trend detector classifies scaled boundary points",
        passed,
        detail,
        elapsed,
    )


_CHECKS = {
    1: check_region_grid_collision,
    2: check_region_grid_mpr,
    3: check_time_sharing_reduction,
    4: check_control_dominates,
    5: check_saturated_rates,
    6: check_delay_formula,
    7: check_optimal_q,
    8: check_root_identities,
    9: check_dominance_coupling,
    10: check_stability_detection,
}

SUITES = {
    "region": (1, 2, 3, 4),
    "delay": (6, 7, 8),
    "sim": (5, 9, 10),
    "all": tuple(range(1, 11)),
}


def run_check(criterion: int, budget: str = "quick") -> CheckResult:
    if criterion not in _CHECKS:
        raise ValueError(f"unknown criterion {criterion!r}")
    if budget not in ("quick", "full"):
        raise ValueError(f"budget must be 'quick' or 'full', got {budget!r}")
    return _CHECKS[criterion](budget)


def run_suite(suite: str = "all", budget: str = "quick") -> list[CheckResult]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    return [run_check(c, budget) for c in SUITES[suite]]
