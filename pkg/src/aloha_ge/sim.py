"""Slot-level simulator for the two-user controlled random-access system.

One slot proceeds as: observe channel states, draw transmission decisions,
resolve receptions, serve queues, then add Bernoulli arrivals (eligible for
service from the next slot on) and step both channels.  Delay is counted from
the end of the arrival slot to the end of the departure slot, so a packet
served at the first opportunity has delay 1.

Besides the actual system the simulator runs its dominant variants, in which a
user transmits dummy packets whenever its queue is empty (real packets are
served first), and the fully saturated variant used to measure service rates.
All variants consume the same per-slot random draws from seven fixed-purpose
streams (arrivals, channels, transmission coins, reception), so runs with the
same seed are coupled path by path across modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .channel import stationary_distribution
from .model import (
    ArrivalRates,
    Policy,
    SystemParams,
    validate,
    validate_arrivals,
    validate_policy,
)


class SimMode(Enum):
    ORIGINAL = "original"
    DOMINANT_S1 = "dominant-s1"
    DOMINANT_S2 = "dominant-s2"
    SATURATED_BOTH = "saturated-both"


_MODE_CODE = {
    SimMode.ORIGINAL: 0,
    SimMode.DOMINANT_S1: 1,
    SimMode.DOMINANT_S2: 2,
    SimMode.SATURATED_BOTH: 3,
}


class SimVerdict(Enum):
    STABLE_LIKELY = "stable-likely"
    UNSTABLE_LIKELY = "unstable-likely"
    INCONCLUSIVE = "inconclusive"


class ConfigInvalid(ValueError):
    """The simulation configuration fails validation."""


@dataclass(frozen=True)
class SimConfig:
    system: SystemParams
    policy: Policy
    arrivals: ArrivalRates
    horizon: int
    warmup: int = 0
    seed: int = 1
    mode: SimMode = SimMode.ORIGINAL


@dataclass(frozen=True)
class SimTrace:
    """Raw per-slot records of one run.

    queue lengths are end-of-slot; succ flags count dummy-packet successes
    too in the dominant/saturated modes; delays cover packets that arrived at
    or after the warmup slot and departed within the horizon.
    """

    config: SimConfig
    state1: np.ndarray
    state2: np.ndarray
    tx1: np.ndarray
    tx2: np.ndarray
    succ1: np.ndarray
    succ2: np.ndarray
    arr1: np.ndarray
    arr2: np.ndarray
    queue1: np.ndarray
    queue2: np.ndarray
    delays1: np.ndarray
    delays2: np.ndarray


@dataclass(frozen=True)
class SimStats:
    throughput1: float
    throughput2: float
    mean_queue1: float
    mean_queue2: float
    mean_delay1: float | None
    mean_delay2: float | None
    delay_ci95: float | None
    occupancy_good1: float
    occupancy_good2: float
    stability_verdict: SimVerdict

    def to_dict(self) -> dict:
        return {
            "throughput1": self.throughput1,
            "throughput2": self.throughput2,
            "mean_queue1": self.mean_queue1,
            "mean_queue2": self.mean_queue2,
            "mean_delay1": self.mean_delay1,
            "mean_delay2": self.mean_delay2,
            "delay_ci95": self.delay_ci95,
            "occupancy_good1": self.occupancy_good1,
            "occupancy_good2": self.occupancy_good2,
            "stability_verdict": self.stability_verdict.value,
        }


@dataclass(frozen=True)
class RateEstimate:
    """Per-user empirical service rates with 95% half-widths.

    For a dummy-backed user the rate is successes per slot; for a real-queue
    user in a dominant mode it is successes per busy slot (queue nonempty at
    the slot start).
    """

    rate1: float
    rate2: float
    half_width1: float
    half_width2: float
    n1: int
    n2: int


_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_TWO53_INV = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _next(state):
    state = state + _GAMMA
    u = (_mix64(state) >> np.uint64(11)) * _TWO53_INV
    return state, u


@njit(cache=True, nogil=True)
def _run_core(
    horizon,
    warmup,
    seed,
    mode,
    pg2b1,
    pb2g1,
    pg2b2,
    pb2g2,
    pi11,
    pi12,
    f11,
    f12,
    mpr1,
    mpr2,
    q01,
    q11,
    q02,
    q12,
    lam1,
    lam2,
):
    base = np.uint64(seed)
    mult = np.uint64(0xD1B54A32D192ED03)
    sa1 = _mix64((base + np.uint64(1)) * mult)
    sa2 = _mix64((base + np.uint64(2)) * mult)
    sc1 = _mix64((base + np.uint64(3)) * mult)
    sc2 = _mix64((base + np.uint64(4)) * mult)
    st1 = _mix64((base + np.uint64(5)) * mult)
    st2 = _mix64((base + np.uint64(6)) * mult)
    sr = _mix64((base + np.uint64(7)) * mult)

    state1 = np.empty(horizon, np.int8)
    state2 = np.empty(horizon, np.int8)
    tx1 = np.empty(horizon, np.int8)
    tx2 = np.empty(horizon, np.int8)
    succ1 = np.empty(horizon, np.int8)
    succ2 = np.empty(horizon, np.int8)
    arr1 = np.empty(horizon, np.int8)
    arr2 = np.empty(horizon, np.int8)
    qlen1 = np.empty(horizon, np.int64)
    qlen2 = np.empty(horizon, np.int64)
    at1 = np.empty(horizon, np.int64)
    at2 = np.empty(horizon, np.int64)
    d1 = np.empty(horizon, np.int64)
    d2 = np.empty(horizon, np.int64)

    sc1, u = _next(sc1)
    c1 = 1 if u < pi11 else 0
    sc2, u = _next(sc2)
    c2 = 1 if u < pi12 else 0

    q1 = 0
    q2 = 0
    head1 = 0
    tail1 = 0
    head2 = 0
    tail2 = 0
    nd1 = 0
    nd2 = 0
    dummy1 = mode == 1 or mode == 3
    dummy2 = mode == 2 or mode == 3

    for t in range(horizon):
        state1[t] = c1
        state2[t] = c2
        st1, u1 = _next(st1)
        st2, u2 = _next(st2)
        p1 = q11 if c1 == 1 else q01
        p2 = q12 if c2 == 1 else q02
        tr1 = (dummy1 or q1 > 0) and u1 < p1
        tr2 = (dummy2 or q2 > 0) and u2 < p2
        sr, ur1 = _next(sr)
        sr, ur2 = _next(sr)
        ok1 = False
        ok2 = False
        if tr1:
            if tr2:
                ok1 = c1 == 1 and c2 == 1 and ur1 < mpr1
            else:
                ok1 = c1 == 1 and ur1 < f11
        if tr2:
            if tr1:
                ok2 = c1 == 1 and c2 == 1 and ur2 < mpr2
            else:
                ok2 = c2 == 1 and ur2 < f12
        tx1[t] = 1 if tr1 else 0
        tx2[t] = 1 if tr2 else 0
        succ1[t] = 1 if ok1 else 0
        succ2[t] = 1 if ok2 else 0
        if ok1 and q1 > 0:
            born = at1[head1]
            head1 += 1
            q1 -= 1
            if born >= warmup:
                d1[nd1] = t - born
                nd1 += 1
        if ok2 and q2 > 0:
            born = at2[head2]
            head2 += 1
            q2 -= 1
            if born >= warmup:
                d2[nd2] = t - born
                nd2 += 1
        sa1, u = _next(sa1)
        if u < lam1:
            at1[tail1] = t
            tail1 += 1
            q1 += 1
            arr1[t] = 1
        else:
            arr1[t] = 0
        sa2, u = _next(sa2)
        if u < lam2:
            at2[tail2] = t
            tail2 += 1
            q2 += 1
            arr2[t] = 1
        else:
            arr2[t] = 0
        qlen1[t] = q1
        qlen2[t] = q2
        sc1, u = _next(sc1)
        if c1 == 1:
            c1 = 0 if u < pg2b1 else 1
        else:
            c1 = 1 if u < pb2g1 else 0
        sc2, u = _next(sc2)
        if c2 == 1:
            c2 = 0 if u < pg2b2 else 1
        else:
            c2 = 1 if u < pb2g2 else 0
    return (
        state1,
        state2,
        tx1,
        tx2,
        succ1,
        succ2,
        arr1,
        arr2,
        qlen1,
        qlen2,
        d1[:nd1],
        d2[:nd2],
    )


def _validate_config(config: SimConfig) -> None:
    errors = validate(config.system)
    errors += validate_policy(config.policy)
    errors += validate_arrivals(config.arrivals)
    if isinstance(config.horizon, bool) or not isinstance(config.horizon, int):
        errors.append(f"horizon must be an integer, got {config.horizon!r}")
    elif config.horizon < 1:
        errors.append(f"horizon must be positive, got {config.horizon!r}")
    if isinstance(config.warmup, bool) or not isinstance(config.warmup, int):
        errors.append(f"warmup must be an integer, got {config.warmup!r}")
    elif isinstance(config.horizon, int) and not isinstance(config.horizon, bool):
        if not 0 <= config.warmup < max(config.horizon, 1):
            errors.append(
                f"warmup must be in [0, horizon), got {config.warmup!r}"
            )
    if isinstance(config.seed, bool) or not isinstance(config.seed, int):
        errors.append(f"seed must be an integer, got {config.seed!r}")
    elif config.seed < 0:
        errors.append(f"seed must be nonnegative, got {config.seed!r}")
    if not isinstance(config.mode, SimMode):
        errors.append(f"mode must be a SimMode, got {config.mode!r}")
    if errors:
        raise ConfigInvalid("; ".join(errors))


def run_trace(config: SimConfig) -> SimTrace:
    """Run one simulation and return the raw per-slot records."""
    _validate_config(config)
    pi11 = stationary_distribution(config.system.channel1).pi1
    pi12 = stationary_distribution(config.system.channel2).pi1
    out = _run_core(
        config.horizon,
        config.warmup,
        config.seed,
        _MODE_CODE[config.mode],
        config.system.channel1.p_g2b,
        config.system.channel1.p_b2g,
        config.system.channel2.p_g2b,
        config.system.channel2.p_b2g,
        pi11,
        pi12,
        config.system.f11,
        config.system.f12,
        config.system.mpr1,
        config.system.mpr2,
        config.policy.q01,
        config.policy.q11,
        config.policy.q02,
        config.policy.q12,
        config.arrivals.lambda1,
        config.arrivals.lambda2,
    )
    return SimTrace(
        config,
        out[0],
        out[1],
        out[2],
        out[3],
        out[4],
        out[5],
        out[6],
        out[7],
        out[8],
        out[9],
        out[10].copy(),
        out[11].copy(),
    )


def _batch_se(x: np.ndarray, batches: int = 20) -> float | None:
    """Standard error of the mean via batch means (None if too few samples)."""
    n = x.shape[0]
    if n < 2 * batches:
        return None
    m = n // batches
    means = x[: m * batches].reshape(batches, m).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(batches))


def _real_departures(queue: np.ndarray, arr: np.ndarray) -> np.ndarray:
    prev = np.empty_like(queue)
    prev[0] = 0
    prev[1:] = queue[:-1]
    return prev + arr - queue


def stats_from_trace(trace: SimTrace) -> SimStats:
    w = trace.config.warmup
    span = trace.config.horizon - w
    dep1 = _real_departures(trace.queue1, trace.arr1)
    dep2 = _real_departures(trace.queue2, trace.arr2)
    mean_delay1 = float(trace.delays1.mean()) if trace.delays1.size else None
    mean_delay2 = float(trace.delays2.mean()) if trace.delays2.size else None
    se1 = _batch_se(trace.delays1.astype(np.float64))
    se2 = _batch_se(trace.delays2.astype(np.float64))
    n1, n2 = trace.delays1.size, trace.delays2.size
    ci = None
    if se1 is not None and se2 is not None:
        # users are pooled; batching per user keeps departure ordering intact
        se = math.sqrt(n1 * n1 * se1 * se1 + n2 * n2 * se2 * se2) / (n1 + n2)
        ci = 1.96 * se
    elif se1 is not None and n2 == 0:
        ci = 1.96 * se1
    elif se2 is not None and n1 == 0:
        ci = 1.96 * se2
    qsum = trace.queue1[w:] + trace.queue2[w:]
    return SimStats(
        throughput1=float(dep1[w:].sum()) / span,
        throughput2=float(dep2[w:].sum()) / span,
        mean_queue1=float(trace.queue1[w:].mean()),
        mean_queue2=float(trace.queue2[w:].mean()),
        mean_delay1=mean_delay1,
        mean_delay2=mean_delay2,
        delay_ci95=ci,
        occupancy_good1=float(trace.state1[w:].mean()),
        occupancy_good2=float(trace.state2[w:].mean()),
        stability_verdict=_verdict_from_queues(qsum.astype(np.float64), 20),
    )


def run(config: SimConfig, event_log: str | None = None) -> SimStats:
    """Run one simulation; optionally write a per-slot event log CSV."""
    trace = run_trace(config)
    if event_log is not None:
        write_event_log(trace, event_log)
    return stats_from_trace(trace)


def write_event_log(trace: SimTrace, path: str) -> None:
    data = np.column_stack(
        [
            np.arange(trace.config.horizon, dtype=np.int64),
            trace.state1,
            trace.state2,
            trace.tx1,
            trace.tx2,
            trace.succ1,
            trace.succ2,
            trace.queue1,
            trace.queue2,
        ]
    )
    np.savetxt(
        path,
        data,
        fmt="%d",
        delimiter=",",
        header="slot,state1,state2,tx1,tx2,succ1,succ2,q1,q2",
        comments="",
        newline="\n",
    )


def estimate_service_rates(config: SimConfig) -> RateEstimate:
    """Empirical saturated/dominant service rates with 95% half-widths.

    Requires a dominant or saturated mode and horizon >= 1e5.  Dummy-backed
    users are measured per slot; the real-queue user of a dominant mode is
    measured per busy slot, which estimates its saturated rate because the
    partner is always transmitting-capable.
    """
    if config.mode is SimMode.ORIGINAL:
        raise ConfigInvalid(
            "service-rate estimation needs a dominant or saturated mode"
        )
    if config.horizon < 100_000:
        raise ConfigInvalid(
            f"service-rate estimation needs horizon >= 100000, got {config.horizon!r}"
        )
    trace = run_trace(config)
    w = config.warmup

    def one(queue: np.ndarray, succ: np.ndarray, dummy: bool) -> tuple[float, float, int]:
        if dummy:
            k = int(succ[w:].sum())
            n = config.horizon - w
        else:
            prev = np.empty_like(queue)
            prev[0] = 0
            prev[1:] = queue[:-1]
            busy = prev[w:] > 0
            n = int(busy.sum())
            k = int(succ[w:][busy].sum())
        if n == 0:
            return 0.0, math.inf, 0
        rate = k / n
        return rate, 1.96 * math.sqrt(rate * (1.0 - rate) / n), n

    dummy1 = config.mode in (SimMode.DOMINANT_S1, SimMode.SATURATED_BOTH)
    dummy2 = config.mode in (SimMode.DOMINANT_S2, SimMode.SATURATED_BOTH)
    rate1, hw1, n1 = one(trace.queue1, trace.succ1, dummy1)
    rate2, hw2, n2 = one(trace.queue2, trace.succ2, dummy2)
    return RateEstimate(
        rate1=rate1, rate2=rate2, half_width1=hw1, half_width2=hw2, n1=n1, n2=n2
    )


def _verdict_from_queues(qsum: np.ndarray, window_count: int) -> SimVerdict:
    """Classify a queue-sum path as stable or unstable.

    Window means are regressed on time; a clearly significant positive trend
    with material fitted growth reads as unstable, otherwise bounded maxima
    (relative to the median window) read as stable.
    """
    k = window_count
    w = qsum.shape[0] // k
    if w < 1 or k < 3:
        return SimVerdict.INCONCLUSIVE
    means = qsum[: w * k].reshape(k, w).mean(axis=1)
    x = np.arange(k, dtype=np.float64)
    xc = x - x.mean()
    sxx = float((xc * xc).sum())
    slope = float((xc * means).sum()) / sxx
    fitted = means.mean() + slope * xc
    rss = float(((means - fitted) ** 2).sum())
    se = math.sqrt(rss / (k - 2) / sxx)
    if se == 0.0:
        t = math.inf if slope > 0.0 else 0.0
    else:
        t = slope / se
    growth = slope * (k - 1)
    mbar = float(means.mean())
    mmed = float(np.median(means))
    mmax = float(means.max())
    if t > 3.0 and growth > max(10.0, 0.5 * mbar):
        return SimVerdict.UNSTABLE_LIKELY
    if mmax <= 3.0 * mmed + 10.0:
        return SimVerdict.STABLE_LIKELY
    return SimVerdict.INCONCLUSIVE


def detect_stability(config: SimConfig, window_count: int = 20) -> SimVerdict:
    """Long-run trend classification of the total queue length.

    Requires horizon >= 1e6 and at least 10 windows; warmup slots are dropped
    before windowing.
    """
    if config.horizon < 1_000_000:
        raise ConfigInvalid(
            f"stability detection needs horizon >= 1000000, got {config.horizon!r}"
        )
    if window_count < 10:
        raise ConfigInvalid(
            f"window_count must be at least 10, got {window_count!r}"
        )
    trace = run_trace(config)
    w = config.warmup
    qsum = (trace.queue1[w:] + trace.queue2[w:]).astype(np.float64)
    return _verdict_from_queues(qsum, window_count)
