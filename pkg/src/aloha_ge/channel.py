"""Gilbert-Elliott two-state Markov channel: parameters, stationary law, sampling.

Each user's link alternates between a 'bad' state (0), in which every
transmission fails, and a 'good' state (1), in which a sole transmission
succeeds with some positive probability.  All closed-form results downstream
depend on the channel only through its stationary distribution; the full
transition parameterization exists so the simulator can probe mixing effects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum


class ChannelState(IntEnum):
    BAD = 0
    GOOD = 1


class DegenerateChain(ValueError):
    """Both transition probabilities are zero: no unique stationary law."""


@dataclass(frozen=True)
class ChannelParams:
    """Per-slot transition probabilities of one user's channel.

    p_g2b: probability of moving good -> bad in one slot.
    p_b2g: probability of moving bad -> good in one slot.
    """

    p_g2b: float
    p_b2g: float


@dataclass(frozen=True)
class StationaryDist:
    """Long-run fraction of slots spent in each state."""

    pi0: float  # bad
    pi1: float  # good


def validate_channel(params: ChannelParams) -> list[str]:
    """Return every violated invariant; empty list means valid.

    Total: never raises, any float input (NaN/inf included) is reported.
    """
    errors = []
    for name in ("p_g2b", "p_b2g"):
        v = getattr(params, name)
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            errors.append(f"{name} must be a finite number")
        elif not 0.0 <= v <= 1.0:
            errors.append(f"{name} must be in [0, 1]")
    if not errors and params.p_g2b + params.p_b2g == 0.0:
        errors.append("p_g2b + p_b2g must be positive (chain must be irreducible)")
    return errors


def stationary_distribution(params: ChannelParams) -> StationaryDist:
    """Solve the two-state balance equation: pi1 = p_b2g / (p_g2b + p_b2g)."""
    errors = validate_channel(params)
    if errors:
        raise DegenerateChain("; ".join(errors))
    pi1 = params.p_b2g / (params.p_g2b + params.p_b2g)
    return StationaryDist(pi0=1.0 - pi1, pi1=pi1)


def from_stationary(pi1: float, memory: float = 0.0) -> ChannelParams:
    """Build transition probabilities with a given stationary good fraction.

    memory is the second eigenvalue of the transition matrix, in [0, 1):
    memory=0 gives a channel that is independent across slots, larger values
    keep the same long-run occupancy but mix more slowly.
    """
    if not 0.0 <= pi1 <= 1.0 or not math.isfinite(pi1):
        raise ValueError("pi1 must be in [0, 1]")
    if not 0.0 <= memory < 1.0 or not math.isfinite(memory):
        raise ValueError("memory must be in [0, 1)")
    return ChannelParams(p_g2b=(1.0 - memory) * (1.0 - pi1), p_b2g=(1.0 - memory) * pi1)


def step(current: ChannelState, params: ChannelParams, draw: float) -> ChannelState:
    """Advance the chain one slot using a uniform draw in [0, 1)."""
    if current == ChannelState.GOOD:
        return ChannelState.BAD if draw < params.p_g2b else ChannelState.GOOD
    return ChannelState.GOOD if draw < params.p_b2g else ChannelState.BAD
