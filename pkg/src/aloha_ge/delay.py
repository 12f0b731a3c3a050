"""Average-delay analysis for two symmetric users on memoryless channels.

Both users see the same channel statistics (good fraction pi1, good-state
success probability f11), the same Bernoulli arrival rate, and use the same
good-state transmission probability q11 (silent in the bad state).  For
channels without memory the per-user queue is a discrete M/M/1-type chain and
the stationary mean packet delay has a closed form; minimizing it over q11
gives either q11 = 1 or an interior root of a quadratic, depending on how
often the channel is good and how heavy the load is.

Delay is counted in slots from the end of the arrival slot to the end of the
departure slot, so an immediately served packet has delay 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import OutOfRange, _finite


class Unstable(ValueError):
    """The queue is not stable under the given rate/policy combination."""


class ComplexRoots(ValueError):
    """The stability quadratic has no real roots at this arrival rate."""


@dataclass(frozen=True)
class SymmetricParams:
    """Common parameters of the two symmetric users.

    lam is the per-user Bernoulli arrival probability per slot (the keyword
    lambda is reserved in Python).
    """

    pi1: float
    f11: float
    lam: float


def validate_symmetric(p: SymmetricParams) -> list[str]:
    errors = []
    for name in ("pi1", "f11", "lam"):
        value = getattr(p, name)
        if not _finite(value):
            errors.append(f"{name} must be a finite number, got {value!r}")
    if errors:
        return errors
    if not 0.0 < p.pi1 <= 1.0:
        errors.append(f"pi1 must be in (0, 1], got {p.pi1!r}")
    if not 0.0 < p.f11 <= 1.0:
        errors.append(f"f11 must be in (0, 1], got {p.f11!r}")
    if not 0.0 <= p.lam < 1.0:
        errors.append(f"lam must be in [0, 1), got {p.lam!r}")
    return errors


def _require_valid(p: SymmetricParams) -> None:
    errors = validate_symmetric(p)
    if errors:
        raise ValueError("invalid symmetric parameters: " + "; ".join(errors))


def service_rate(p: SymmetricParams, q11: float) -> float:
    """Per-user service rate pi1*q11*f11*(1 - pi1*q11) when both queues load."""
    _require_valid(p)
    if not 0.0 <= q11 <= 1.0:
        raise ValueError(f"q11 must be in [0, 1], got {q11!r}")
    a = p.pi1 * q11
    return a * p.f11 * (1.0 - a)


def average_delay(p: SymmetricParams, q11: float) -> float:
    """Stationary mean delay in slots for the symmetric system at policy q11.

    Raises Unstable when the arrival rate meets or exceeds the service rate
    pi1*q11*f11*(1 - pi1*q11).
    """
    denom = service_rate(p, q11) - p.lam
    if denom <= 0.0:
        raise Unstable(
            f"lam={p.lam!r} is not below the service rate at q11={q11!r}"
        )
    a = p.pi1 * q11
    return ((1.0 - p.lam) - (1.0 - p.lam / 2.0) * a) / denom


def lambda_max(p: SymmetricParams) -> float:
    """Largest arrival rate stabilizable by any q11 in [0, 1].

    The service rate is a parabola in pi1*q11 peaking at 1/2; the peak is
    reachable (value f11/4) iff pi1 >= 1/2, otherwise the best is q11 = 1.
    """
    _require_valid(p)
    if p.pi1 >= 0.5:
        return p.f11 / 4.0
    return p.pi1 * (1.0 - p.pi1) * p.f11


def stability_roots(p: SymmetricParams) -> tuple[float, float]:
    """Roots s1 <= s2 of lam = pi1*q*f11*(1 - pi1*q) in q.

    The policy stabilizes the queue iff s1 < q11 < s2 (intersected with
    [0, 1]).  Real iff lam <= f11/4; otherwise ComplexRoots is raised.
    """
    _require_valid(p)
    disc = 1.0 - 4.0 * p.lam / p.f11
    if disc < 0.0:
        raise ComplexRoots(
            f"lam={p.lam!r} exceeds f11/4={p.f11 / 4.0!r}: no real roots"
        )
    root = math.sqrt(disc)
    return (1.0 - root) / (2.0 * p.pi1), (1.0 + root) / (2.0 * p.pi1)


def delay_roots(p: SymmetricParams) -> tuple[float, float]:
    """Stationary points p1 <= p2 of the delay as a function of q11.

    The delay is strictly decreasing on (s1, p1), so the unconstrained
    minimizer is p1; both roots are real for every lam in [0, 1).
    """
    _require_valid(p)
    half = 1.0 - p.lam / 2.0
    rad = (2.0 / p.f11) * half * half - (1.0 - p.lam)
    spread = math.sqrt(p.lam / 2.0) * math.sqrt(rad)
    denom = half * p.pi1
    return ((1.0 - p.lam) - spread) / denom, ((1.0 - p.lam) + spread) / denom


def delay_roots_expanded(p: SymmetricParams) -> tuple[float, float]:
    """Same stationary points via the expanded quadratic discriminant.

    Algebraically identical to delay_roots; kept as an independent expression
    for cross-checking the two printed forms against each other.
    """
    _require_valid(p)
    one = 1.0 - p.lam
    half = 1.0 - p.lam / 2.0
    rad = 4.0 * one * one - (4.0 / p.f11) * half * (one * p.f11 - p.lam * half)
    spread = math.sqrt(rad)
    denom = (2.0 - p.lam) * p.pi1
    return (2.0 * one - spread) / denom, (2.0 * one + spread) / denom


def lambda_star(p: SymmetricParams) -> float:
    """Arrival rate at which the unconstrained delay minimizer p1 equals 1.

    Below this rate the boundary value q11 = 1 is optimal (for channels with
    pi1 >= 1/2, where the interior minimizer is otherwise admissible); above
    it the optimum moves inside.  Computed from p1(lam) = 1 solved for lam.
    """
    _require_valid(p)
    h = p.f11 * (1.0 - 2.0 * p.pi1 + p.pi1 * p.pi1 / 2.0)
    return 1.0 + h - math.sqrt(1.0 - p.pi1 * p.pi1 * p.f11 + h * h)


def optimal_q11(p: SymmetricParams) -> float:
    """Delay-minimizing good-state transmission probability.

    When the channel is bad at least half the time (pi1 <= 1/2) throttling
    never helps and the optimum is exactly 1.  Otherwise the optimum is 1 up
    to lambda_star and the interior stationary point p1 beyond it.  Raises
    OutOfRange when no policy stabilizes the queue (lam >= lambda_max).
    """
    _require_valid(p)
    if p.lam >= lambda_max(p):
        raise OutOfRange(
            f"lam={p.lam!r} is not stabilizable (lambda_max={lambda_max(p)!r})"
        )
    if 1.0 - p.pi1 >= 0.5:
        return 1.0
    if p.lam < lambda_star(p):
        return 1.0
    p1 = delay_roots(p)[0]
    if abs(p1 - 1.0) <= 1e-12:
        return 1.0
    return p1
