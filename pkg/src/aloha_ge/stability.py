"""Analytical stability regions for the two-user controlled random-access system.

Two complementary descriptions are implemented:

  - fixed-policy regions: for a given transmission policy, each user's queue is
    stable iff the arrival pair satisfies one of two dominant-system condition
    pairs (one per user treated as saturated with dummy packets);
  - the optimal-control region: the union of the fixed-policy regions over all
    good-state transmission probabilities, whose boundary has a closed form,
    either three pieces (line / square-root curve / line) or a two-line convex
    polygon depending on the channels' good-state tendency.

Baseline curves (time-sharing line, state-oblivious random access) are provided
for comparison, as is the policy that attains any given boundary point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .channel import stationary_distribution
from .model import (
    ArrivalRates,
    OutOfRange,
    Policy,
    SystemParams,
    Unsupported,
    require_valid,
    validate_arrivals,
    validate_policy,
)

#: classification tolerance: equalities within this margin count as Boundary
BOUNDARY_TOL = 1e-12


class Verdict(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    BOUNDARY = "boundary"


class ShapeClass(Enum):
    THREE_PIECE = "ThreePiece"
    POLYGON = "Polygon"


class DegenerateService(ValueError):
    """Service degenerates (rates zero / region collapses onto an axis)."""

    def __init__(self, message: str, mu1_sat: float = 0.0, mu2_sat: float = 0.0):
        super().__init__(message)
        self.mu1_sat = mu1_sat
        self.mu2_sat = mu2_sat


@dataclass(frozen=True)
class FixedPolicyRegion:
    """Stability conditions of one fixed transmission policy.

    The region is the union of two condition pairs:
      pair 1 (user 1 dummy-backed): lambda2 < mu2_sat  and
          lambda1 < s1_bound.intercept + s1_bound.slope * lambda2;
      pair 2 (user 2 dummy-backed): lambda1 < mu1_sat  and
          lambda2 < s2_bound.intercept + s2_bound.slope * lambda1.

    solo1/solo2 are the single-user saturated rates (partner silent); they are
    the intercepts of the cross bounds and stay meaningful even when a cross
    bound is undefined (None) because the partner's saturated rate is zero.
    """

    mu1_sat: float
    mu2_sat: float
    solo1: float
    solo2: float
    s1_bound: tuple[float, float] | None  # (slope, intercept) for lambda1 vs lambda2
    s2_bound: tuple[float, float] | None  # (slope, intercept) for lambda2 vs lambda1


@dataclass(frozen=True)
class Linear:
    slope: float
    intercept: float


@dataclass(frozen=True)
class SqrtCurve:
    """Curve sqrt(a1 * lambda1) + sqrt(a2 * lambda2) = 1."""

    a1: float
    a2: float


@dataclass(frozen=True)
class BoundarySegment:
    curve: Linear | SqrtCurve
    lambda1_lo: float
    lambda1_hi: float  # half-open interval [lo, hi)

    def value(self, lambda1: float) -> float:
        if isinstance(self.curve, Linear):
            return self.curve.intercept + self.curve.slope * lambda1
        root = 1.0 - math.sqrt(self.curve.a1 * lambda1)
        return root * root / self.curve.a2

    @property
    def kind(self) -> str:
        return "linear" if isinstance(self.curve, Linear) else "sqrt"


@dataclass(frozen=True)
class RegionBoundary:
    """Piecewise curve lambda2(lambda1) bounding the optimal-control region."""

    segments: tuple[BoundarySegment, ...]
    shape_class: ShapeClass
    lambda1_max: float


def _good_fractions(params: SystemParams) -> tuple[float, float]:
    return (
        stationary_distribution(params.channel1).pi1,
        stationary_distribution(params.channel2).pi1,
    )


def fixed_policy_region(params: SystemParams, policy: Policy) -> FixedPolicyRegion:
    """Stability conditions for one fixed policy, both dominant systems.

    With no simultaneous-success capability the bad-state probabilities q01/q02
    enter exactly as in the general conditions; with mpr > 0 the conditions are
    only characterized for q01 = q02 = 0 and other policies are refused.
    """
    require_valid(params)
    errors = validate_policy(policy)
    if errors:
        raise ValueError("invalid policy: " + "; ".join(errors))
    has_mpr = params.mpr1 > 0.0 or params.mpr2 > 0.0
    if has_mpr and (policy.q01 > 0.0 or policy.q02 > 0.0):
        raise Unsupported(
            "simultaneous-success parameters are characterized only for "
            "policies that never transmit in the bad state (q01 = q02 = 0)"
        )
    pi11, pi12 = _good_fractions(params)
    pi01, pi02 = 1.0 - pi11, 1.0 - pi12
    g1 = 1.0 - params.mpr1 / params.f11
    g2 = 1.0 - params.mpr2 / params.f12

    solo1 = pi11 * policy.q11 * params.f11
    solo2 = pi12 * policy.q12 * params.f12
    # probability the partner transmits in a slot, given it has a packet
    t1 = pi01 * policy.q01 + pi11 * policy.q11
    t2 = pi02 * policy.q02 + pi12 * policy.q12

    mu2_sat = solo2 * (1.0 - t1 * g2)
    mu1_sat = solo1 * (1.0 - t2 * g1)
    if mu1_sat == 0.0 and mu2_sat == 0.0:
        raise DegenerateService(
            "both saturated service rates are zero: the region is the origin",
            mu1_sat=0.0,
            mu2_sat=0.0,
        )
    s1_bound = None
    if mu2_sat > 0.0:
        # lambda1 < solo1 * (1 - g1 * t2 * lambda2 / mu2_sat)
        s1_bound = (-solo1 * g1 * t2 / mu2_sat, solo1)
    s2_bound = None
    if mu1_sat > 0.0:
        s2_bound = (-solo2 * g2 * t1 / mu1_sat, solo2)
    return FixedPolicyRegion(
        mu1_sat=mu1_sat,
        mu2_sat=mu2_sat,
        solo1=solo1,
        solo2=solo2,
        s1_bound=s1_bound,
        s2_bound=s2_bound,
    )


def is_stable_fixed(region: FixedPolicyRegion, rates: ArrivalRates) -> Verdict:
    """Classify an arrival pair against one fixed policy's region.

    Strictly inside either condition pair is Stable, any binding equality
    (within BOUNDARY_TOL) is Boundary, otherwise Unstable.  A queue with zero
    arrivals is empty forever and never transmits, so the partner then only
    faces its own solo condition.
    """
    errors = validate_arrivals(rates)
    if errors:
        raise ValueError("invalid arrival rates: " + "; ".join(errors))
    l1, l2 = rates.lambda1, rates.lambda2
    margins = []
    if l2 == 0.0:
        margins.append(region.solo1 - l1)
    elif region.s1_bound is not None:
        slope, intercept = region.s1_bound
        margins.append(min(region.mu2_sat - l2, intercept + slope * l2 - l1))
    if l1 == 0.0:
        margins.append(region.solo2 - l2)
    elif region.s2_bound is not None:
        slope, intercept = region.s2_bound
        margins.append(min(region.mu1_sat - l1, intercept + slope * l1 - l2))
    margin = max(margins, default=-math.inf)
    if margin > BOUNDARY_TOL:
        return Verdict.STABLE
    if margin < -BOUNDARY_TOL:
        return Verdict.UNSTABLE
    return Verdict.BOUNDARY


def fixed_policy_boundary(region: FixedPolicyRegion, lambda1: float) -> float:
    """Largest stable lambda2 at the given lambda1 for one fixed policy.

    Returns 0.0 when no positive lambda2 is stable.  The two condition pairs
    meet at the corner (mu1_sat, mu2_sat): below mu1_sat the binding curve is
    pair 2's cross bound, beyond it pair 1's bound inverted for lambda2.
    """
    if lambda1 < 0.0:
        raise OutOfRange("lambda1 must be nonnegative")
    best = 0.0
    if region.s2_bound is not None and lambda1 < region.mu1_sat:
        slope, intercept = region.s2_bound
        best = max(best, intercept + slope * lambda1)
    if region.s1_bound is not None and lambda1 < region.solo1:
        slope, intercept = region.s1_bound
        if slope == 0.0:
            # partner's success is interference-free; the pair is a rectangle
            best = max(best, region.mu2_sat)
        else:
            # pair 1 also requires lambda2 < mu2_sat; left of the corner the
            # inverted cross bound exceeds it and the cap is what binds
            best = max(best, min(region.mu2_sat, (lambda1 - intercept) / slope))
    return best


def _segments_basic(
    pi11: float, pi12: float, f11: float, f12: float
) -> tuple[tuple[BoundarySegment, ...], ShapeClass, float]:
    """Optimal-control boundary without simultaneous-success capability."""
    pi01, pi02 = 1.0 - pi11, 1.0 - pi12
    lam1_max = pi11 * f11
    segs: list[BoundarySegment] = []
    if pi01 + pi02 < 1.0:
        r1 = pi02 * pi02 * f11
        r2 = pi11 * pi11 * f11
        if r1 > 0.0:
            segs.append(
                BoundarySegment(
                    Linear(slope=-pi12 * f12 / (pi02 * f11), intercept=pi12 * f12),
                    0.0,
                    r1,
                )
            )
        segs.append(BoundarySegment(SqrtCurve(a1=1.0 / f11, a2=1.0 / f12), r1, r2))
        if lam1_max > r2:
            segs.append(
                BoundarySegment(
                    Linear(slope=-pi01 * f12 / (pi11 * f11), intercept=pi01 * f12),
                    r2,
                    lam1_max,
                )
            )
        return tuple(segs), ShapeClass.THREE_PIECE, lam1_max
    corner = pi11 * pi02 * f11
    if corner > 0.0:
        segs.append(
            BoundarySegment(
                Linear(slope=-pi12 * f12 / (pi02 * f11), intercept=pi12 * f12),
                0.0,
                min(corner, lam1_max),
            )
        )
    if lam1_max > corner:
        segs.append(
            BoundarySegment(
                Linear(slope=-pi01 * f12 / (pi11 * f11), intercept=pi01 * f12),
                corner,
                lam1_max,
            )
        )
    return tuple(segs), ShapeClass.POLYGON, lam1_max


def _segments_general(
    pi11: float, pi12: float, f11: float, f12: float, g1: float, g2: float
) -> tuple[tuple[BoundarySegment, ...], ShapeClass, float]:
    """Optimal-control boundary with per-user simultaneous-success factors.

    g_i = 1 - (simultaneous success of user i) / (sole success of user i);
    g1 = g2 = 1 reproduces the collision-only boundary exactly.
    """
    lam1_max = pi11 * f11
    c2 = 1.0 - pi12 * g1
    c1 = 1.0 - pi11 * g2
    shape_value = (1.0 - pi11) + (1.0 - pi12) + pi12 * (1.0 - g1) + pi11 * (1.0 - g2)
    segs: list[BoundarySegment] = []
    if shape_value < 1.0:
        # strict inequality forces g1 > 0 and g2 > 0, so divisions are safe
        r1 = f11 * c2 * c2 / g2
        r2 = pi11 * pi11 * f11 * g2
        if r1 > 0.0:
            segs.append(
                BoundarySegment(
                    Linear(slope=-pi12 * f12 * g2 / (f11 * c2), intercept=pi12 * f12),
                    0.0,
                    r1,
                )
            )
        segs.append(BoundarySegment(SqrtCurve(a1=g2 / f11, a2=g1 / f12), r1, r2))
        if lam1_max > r2:
            segs.append(
                BoundarySegment(
                    Linear(
                        slope=-f12 * c1 / (g1 * pi11 * f11),
                        intercept=f12 * c1 / g1,
                    ),
                    r2,
                    lam1_max,
                )
            )
        return tuple(segs), ShapeClass.THREE_PIECE, lam1_max
    corner = pi11 * f11 * c2
    if corner > 0.0:
        segs.append(
            BoundarySegment(
                Linear(slope=-pi12 * f12 * g2 / (f11 * c2), intercept=pi12 * f12),
                0.0,
                min(corner, lam1_max),
            )
        )
    if lam1_max > corner:
        # a nonempty second piece implies c2 < 1, hence g1 > 0
        segs.append(
            BoundarySegment(
                Linear(slope=-f12 * c1 / (g1 * pi11 * f11), intercept=f12 * c1 / g1),
                corner,
                lam1_max,
            )
        )
    return tuple(segs), ShapeClass.POLYGON, lam1_max


def closed_form_boundary(params: SystemParams) -> RegionBoundary:
    """Boundary of the union of all fixed-policy regions (bad-state silent).

    The shape splits on a single scalar: if the channels are good often enough
    (adjusted for simultaneous-success capability) the middle of the boundary
    is a strictly convex square-root arc flanked by lines, otherwise the whole
    boundary is two lines and the best policy is to always transmit when good.
    """
    require_valid(params)
    pi11, pi12 = _good_fractions(params)
    if pi11 * params.f11 <= 0.0 or pi12 * params.f12 <= 0.0:
        raise DegenerateService(
            "a user can never succeed (good fraction or success probability is "
            "zero): the region degenerates to an axis segment"
        )
    if params.mpr1 == 0.0 and params.mpr2 == 0.0:
        segs, shape, lam1_max = _segments_basic(pi11, pi12, params.f11, params.f12)
    else:
        g1 = 1.0 - params.mpr1 / params.f11
        g2 = 1.0 - params.mpr2 / params.f12
        segs, shape, lam1_max = _segments_general(
            pi11, pi12, params.f11, params.f12, g1, g2
        )
    return RegionBoundary(segments=segs, shape_class=shape, lambda1_max=lam1_max)


def boundary_value(boundary: RegionBoundary, lambda1: float) -> float:
    """Evaluate the boundary curve lambda2(lambda1)."""
    if not 0.0 <= lambda1 < boundary.lambda1_max:
        raise OutOfRange(
            f"lambda1={lambda1!r} outside [0, {boundary.lambda1_max!r})"
        )
    for seg in boundary.segments:
        if seg.lambda1_lo <= lambda1 < seg.lambda1_hi:
            return seg.value(lambda1)
    # unreachable for a well-formed boundary; guard against float gaps
    return boundary.segments[-1].value(lambda1)


def is_in_region(params: SystemParams, rates: ArrivalRates) -> Verdict:
    """Membership of an arrival pair in the optimal-control stability region."""
    errors = validate_arrivals(rates)
    if errors:
        raise ValueError("invalid arrival rates: " + "; ".join(errors))
    boundary = closed_form_boundary(params)
    l1, l2 = rates.lambda1, rates.lambda2
    if l1 >= boundary.lambda1_max:
        if abs(l1 - boundary.lambda1_max) <= BOUNDARY_TOL and l2 <= BOUNDARY_TOL:
            return Verdict.BOUNDARY
        return Verdict.UNSTABLE
    margin = boundary_value(boundary, l1) - l2
    if margin > BOUNDARY_TOL:
        return Verdict.STABLE
    if margin < -BOUNDARY_TOL:
        return Verdict.UNSTABLE
    return Verdict.BOUNDARY


def boundary_achieving_policy(params: SystemParams, lambda1: float) -> Policy:
    """Good-state transmission probabilities attaining the boundary at lambda1.

    Only defined without simultaneous-success capability.  The returned policy
    never transmits in the bad state, and its fixed-policy region's corner
    lands exactly on the optimal boundary above lambda1: on the square-root
    middle piece both probabilities are interior (q12 flattens the partner's
    trade-off, q11 makes the cross bound tight); on the outer linear pieces the
    loaded user transmits with probability one.
    """
    if params.mpr1 > 0.0 or params.mpr2 > 0.0:
        raise Unsupported(
            "boundary-achieving policies are characterized only without "
            "simultaneous-success capability"
        )
    boundary = closed_form_boundary(params)
    if not 0.0 <= lambda1 < boundary.lambda1_max:
        raise OutOfRange(
            f"lambda1={lambda1!r} outside [0, {boundary.lambda1_max!r})"
        )
    if boundary.shape_class is ShapeClass.POLYGON:
        return Policy(q11=1.0, q12=1.0)
    pi11, pi12 = _good_fractions(params)
    r1 = (1.0 - pi12) ** 2 * params.f11
    r2 = pi11 * pi11 * params.f11
    if lambda1 < r1:
        return Policy(q11=1.0, q12=1.0)
    if lambda1 < r2:
        x = math.sqrt(lambda1 / params.f11)
        q12 = (1.0 - x) / pi12
        q11 = x / pi11
        return Policy(q11=min(1.0, q11), q12=min(1.0, max(0.0, q12)))
    q12 = (1.0 - lambda1 / (pi11 * params.f11)) / pi12
    return Policy(q11=1.0, q12=min(1.0, max(0.0, q12)))


def _baseline_support(params: SystemParams, lambda1: float) -> tuple[float, float, float]:
    require_valid(params)
    pi11, pi12 = _good_fractions(params)
    lam1_max = pi11 * params.f11
    if lam1_max <= 0.0 or pi12 * params.f12 <= 0.0:
        raise DegenerateService(
            "a user can never succeed: baseline degenerates to an axis segment"
        )
    if not 0.0 <= lambda1 <= lam1_max:
        raise OutOfRange(f"lambda1={lambda1!r} outside [0, {lam1_max!r}]")
    return pi12, lam1_max, params.f12


def tdma_boundary(params: SystemParams, lambda1: float) -> float:
    """Time-sharing line between the two single-user saturated rates."""
    pi12, lam1_max, f12 = _baseline_support(params, lambda1)
    return pi12 * f12 * (1.0 - lambda1 / lam1_max)


def uncontrolled_boundary(params: SystemParams, lambda1: float) -> float:
    """Boundary of state-oblivious random access (no transmission control):
    sqrt(lambda1 / (pi1_1 f11)) + sqrt(lambda2 / (pi1_2 f12)) = 1."""
    pi12, lam1_max, f12 = _baseline_support(params, lambda1)
    root = 1.0 - math.sqrt(lambda1 / lam1_max)
    return pi12 * f12 * root * root
