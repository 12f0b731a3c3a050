"""Brute-force numerical references for the closed-form results.

These are deliberately independent of the analytical modules: the region
oracle maximizes the fixed-policy stability bound over a dense grid of
good-state transmission probabilities, and the delay oracle minimizes the mean
delay over a dense grid of policies followed by a golden-section refinement.
They exist so the closed forms can be checked against something that knows
nothing about piecewise boundary formulas or quadratic roots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import stationary_distribution
from .delay import SymmetricParams, lambda_max, stability_roots
from .model import OutOfRange, SystemParams, require_valid

_INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GridBoundary:
    """Union boundary sampled on a policy grid.

    lambda2[i] is the best stable lambda2 at lambda1[i] over all policy pairs
    (q11, q12) on the grid; q11_best/q12_best are the maximizing pair.
    """

    lambda1: np.ndarray
    lambda2: np.ndarray
    q11_best: np.ndarray
    q12_best: np.ndarray


def grid_union_boundary(
    params: SystemParams, grid_n: int = 400, lambda1_samples: int = 100
) -> GridBoundary:
    """Maximize the fixed-policy lambda2 bound over a (q11, q12) grid.

    For each sampled lambda1 (an even grid on [0, pi1_1*f11), right endpoint
    excluded) every policy pair contributes the larger of its two dominant
    bounds: the cross bound on lambda2 while lambda1 is below the pair's
    saturated rate, and the inverted bound on lambda1 beyond it.  Policies
    never transmit in the bad state.
    """
    require_valid(params)
    if grid_n < 100:
        raise ValueError(f"grid_n must be at least 100, got {grid_n!r}")
    if lambda1_samples < 1:
        raise ValueError(
            f"lambda1_samples must be positive, got {lambda1_samples!r}"
        )
    pi11 = stationary_distribution(params.channel1).pi1
    pi12 = stationary_distribution(params.channel2).pi1
    f11, f12 = params.f11, params.f12
    g1 = 1.0 - params.mpr1 / f11
    g2 = 1.0 - params.mpr2 / f12
    lam1_max = pi11 * f11

    q = np.linspace(0.0, 1.0, grid_n)
    a1 = (pi11 * q)[:, np.newaxis]  # rows: user-1 policy
    a2 = (pi12 * q)[np.newaxis, :]  # cols: user-2 policy
    solo1 = a1 * f11
    with np.errstate(divide="ignore", invalid="ignore"):
        mu1 = a1 * f11 * (1.0 - a2 * g1)
        # cross bound of the pair where user 2 is saturated:
        #   lambda2 < a2*f12 * (1 - g2*lambda1 / (f11*(1 - a2*g1)))
        b2_intercept = a2 * f12 * np.ones_like(a1)
        b2_slope = -(a2 * f12 * g2) / (f11 * (1.0 - a2 * g1)) * np.ones_like(a1)
        # the other pair bounds lambda1; invert it for lambda2 when g1 > 0
        if g1 > 0.0:
            inv_gain = f12 * (1.0 - a1 * g2) / g1
            inv_intercept = inv_gain * np.ones_like(a2)
            inv_slope = -inv_gain / (a1 * f11) * np.ones_like(a2)
        else:
            # user 2 is immune to interference; the pair is a rectangle
            inv_intercept = a2 * f12 * (1.0 - a1 * g2)
            inv_slope = np.zeros_like(inv_intercept)

    lam1 = np.linspace(0.0, lam1_max, lambda1_samples, endpoint=False)
    best = np.empty(lambda1_samples)
    best_q11 = np.empty(lambda1_samples)
    best_q12 = np.empty(lambda1_samples)
    for i, x in enumerate(lam1):
        # masked-out entries may evaluate to inf/nan before being discarded
        with np.errstate(invalid="ignore"):
            inverted = inv_intercept + inv_slope * x
            cand = np.where(
                x < mu1,
                b2_intercept + b2_slope * x,
                np.where(x < solo1, inverted, -np.inf),
            )
        flat = np.argmax(cand)
        r, c = np.unravel_index(flat, cand.shape)
        best[i] = cand[r, c]
        best_q11[i] = q[r]
        best_q12[i] = q[c]
    return GridBoundary(
        lambda1=lam1, lambda2=best, q11_best=best_q11, q12_best=best_q12
    )


def boundary_csv_rows(gb: GridBoundary) -> list[tuple[float, float, str, str]]:
    """Rows in the shared boundary-CSV schema (source column: grid_oracle)."""
    return [
        (float(x), float(y), "grid", "grid_oracle")
        for x, y in zip(gb.lambda1, gb.lambda2)
    ]


def _golden_min(fn, lo: float, hi: float, tol: float = 1e-9) -> float:
    """Golden-section minimizer of a unimodal scalar function on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _INV_GOLDEN * (b - a)
    x2 = a + _INV_GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_GOLDEN * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (b - a)
            f2 = fn(x2)
    return 0.5 * (a + b)


def brute_force_optimal_q(
    p: SymmetricParams, q_grid_n: int = 2000
) -> tuple[float, float]:
    """Numerically minimize the symmetric mean delay over q11.

    Grid scan over the stable interval (s1, min(s2, 1)] followed by a
    golden-section refinement around the best grid point.  Returns the
    minimizer and its delay.  Raises OutOfRange when no q11 is stable.
    """
    if p.lam >= lambda_max(p):
        raise OutOfRange(
            f"lam={p.lam!r} is not stabilizable (lambda_max={lambda_max(p)!r})"
        )
    s1, s2 = stability_roots(p)
    lo, hi = s1, min(s2, 1.0)

    def delay_at(q: float) -> float:
        a = p.pi1 * q
        denom = a * p.f11 * (1.0 - a) - p.lam
        if denom <= 0.0:
            return np.inf
        return ((1.0 - p.lam) - (1.0 - p.lam / 2.0) * a) / denom

    qs = np.linspace(lo, hi, q_grid_n)
    a = p.pi1 * qs
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = a * p.f11 * (1.0 - a) - p.lam
        delays = np.where(
            denom > 0.0,
            ((1.0 - p.lam) - (1.0 - p.lam / 2.0) * a) / denom,
            np.inf,
        )
    i = int(np.argmin(delays))
    bracket_lo = qs[max(0, i - 1)]
    bracket_hi = qs[min(q_grid_n - 1, i + 1)]
    q_best = _golden_min(delay_at, bracket_lo, bracket_hi)
    d_best = delay_at(q_best)
    # the minimum may sit exactly on the admissible edge q11 = 1
    if delay_at(hi) <= d_best:
        q_best, d_best = hi, delay_at(hi)
    return float(q_best), float(d_best)
