import numpy as np
import pytest

from aloha_ge.channel import from_stationary
from aloha_ge.delay import SymmetricParams, average_delay, optimal_q11
from aloha_ge.model import OutOfRange, SystemParams
from aloha_ge.oracle import (
    GridBoundary,
    boundary_csv_rows,
    brute_force_optimal_q,
    grid_union_boundary,
)
from aloha_ge.stability import boundary_value, closed_form_boundary


def system(pi1_1, pi1_2, f11=1.0, f12=1.0, mpr1=0.0, mpr2=0.0):
    return SystemParams(
        channel1=from_stationary(pi1_1),
        channel2=from_stationary(pi1_2),
        f11=f11, f12=f12, mpr1=mpr1, mpr2=mpr2,
    )


def worst_gap(params, grid_n=300, samples=40):
    gb = grid_union_boundary(params, grid_n=grid_n, lambda1_samples=samples)
    boundary = closed_form_boundary(params)
    return max(
        abs(y - boundary_value(boundary, x))
        for x, y in zip(gb.lambda1, gb.lambda2)
    )


def test_grid_matches_closed_form_three_piece():
    assert worst_gap(system(0.6, 0.6)) < 5e-3


def test_grid_matches_closed_form_polygon():
    assert worst_gap(system(0.4, 0.35, 0.9, 0.8)) < 5e-3


def test_grid_matches_closed_form_asymmetric():
    assert worst_gap(system(0.8, 0.45, 0.9, 0.7)) < 5e-3


def test_grid_matches_closed_form_with_mpr():
    assert worst_gap(system(0.8, 0.8, 1.0, 1.0, mpr1=0.2, mpr2=0.15)) < 5e-3
    # interference-immune partner: the region is a rectangle union
    assert worst_gap(system(0.7, 0.5, 0.9, 0.8, mpr1=0.9, mpr2=0.8)) < 5e-3


def test_grid_never_exceeds_closed_form():
    # the grid searches a subset of all policies, so it can only fall short
    params = system(0.7, 0.55, 0.95, 0.85)
    gb = grid_union_boundary(params, grid_n=300, lambda1_samples=60)
    boundary = closed_form_boundary(params)
    for x, y in zip(gb.lambda1, gb.lambda2):
        assert y <= boundary_value(boundary, x) + 1e-9


def test_grid_polygon_picks_full_transmission_for_user2():
    # on a polygon region the partner's best response at lambda1=0 is unique
    gb = grid_union_boundary(system(0.4, 0.4), grid_n=150, lambda1_samples=5)
    assert gb.q12_best[0] == 1.0
    assert gb.lambda2[0] == pytest.approx(0.4, abs=5e-3)


def test_grid_input_validation():
    with pytest.raises(ValueError, match="grid_n"):
        grid_union_boundary(system(0.6, 0.6), grid_n=50)
    with pytest.raises(ValueError, match="lambda1_samples"):
        grid_union_boundary(system(0.6, 0.6), lambda1_samples=0)


def test_boundary_csv_rows_schema():
    gb = GridBoundary(
        lambda1=np.array([0.0, 0.1]),
        lambda2=np.array([0.5, 0.4]),
        q11_best=np.array([1.0, 1.0]),
        q12_best=np.array([1.0, 0.9]),
    )
    rows = boundary_csv_rows(gb)
    assert rows == [(0.0, 0.5, "grid", "grid_oracle"), (0.1, 0.4, "grid", "grid_oracle")]
    assert all(isinstance(r[0], float) and isinstance(r[1], float) for r in rows)


# -- delay oracle ---------------------------------------------------------

def test_brute_force_matches_closed_form_interior():
    p = SymmetricParams(pi1=0.6, f11=1.0, lam=0.2)
    q_num, d_num = brute_force_optimal_q(p)
    assert q_num == pytest.approx(optimal_q11(p), abs=1e-3)
    assert d_num == pytest.approx(average_delay(p, optimal_q11(p)), rel=1e-6)


def test_brute_force_matches_closed_form_corner():
    # light load: the analytic optimum sits exactly at q11 = 1
    p = SymmetricParams(pi1=0.6, f11=1.0, lam=0.1)
    q_num, d_num = brute_force_optimal_q(p)
    assert q_num == 1.0
    assert d_num == pytest.approx(average_delay(p, 1.0), rel=1e-9)


def test_brute_force_mostly_bad_channel_never_throttles():
    p = SymmetricParams(pi1=0.35, f11=0.9, lam=0.15)
    q_num, _ = brute_force_optimal_q(p)
    assert q_num == 1.0


def test_brute_force_out_of_range():
    with pytest.raises(OutOfRange):
        brute_force_optimal_q(SymmetricParams(pi1=0.5, f11=1.0, lam=0.25))


def test_brute_force_random_instances():
    rng = np.random.default_rng(42)
    for _ in range(20):
        pi1 = rng.uniform(0.3, 0.95)
        f11 = rng.uniform(0.5, 1.0)
        lam = rng.uniform(0.1, 0.9) * lambda_max_of(pi1, f11)
        p = SymmetricParams(pi1, f11, lam)
        q_num, d_num = brute_force_optimal_q(p)
        q_ref = optimal_q11(p)
        assert abs(q_num - q_ref) < 1e-3
        assert d_num <= average_delay(p, q_ref) + 1e-9


def lambda_max_of(pi1, f11):
    return f11 / 4.0 if pi1 >= 0.5 else pi1 * (1.0 - pi1) * f11
