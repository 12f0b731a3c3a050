"""Stability regions and delay optimization for two-user slotted random access
over two-state (good/bad) Markov channels with channel-aware transmission
control, validated by brute-force oracles and a slot-level simulator."""

from .channel import (
    ChannelParams,
    ChannelState,
    DegenerateChain,
    StationaryDist,
    from_stationary,
    stationary_distribution,
)
from .delay import (
    ComplexRoots,
    SymmetricParams,
    Unstable,
    average_delay,
    delay_roots,
    lambda_max,
    lambda_star,
    optimal_q11,
    stability_roots,
)
from .model import (
    ArrivalRates,
    OutOfRange,
    Policy,
    Scenario,
    ScenarioError,
    SystemParams,
    Unsupported,
    scenario_from_dict,
)
from .oracle import GridBoundary, brute_force_optimal_q, grid_union_boundary
from .sim import (
    ConfigInvalid,
    RateEstimate,
    SimConfig,
    SimMode,
    SimStats,
    SimVerdict,
    detect_stability,
    estimate_service_rates,
    run,
    run_trace,
)
from .stability import (
    DegenerateService,
    FixedPolicyRegion,
    RegionBoundary,
    ShapeClass,
    Verdict,
    boundary_achieving_policy,
    boundary_value,
    closed_form_boundary,
    fixed_policy_boundary,
    fixed_policy_region,
    is_in_region,
    is_stable_fixed,
    tdma_boundary,
    uncontrolled_boundary,
)

__version__ = "0.1.0"

__all__ = [
    "ArrivalRates",
    "ChannelParams",
    "ChannelState",
    "ComplexRoots",
    "ConfigInvalid",
    "DegenerateChain",
    "DegenerateService",
    "FixedPolicyRegion",
    "GridBoundary",
    "OutOfRange",
    "Policy",
    "RateEstimate",
    "RegionBoundary",
    "Scenario",
    "ScenarioError",
    "ShapeClass",
    "SimConfig",
    "SimMode",
    "SimStats",
    "SimVerdict",
    "StationaryDist",
    "SymmetricParams",
    "SystemParams",
    "Unstable",
    "Unsupported",
    "Verdict",
    "average_delay",
    "boundary_achieving_policy",
    "boundary_value",
    "brute_force_optimal_q",
    "closed_form_boundary",
    "delay_roots",
    "detect_stability",
    "estimate_service_rates",
    "fixed_policy_boundary",
    "fixed_policy_region",
    "from_stationary",
    "grid_union_boundary",
    "is_in_region",
    "is_stable_fixed",
    "lambda_max",
    "lambda_star",
    "optimal_q11",
    "run",
    "run_trace",
    "scenario_from_dict",
    "stability_roots",
    "stationary_distribution",
    "tdma_boundary",
    "uncontrolled_boundary",
]
