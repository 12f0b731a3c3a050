import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aloha_ge.channel import ChannelParams
from aloha_ge.model import (
    ArrivalRates,
    Policy,
    Scenario,
    ScenarioError,
    SystemParams,
    apply_overrides,
    require_valid,
    scenario_from_dict,
    stationary,
    validate,
    validate_arrivals,
    validate_policy,
)


def make_system(f11=0.9, f12=0.8, mpr1=0.0, mpr2=0.0):
    return SystemParams(
        channel1=ChannelParams(p_g2b=0.4, p_b2g=0.6),
        channel2=ChannelParams(p_g2b=0.5, p_b2g=0.5),
        f11=f11, f12=f12, mpr1=mpr1, mpr2=mpr2,
    )


def test_validate_accepts_good_system():
    assert validate(make_system()) == []
    require_valid(make_system())  # should not raise


def test_validate_rejects_zero_success_probability():
    errors = validate(make_system(f11=0.0))
    assert any("f11" in e for e in errors)


def test_validate_rejects_mpr_above_sole_success():
    # simultaneous transmission cannot succeed more often than a sole one
    errors = validate(make_system(f11=0.5, mpr1=0.6))
    assert any("mpr1" in e for e in errors)
    assert validate(make_system(f11=0.5, mpr1=0.5)) == []


def test_validate_prefixes_channel_errors():
    bad = SystemParams(
        channel1=ChannelParams(p_g2b=1.5, p_b2g=0.5),
        channel2=ChannelParams(p_g2b=0.5, p_b2g=0.5),
        f11=0.9, f12=0.8,
    )
    errors = validate(bad)
    assert errors and errors[0].startswith("channel1.")


@given(v=st.floats(allow_nan=True, allow_infinity=True))
@settings(max_examples=50)
def test_validate_is_total(v):
    # validation must classify, never crash, whatever float lands in a field
    errors = validate(make_system(f11=v))
    assert (errors == []) == (math.isfinite(v) and 0.0 < v <= 1.0)


def test_validate_policy_checks_all_four_probabilities():
    errors = validate_policy(Policy(q11=1.2, q12=-0.1, q01=math.nan, q02=0.5))
    assert len(errors) == 3


def test_validate_arrivals():
    assert validate_arrivals(ArrivalRates(lambda1=0.2, lambda2=0.0)) == []
    assert validate_arrivals(ArrivalRates(lambda1=1.1, lambda2=0.2))
    assert validate_arrivals(ArrivalRates(lambda1=math.inf, lambda2=0.2))


def test_require_valid_raises_with_field_names():
    with pytest.raises(ValueError, match="f12"):
        require_valid(make_system(f12=2.0))


def test_stationary_returns_both_users():
    d1, d2 = stationary(make_system())
    assert math.isclose(d1.pi1, 0.6)
    assert math.isclose(d2.pi1, 0.5)


# -- scenario parsing ---------------------------------------------------

BASE = {
    "channel1": {"p_g2b": 0.4, "p_b2g": 0.6},
    "channel2": {"p_g2b": 0.4, "p_b2g": 0.6},
    "f11": 1.0,
    "f12": 1.0,
}


def test_scenario_minimal():
    sc = scenario_from_dict(dict(BASE))
    assert isinstance(sc, Scenario)
    assert sc.policy is None and sc.arrivals is None
    assert sc.system.mpr1 == 0.0 and sc.system.mpr2 == 0.0


def test_scenario_full():
    data = dict(BASE)
    data["policy"] = {"q11": 0.8, "q12": 0.7, "q01": 0.1}
    data["arrivals"] = {"lambda1": 0.2, "lambda2": 0.1}
    sc = scenario_from_dict(data)
    assert sc.policy == Policy(q11=0.8, q12=0.7, q01=0.1, q02=0.0)
    assert sc.arrivals == ArrivalRates(lambda1=0.2, lambda2=0.1)


def test_scenario_rejects_unknown_top_level_key():
    data = dict(BASE)
    data["typo"] = 1
    with pytest.raises(ScenarioError, match="typo"):
        scenario_from_dict(data)


def test_scenario_rejects_unknown_nested_key():
    data = dict(BASE)
    data["policy"] = {"q11": 0.8, "q12": 0.7, "q13": 0.5}
    with pytest.raises(ScenarioError, match="q13"):
        scenario_from_dict(data)


def test_scenario_rejects_bool_as_number():
    data = dict(BASE)
    data["f11"] = True
    with pytest.raises(ScenarioError, match="f11"):
        scenario_from_dict(data)


def test_scenario_rejects_missing_channel():
    with pytest.raises(ScenarioError, match="channel"):
        scenario_from_dict({"f11": 1.0, "f12": 1.0})


def test_scenario_rejects_invalid_values_with_context():
    data = dict(BASE)
    data["arrivals"] = {"lambda1": 2.0, "lambda2": 0.1}
    with pytest.raises(ScenarioError, match="arrivals.lambda1"):
        scenario_from_dict(data)


def test_scenario_rejects_non_dict():
    with pytest.raises(ScenarioError):
        scenario_from_dict([1, 2, 3])


def test_scenario_does_not_mutate_input():
    data = dict(BASE)
    data["policy"] = {"q11": 1.0, "q12": 1.0}
    snapshot = {k: dict(v) if isinstance(v, dict) else v for k, v in data.items()}
    scenario_from_dict(data)
    assert data == snapshot


# -- overrides ----------------------------------------------------------

def test_apply_overrides_edits_nested_value():
    out = apply_overrides(dict(BASE), ["channel1.p_g2b=0.2", "f11=0.5"])
    assert out["channel1"]["p_g2b"] == 0.2
    assert out["f11"] == 0.5
    assert BASE["channel1"]["p_g2b"] == 0.4  # input untouched


def test_apply_overrides_creates_missing_section():
    out = apply_overrides(dict(BASE), ["arrivals.lambda1=0.1", "arrivals.lambda2=0.2"])
    assert scenario_from_dict(out).arrivals == ArrivalRates(0.1, 0.2)


def test_apply_overrides_rejects_malformed():
    with pytest.raises(ScenarioError, match="key=value"):
        apply_overrides(dict(BASE), ["f11"])
    with pytest.raises(ScenarioError, match="number"):
        apply_overrides(dict(BASE), ["f11=big"])
    with pytest.raises(ScenarioError, match="empty"):
        apply_overrides(dict(BASE), [".f11=0.5"])
    with pytest.raises(ScenarioError, match="not an object"):
        apply_overrides(dict(BASE), ["f11.nested=0.5"])
