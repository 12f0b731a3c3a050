"""Shared parameter types: success probabilities, transmission policy, arrivals.

Conventions used throughout the package:
  - user j's channel is good a long-run fraction pi1_j of slots;
  - f1j is the success probability of a sole transmission in the good state,
    bad-state transmissions always fail (never stored, identically zero);
  - mprj is the per-user success probability under simultaneous transmission
    (both channels good); mprj = 0 means plain collision loss;
  - qij is the probability user j transmits given channel state i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelParams, StationaryDist, stationary_distribution, validate_channel


class OutOfRange(ValueError):
    """Argument outside the operation's supported interval."""


class Unsupported(ValueError):
    """Parameter combination with no analytical characterization."""


@dataclass(frozen=True)
class SystemParams:
    """Both users' channels plus reception probabilities."""

    channel1: ChannelParams
    channel2: ChannelParams
    f11: float
    f12: float
    mpr1: float = 0.0  # success of user 1 when both transmit, 0 = collision loss
    mpr2: float = 0.0


@dataclass(frozen=True)
class Policy:
    """State-conditioned transmission probabilities.

    q11/q12: transmit probability in the good state (users 1/2).
    q01/q02: transmit probability in the bad state; 0 is always optimal since
    bad-state transmissions fail, so they default to 0.
    """

    q11: float
    q12: float
    q01: float = 0.0
    q02: float = 0.0


@dataclass(frozen=True)
class ArrivalRates:
    """Bernoulli arrival probabilities per slot."""

    lambda1: float
    lambda2: float


def _finite(v: object) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def validate(params: SystemParams) -> list[str]:
    """Return every violated invariant with its field name; empty means valid.

    Total: never raises, NaN and infinities are rejected explicitly.
    """
    errors = []
    for name in ("channel1", "channel2"):
        ch = getattr(params, name)
        if not isinstance(ch, ChannelParams):
            errors.append(f"{name} must be ChannelParams")
            continue
        errors.extend(f"{name}.{msg}" for msg in validate_channel(ch))
    for name in ("f11", "f12", "mpr1", "mpr2"):
        if not _finite(getattr(params, name)):
            errors.append(f"{name} must be a finite number")
    if errors:
        return errors
    if not 0.0 < params.f11 <= 1.0:
        errors.append("f11 must be positive and at most 1")
    if not 0.0 < params.f12 <= 1.0:
        errors.append("f12 must be positive and at most 1")
    if not 0.0 <= params.mpr1 <= params.f11:
        errors.append("mpr1 must be in [0, f11]: interference cannot improve success")
    if not 0.0 <= params.mpr2 <= params.f12:
        errors.append("mpr2 must be in [0, f12]: interference cannot improve success")
    return errors


def validate_policy(policy: Policy) -> list[str]:
    errors = []
    for name in ("q01", "q11", "q02", "q12"):
        v = getattr(policy, name)
        if not _finite(v):
            errors.append(f"{name} must be a finite number")
        elif not 0.0 <= v <= 1.0:
            errors.append(f"{name} must be in [0, 1]")
    return errors


def validate_arrivals(arrivals: ArrivalRates) -> list[str]:
    errors = []
    for name in ("lambda1", "lambda2"):
        v = getattr(arrivals, name)
        if not _finite(v):
            errors.append(f"{name} must be a finite number")
        elif not 0.0 <= v <= 1.0:
            errors.append(f"{name} must be in [0, 1] (Bernoulli arrivals)")
    return errors


def require_valid(params: SystemParams) -> None:
    errors = validate(params)
    if errors:
        raise ValueError("invalid system parameters: " + "; ".join(errors))


def stationary(params: SystemParams) -> tuple[StationaryDist, StationaryDist]:
    """Stationary distributions of both users' channels."""
    return stationary_distribution(params.channel1), stationary_distribution(params.channel2)


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario file: system parameters plus optional policy/arrivals."""

    system: SystemParams
    policy: Policy | None = None
    arrivals: ArrivalRates | None = None


class ScenarioError(ValueError):
    """Scenario dictionary malformed: unknown key, bad type, or bad value."""


def _take_number(obj: dict, key: str, where: str, default: float | None = None) -> float:
    if key not in obj:
        if default is not None:
            return default
        raise ScenarioError(f"{where}: missing required key '{key}'")
    v = obj.pop(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ScenarioError(f"{where}.{key}: expected a number, got {type(v).__name__}")
    return float(v)


def _reject_unknown(obj: dict, where: str) -> None:
    if obj:
        raise ScenarioError(f"{where}: unknown key(s) {sorted(obj)}")


def _channel_from_dict(obj: object, where: str) -> ChannelParams:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object with p_g2b, p_b2g")
    obj = dict(obj)
    ch = ChannelParams(
        p_g2b=_take_number(obj, "p_g2b", where),
        p_b2g=_take_number(obj, "p_b2g", where),
    )
    _reject_unknown(obj, where)
    return ch


def scenario_from_dict(data: object) -> Scenario:
    """Parse a scenario dictionary, rejecting unknown keys at every level.

    Schema: {channel1: {p_g2b, p_b2g}, channel2: {...}, f11, f12, mpr1, mpr2,
    policy?: {q01, q11, q02, q12}, arrivals?: {lambda1, lambda2}}.
    """
    if not isinstance(data, dict):
        raise ScenarioError("scenario: expected a JSON object at top level")
    data = dict(data)
    if "channel1" not in data or "channel2" not in data:
        raise ScenarioError("scenario: missing required key 'channel1' or 'channel2'")
    system = SystemParams(
        channel1=_channel_from_dict(data.pop("channel1"), "channel1"),
        channel2=_channel_from_dict(data.pop("channel2"), "channel2"),
        f11=_take_number(data, "f11", "scenario"),
        f12=_take_number(data, "f12", "scenario"),
        mpr1=_take_number(data, "mpr1", "scenario", default=0.0),
        mpr2=_take_number(data, "mpr2", "scenario", default=0.0),
    )
    policy = None
    if "policy" in data:
        p = data.pop("policy")
        if not isinstance(p, dict):
            raise ScenarioError("policy: expected an object with q01, q11, q02, q12")
        p = dict(p)
        policy = Policy(
            q11=_take_number(p, "q11", "policy"),
            q12=_take_number(p, "q12", "policy"),
            q01=_take_number(p, "q01", "policy", default=0.0),
            q02=_take_number(p, "q02", "policy", default=0.0),
        )
        _reject_unknown(p, "policy")
    arrivals = None
    if "arrivals" in data:
        a = data.pop("arrivals")
        if not isinstance(a, dict):
            raise ScenarioError("arrivals: expected an object with lambda1, lambda2")
        a = dict(a)
        arrivals = ArrivalRates(
            lambda1=_take_number(a, "lambda1", "arrivals"),
            lambda2=_take_number(a, "lambda2", "arrivals"),
        )
        _reject_unknown(a, "arrivals")
    _reject_unknown(data, "scenario")

    messages = validate(system)
    if policy is not None:
        messages += [f"policy.{m}" for m in validate_policy(policy)]
    if arrivals is not None:
        messages += [f"arrivals.{m}" for m in validate_arrivals(arrivals)]
    if messages:
        raise ScenarioError("; ".join(messages))
    return Scenario(system=system, policy=policy, arrivals=arrivals)


def apply_overrides(data: dict, overrides: list[str]) -> dict:
    """Apply 'dotted.path=value' overrides to a scenario dictionary.

    Intermediate objects are created as needed so a flag can both edit and
    extend a scenario (e.g. add arrivals to a file that has none).
    """
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in data.items()}
    for item in overrides:
        if "=" not in item:
            raise ScenarioError(f"override '{item}': expected key=value")
        path, _, raw = item.partition("=")
        keys = path.strip().split(".")
        if not all(keys):
            raise ScenarioError(f"override '{item}': empty key component")
        try:
            value = float(raw)
        except ValueError:
            raise ScenarioError(f"override '{item}': value must be a number") from None
        node = out
        for k in keys[:-1]:
            nxt = node.setdefault(k, {})
            if not isinstance(nxt, dict):
                raise ScenarioError(f"override '{item}': '{k}' is not an object")
            node = nxt
        node[keys[-1]] = value
    return out
