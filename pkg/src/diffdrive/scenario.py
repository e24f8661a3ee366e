"""Scenario files: strict YAML schema -> :class:`ScenarioConfig`.

Example (regulation)::

    mode: regulation
    heading_axis: x          # headings below are measured from +x
    initial_pose: {x: 0, y: 0, theta: pi/2}
    goal: {x: 1, y: 1, theta: pi}
    gains: {k_r: 0.4, k_etheta: 2, k_thetaE: -1}
    ramp: {alpha_r: 0.1, alpha_etheta: 0.1, alpha_thetaE: 0.3, mode: time}

Angles accept numbers or arithmetic on ``pi`` such as ``"3*pi/4"``. Unknown
keys are rejected with their dotted path.
"""

from __future__ import annotations

import ast
import math
import operator
from pathlib import Path
from typing import Any, Iterable, Mapping

import yaml

from .hardware import MotorCalibration
from .kinematics import Pose, RobotGeometry, heading_from_x_axis
from .regulator import GoalSpec, RampConfig, RegulatorGains
from .sim import ConfigError, ScenarioConfig
from .tracking import TrackingDesignSpec, TrackingGains
from .trajectory import NAMED_PROFILES, Segment, named_profile, ReferenceProfile


class ScenarioError(ConfigError):
    pass


_POSE_KEYS = {"x", "y", "theta"}
_PROFILE_PARAMS = {
    "line": {"v", "duration"},
    "circle": {"v", "omega", "duration"},
    "s-curve": {"v", "omega", "arc_duration"},
}
_SCALARS = {
    "control_period",
    "plant_substep",
    "max_time",
    "r_stop",
    "theta_stop",
    "epsilon_v",
}
_FLAGS = {"use_odometry", "clamp_power", "ramp_enabled"}
_SECTIONS = {
    "geometry": {"wheel_radius", "axle_length"},
    "gains": {"k_r", "k_etheta", "k_thetaE"},
    "ramp": {"alpha_r", "alpha_etheta", "alpha_thetaE", "mode"},
    "design": {"xi", "omega_n"},
    "tracking_gains": {"k1", "k2", "k3"},
    "calibration": {"rad_to_deg", "power_per_degps", "power_offset"},
}
TOP_LEVEL_KEYS = (
    {"mode", "heading_axis", "initial_pose", "goal", "profile"} | _SCALARS | _FLAGS | set(_SECTIONS)
)

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_expr(node: ast.AST) -> float:
    if isinstance(node, ast.Expression):
        return _eval_expr(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _eval_expr(node.operand)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_expr(node.left), _eval_expr(node.right))
    raise ValueError("only numbers, pi and + - * / are allowed")


def _number(value: Any, key: str) -> float:
    if isinstance(value, bool):
        raise ScenarioError(key, f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            out = _eval_expr(ast.parse(value.strip(), mode="eval"))
        except (SyntaxError, ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(key, f"cannot parse {value!r} as a number: {exc}") from None
    else:
        raise ScenarioError(key, f"expected a number, got {value!r}")
    if not math.isfinite(out):
        raise ScenarioError(key, f"must be finite, got {value!r}")
    return out


def _flag(value: Any, key: str) -> bool:
    if not isinstance(value, bool):
        raise ScenarioError(key, f"expected true/false, got {value!r}")
    return value


def _mapping(value: Any, key: str, allowed: Iterable[str]) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ScenarioError(key, f"expected a mapping, got {type(value).__name__}")
    allowed = set(allowed)
    for k in value:
        if k not in allowed:
            path = f"{key}.{k}" if key else str(k)
            raise ScenarioError(path, f"unknown key (allowed: {', '.join(sorted(allowed))})")
    return value


def _numbers(section: Mapping[str, Any], key: str) -> dict[str, float]:
    return {k: _number(v, f"{key}.{k}") for k, v in section.items()}


def _build(key: str, factory, **kwargs):
    try:
        return factory(**kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(key, str(exc)) from None


def _pose(value: Any, key: str, heading_axis: str) -> Pose:
    section = _mapping(value, key, _POSE_KEYS)
    nums = _numbers(section, key)
    theta = nums.get("theta", 0.0)
    if heading_axis == "x":
        theta = heading_from_x_axis(theta)
    return _build(key, Pose, x=nums.get("x", 0.0), y=nums.get("y", 0.0), theta=theta)


def _profile(value: Any, heading_axis: str) -> ReferenceProfile:
    key = "profile"
    if not isinstance(value, Mapping):
        raise ScenarioError(key, f"expected a mapping, got {type(value).__name__}")
    if "segments" in value:
        section = _mapping(value, key, {"segments", "initial_pose"})
        start = _pose(section.get("initial_pose", {}), f"{key}.initial_pose", heading_axis)
        segs = section["segments"]
        if not isinstance(segs, list) or not segs:
            raise ScenarioError(f"{key}.segments", "expected a non-empty list of [v, omega, duration]")
        out = []
        for i, seg in enumerate(segs):
            path = f"{key}.segments[{i}]"
            if not isinstance(seg, (list, tuple)) or len(seg) != 3:
                raise ScenarioError(path, "expected [v_ref, omega_ref, duration]")
            v, omega, duration = (_number(s, path) for s in seg)
            out.append(_build(path, Segment, v_ref=v, omega_ref=omega, duration=duration))
        return _build(key, ReferenceProfile, initial_pose=start, segments=tuple(out))

    name = value.get("name")
    if name not in NAMED_PROFILES:
        raise ScenarioError(f"{key}.name", f"expected one of {sorted(NAMED_PROFILES)} or a segments list, got {name!r}")
    section = _mapping(value, key, {"name", "initial_pose"} | _PROFILE_PARAMS[name])
    params = {k: _number(v, f"{key}.{k}") for k, v in section.items() if k not in ("name", "initial_pose")}
    start = _pose(section.get("initial_pose", {}), f"{key}.initial_pose", heading_axis)
    return _build(key, named_profile, name=name, initial_pose=start, **params)


def parse_scenario(data: Any, mode: str | None = None) -> ScenarioConfig:
    """Validate a parsed scenario document. ``mode`` fills in a missing ``mode``
    key and must agree with it when both are present."""
    if data is None:
        data = {}
    data = _mapping(data, "", TOP_LEVEL_KEYS)
    file_mode = data.get("mode")
    if file_mode is not None and mode is not None and file_mode != mode:
        raise ScenarioError("mode", f"scenario is {file_mode!r} but {mode!r} was requested")
    mode = file_mode or mode
    if mode is None:
        raise ScenarioError("mode", "missing (tracking or regulation)")

    heading_axis = data.get("heading_axis", "y")
    if heading_axis not in ("x", "y"):
        raise ScenarioError("heading_axis", f"expected 'x' or 'y', got {heading_axis!r}")

    kwargs: dict[str, Any] = {"mode": mode}
    if "initial_pose" in data:
        kwargs["initial_pose"] = _pose(data["initial_pose"], "initial_pose", heading_axis)
    if "goal" in data:
        kwargs["goal"] = GoalSpec(_pose(data["goal"], "goal", heading_axis))
    if "profile" in data:
        kwargs["profile"] = _profile(data["profile"], heading_axis)

    targets = {
        "geometry": ("geometry", RobotGeometry),
        "gains": ("regulator_gains", RegulatorGains),
        "design": ("design", TrackingDesignSpec),
        "tracking_gains": ("tracking_gains", TrackingGains),
        "calibration": ("calibration", MotorCalibration),
    }
    for section, (field_name, factory) in targets.items():
        if section in data:
            values = _numbers(_mapping(data[section], section, _SECTIONS[section]), section)
            if section == "tracking_gains" and set(values) != _SECTIONS[section]:
                raise ScenarioError(section, "k1, k2 and k3 are all required")
            kwargs[field_name] = _build(section, factory, **values)
    if "ramp" in data:
        ramp = _mapping(data["ramp"], "ramp", _SECTIONS["ramp"])
        values = {k: _number(v, f"ramp.{k}") for k, v in ramp.items() if k != "mode"}
        if "mode" in ramp:
            values["mode"] = ramp["mode"]
        kwargs["ramp"] = _build("ramp", RampConfig, **values)
    for key in _SCALARS:
        if key in data:
            kwargs[key] = _number(data[key], key)
    for key in _FLAGS:
        if key in data:
            kwargs[key] = _flag(data[key], key)
    return _build("scenario", ScenarioConfig, **kwargs)


def set_override(data: dict, assignment: str) -> None:
    """Apply ``dotted.key=value`` to a raw scenario dict in place; the value is
    parsed as YAML, so numbers, booleans and ``pi`` expressions all work."""
    if "=" not in assignment:
        raise ScenarioError(assignment, "override must look like key=value")
    path, raw = assignment.split("=", 1)
    keys = path.strip().split(".")
    if not all(keys):
        raise ScenarioError(path, "empty key in override")
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ScenarioError(path, f"cannot parse override value {raw!r}: {exc}") from None
    node = data
    for k in keys[:-1]:
        child = node.setdefault(k, {})
        if not isinstance(child, dict):
            raise ScenarioError(path, f"{k!r} is not a section")
        node = child
    node[keys[-1]] = value


def read_scenario_data(path: str | Path) -> dict:
    text = Path(path).read_text()  # OSError propagates: an I/O failure, not a bad scenario
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError("scenario", f"cannot parse {path}: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ScenarioError("scenario", "top level must be a mapping")
    return data


def load_scenario(
    path: str | Path, mode: str | None = None, overrides: Iterable[str] = ()
) -> ScenarioConfig:
    data = read_scenario_data(path)
    for assignment in overrides:
        set_override(data, assignment)
    return parse_scenario(data, mode)
