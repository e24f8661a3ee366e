"""Deterministic closed-loop simulation of the NXT control loop.

One control period: read quantized encoders, update odometry, run the
controller on the odometry (or true) pose, convert the twist to wheel speeds
and motor power, then integrate the plant with the applied wheel speeds held
for the whole period.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

from .hardware import (
    EncoderState,
    MotorCalibration,
    OdometryState,
    PowerCommand,
    encoder_update,
    odometry_update,
    speed_from_power,
    wheel_speed_to_power,
)
from .kinematics import (
    BodyTwist,
    Pose,
    RobotGeometry,
    WheelSpeeds,
    rk4_unicycle,
    twist_to_wheels,
    wheels_to_twist,
    wrap_angle,
)
from .regulator import (
    GoalSpec,
    PolarState,
    RampConfig,
    RegulatorGains,
    effective_gains,
    polar_transform,
    regulator_control,
)
from .tracking import (
    DEFAULT_EPSILON_V,
    ReferenceTooSlowError,
    TrackingDesignSpec,
    TrackingError,
    TrackingGains,
    design_gains,
    tracking_control,
    tracking_error,
)
from .trajectory import ReferenceProfile, reference_at

log = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e6
MODES = ("tracking", "regulation")


class ConfigError(ValueError):
    """Invalid scenario configuration. ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ScenarioConfig:
    mode: str
    geometry: RobotGeometry = RobotGeometry()
    initial_pose: Pose = Pose(0.0, 0.0, 0.0)
    # regulation
    goal: Optional[GoalSpec] = None
    regulator_gains: RegulatorGains = RegulatorGains()
    ramp: RampConfig = RampConfig()
    # tracking; fixed tracking_gains take precedence over the design
    profile: Optional[ReferenceProfile] = None
    design: TrackingDesignSpec = TrackingDesignSpec()
    tracking_gains: Optional[TrackingGains] = None
    epsilon_v: float = DEFAULT_EPSILON_V
    calibration: MotorCalibration = MotorCalibration()
    control_period: float = 0.03
    plant_substep: float = 0.001
    max_time: float = 60.0
    r_stop: float = 0.01
    theta_stop: float = 0.05
    use_odometry: bool = True
    clamp_power: bool = True
    ramp_enabled: bool = True

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError("mode", f"must be one of {MODES}, got {self.mode!r}")
        for key in ("control_period", "plant_substep", "max_time", "epsilon_v"):
            value = getattr(self, key)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(key, f"must be > 0, got {value!r}")
        if self.plant_substep > self.control_period:
            raise ConfigError("plant_substep", "must not exceed control_period")
        for key in ("r_stop", "theta_stop"):
            value = getattr(self, key)
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError(key, f"must be >= 0, got {value!r}")
        if self.mode == "regulation" and self.goal is None:
            raise ConfigError("goal", "required in regulation mode")
        if self.mode == "tracking" and self.profile is None:
            raise ConfigError("profile", "required in tracking mode")

    @property
    def substeps(self) -> int:
        return max(1, round(self.control_period / self.plant_substep))

    @property
    def n_periods(self) -> int:
        # tolerate float noise such as 10 / 0.03 = 333.33...
        return max(1, math.ceil(self.max_time / self.control_period - 1e-9))


@dataclass(frozen=True)
class StepRecord:
    t: float
    pose_true: Pose
    pose_odo: Pose
    error_state: Union[TrackingError, PolarState]
    twist_cmd: BodyTwist
    wheel_cmds: WheelSpeeds
    power_l: PowerCommand
    power_r: PowerCommand
    saturated: bool


@dataclass(frozen=True)
class SimState:
    """Everything carried from one control period to the next."""

    k: int
    pose_true: Pose
    wheel_angle_l: float = 0.0
    wheel_angle_r: float = 0.0
    odometry: Optional[OdometryState] = None

    def __post_init__(self) -> None:
        if self.odometry is None:
            object.__setattr__(self, "odometry", OdometryState(self.pose_true))


@dataclass(frozen=True)
class SimSummary:
    final_time: float
    final_pose_true: Pose
    final_pose_odo: Pose
    initial_error_norm: float
    final_error: tuple[float, float, float]
    final_error_norm: float
    rms_error_norm: float
    peak_abs_power: float
    peak_abs_raw_power: float
    saturation_count: int
    converged: bool
    diverged: bool
    n_steps: int
    wall_time: float = field(compare=False)


@dataclass(frozen=True)
class SimTrace:
    config: ScenarioConfig
    records: tuple[StepRecord, ...]
    summary: SimSummary


# controller(pose_seen, t) -> (twist, error_state, converged)
Controller = Callable[[Pose, float], "tuple[BodyTwist, Union[TrackingError, PolarState], bool]"]


class _Diverged(Exception):
    pass


def _finite_pose(x: float, y: float, theta: float) -> Pose:
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(theta)):
        raise _Diverged
    if math.hypot(x, y) > DIVERGENCE_LIMIT:
        raise _Diverged
    return Pose(x, y, theta)


def step(config: ScenarioConfig, state: SimState, controller: Controller) -> tuple[StepRecord, SimState, bool]:
    """Run one control period. Returns the record, the next state and the
    controller's convergence flag for this sample."""
    t = state.k * config.control_period
    ticks_l = encoder_update(EncoderState(), state.wheel_angle_l).ticks
    ticks_r = encoder_update(EncoderState(), state.wheel_angle_r).ticks
    odo = odometry_update(state.odometry, ticks_l, ticks_r, config.geometry)
    seen = odo.pose_estimate if config.use_odometry else state.pose_true

    twist, err, converged = controller(seen, t)
    wheels = twist_to_wheels(twist, config.geometry)
    cal = config.calibration
    p_l = wheel_speed_to_power(wheels.omega_l, cal)
    p_r = wheel_speed_to_power(wheels.omega_r, cal)
    if config.clamp_power:
        w_l = speed_from_power(p_l.value, cal)
        w_r = speed_from_power(p_r.value, cal)
    else:
        w_l = speed_from_power(p_l.raw, cal)
        w_r = speed_from_power(p_r.raw, cal)

    applied = wheels_to_twist(WheelSpeeds(w_l, w_r), config.geometry)
    T = config.control_period
    p = state.pose_true
    x, y, theta = rk4_unicycle(p.x, p.y, p.theta, applied.v, applied.omega, T, config.substeps)
    record = StepRecord(
        t=t,
        pose_true=state.pose_true,
        pose_odo=odo.pose_estimate,
        error_state=err,
        twist_cmd=twist,
        wheel_cmds=wheels,
        power_l=p_l,
        power_r=p_r,
        saturated=p_l.saturated or p_r.saturated,
    )
    nxt = SimState(
        k=state.k + 1,
        pose_true=_finite_pose(x, y, theta),
        wheel_angle_l=state.wheel_angle_l + w_l * T,
        wheel_angle_r=state.wheel_angle_r + w_r * T,
        odometry=odo,
    )
    return record, nxt, converged


def _regulation_controller(config: ScenarioConfig) -> Controller:
    goal = config.goal
    goal_theta = goal.goal_pose.theta

    def control(pose: Pose, t: float):
        r = math.hypot(goal.goal_pose.x - pose.x, goal.goal_pose.y - pose.y)
        state = polar_transform(pose, goal, config.r_stop)
        if r < config.r_stop:
            converged = abs(wrap_angle(pose.theta - goal_theta)) < config.theta_stop
            return BodyTwist(0.0, 0.0), state, converged
        gains = config.regulator_gains
        if config.ramp_enabled:
            gains = effective_gains(gains, config.ramp, t, r)
        return regulator_control(state, gains), state, False

    return control


def _tracking_controller(config: ScenarioConfig) -> Controller:
    profile = config.profile
    fixed = config.tracking_gains
    last: list[TrackingGains] = []

    def control(pose: Pose, t: float):
        ref = reference_at(profile, t)
        err = tracking_error(pose, ref)
        if fixed is not None:
            gains = fixed
        elif ref.v_ref == 0.0 and ref.omega_ref == 0.0 and t >= profile.duration and last:
            # past the end of the profile: keep the last design
            gains = last[0]
        else:
            gains = design_gains(config.design, ref.v_ref, ref.omega_ref, config.epsilon_v)
            last[:] = [gains]
        return tracking_control(err, ref, gains), err, False

    return control


def _check_profile_speeds(config: ScenarioConfig) -> None:
    if config.tracking_gains is not None:
        return
    for i, seg in enumerate(config.profile.segments):
        if abs(seg.v_ref) < config.epsilon_v:
            raise ReferenceTooSlowError(
                f"reference too slow: segment {i} has |v_ref| = {abs(seg.v_ref):g} m/s "
                f"< epsilon_v = {config.epsilon_v:g} m/s"
            )


def _true_error(config: ScenarioConfig, pose: Pose, t: float) -> tuple[float, float, float]:
    if config.mode == "tracking":
        return tracking_error(pose, reference_at(config.profile, t)).as_tuple()
    return polar_transform(pose, config.goal).as_tuple()


def _run(config: ScenarioConfig, controller: Controller) -> SimTrace:
    started = time.perf_counter()
    state = SimState(0, config.initial_pose)
    records: list[StepRecord] = []
    converged = diverged = False
    for _ in range(config.n_periods):
        try:
            record, state, converged = step(config, state, controller)
        except _Diverged:
            diverged = True
            break
        records.append(record)
        if converged:
            break
    if diverged:
        log.warning("run diverged at t=%.3f s", state.k * config.control_period)

    final_time = state.k * config.control_period
    if diverged:
        # the last finite sample stands in for the final state
        final_time = records[-1].t if records else 0.0
        final_pose = records[-1].pose_true if records else config.initial_pose
        final_odo = records[-1].pose_odo if records else config.initial_pose
    else:
        final_pose = state.pose_true
        final_odo = state.odometry.pose_estimate

    initial_err = _true_error(config, config.initial_pose, 0.0)
    final_err = _true_error(config, final_pose, final_time)
    norms = [_norm(_true_error(config, rec.pose_true, rec.t)) for rec in records]
    norms.append(_norm(final_err))
    summary = SimSummary(
        final_time=final_time,
        final_pose_true=final_pose,
        final_pose_odo=final_odo,
        initial_error_norm=_norm(initial_err),
        final_error=final_err,
        final_error_norm=_norm(final_err),
        rms_error_norm=math.sqrt(sum(n * n for n in norms) / len(norms)),
        peak_abs_power=max((max(abs(r.power_l.value), abs(r.power_r.value)) for r in records), default=0.0),
        peak_abs_raw_power=max((max(abs(r.power_l.raw), abs(r.power_r.raw)) for r in records), default=0.0),
        saturation_count=sum(r.saturated for r in records),
        converged=converged,
        diverged=diverged,
        n_steps=len(records),
        wall_time=time.perf_counter() - started,
    )
    return SimTrace(config, tuple(records), summary)


def _norm(v) -> float:
    return math.sqrt(sum(c * c for c in v))


def run_regulation(config: ScenarioConfig) -> SimTrace:
    if config.mode != "regulation":
        raise ConfigError("mode", f"run_regulation needs mode 'regulation', got {config.mode!r}")
    return _run(config, _regulation_controller(config))


def run_tracking(config: ScenarioConfig) -> SimTrace:
    if config.mode != "tracking":
        raise ConfigError("mode", f"run_tracking needs mode 'tracking', got {config.mode!r}")
    _check_profile_speeds(config)
    return _run(config, _tracking_controller(config))


def run(config: ScenarioConfig) -> SimTrace:
    if config.mode == "tracking":
        return run_tracking(config)
    return run_regulation(config)


def parking_scenario(**overrides) -> ScenarioConfig:
    """Drive from (0, 0) to (1, 1) with ramped default gains and clamped power.

    The headings pi/2 (start) and pi (goal) are measured from +x, as in the
    position-control literature, and converted to the +y-referenced frame.
    """
    base = ScenarioConfig(
        mode="regulation",
        initial_pose=Pose.from_x_heading(0.0, 0.0, math.pi / 2),
        goal=GoalSpec(Pose.from_x_heading(1.0, 1.0, math.pi)),
    )
    return replace(base, **overrides)
