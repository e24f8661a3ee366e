"""Pose regulation in polar coordinates with exponential gain ramping."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .kinematics import BodyTwist, Pose, wrap_angle

R_SINGULAR = 1e-6


class PolarSingularityError(ValueError):
    """Polar dynamics are undefined at (or extremely near) the goal."""


def atan2_custom(y: float, x: float) -> float:
    """Four-quadrant arctangent built from a single-argument arctangent.

    Branches on ``y == 0`` first, then on the sign of ``x``. Returns a value in
    (-pi, pi]; ``atan2_custom(0, 0)`` is 0. For ``x < 0`` and a negative ``y``
    so small that ``y/x`` is below machine epsilon the sum rounds to exactly
    ``-pi``.
    """
    if y == 0:
        if x > 0:
            return 0.0
        if x == 0:
            return 0.0
        return math.pi
    sign_y = 1.0 if y > 0 else -1.0
    if x > 0:
        return math.atan(y / x)
    if x == 0:
        return (math.pi / 2) * sign_y
    return math.atan(y / x) + math.pi * sign_y


@dataclass(frozen=True)
class PolarState:
    """Distance to goal, bearing error and goal-frame heading term."""

    r: float
    e_theta: float
    theta_E: float

    def __post_init__(self) -> None:
        if not self.r >= 0:
            raise ValueError(f"r must be >= 0, got {self.r!r}")
        object.__setattr__(self, "e_theta", wrap_angle(self.e_theta))
        object.__setattr__(self, "theta_E", wrap_angle(self.theta_E))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r, self.e_theta, self.theta_E)

    def norm(self) -> float:
        return math.sqrt(self.r**2 + self.e_theta**2 + self.theta_E**2)


class PolarRate(NamedTuple):
    r_dot: float
    e_theta_dot: float
    theta_E_dot: float


@dataclass(frozen=True)
class RegulatorGains:
    k_r: float = 0.4
    k_etheta: float = 2.0
    k_thetaE: float = -1.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(k) for k in (self.k_r, self.k_etheta, self.k_thetaE)):
            raise ValueError("regulator gains must be finite")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.k_r, self.k_etheta, self.k_thetaE)


RAMP_MODES = ("time", "distance")


@dataclass(frozen=True)
class RampConfig:
    """Per-gain rates of the ``1 - exp(-alpha s)`` ramp.

    ``s`` is elapsed time in ``"time"`` mode and distance to goal in
    ``"distance"`` mode.
    """

    alpha_r: float = 0.1
    alpha_etheta: float = 0.1
    alpha_thetaE: float = 0.3
    mode: str = "time"

    def __post_init__(self) -> None:
        for name in ("alpha_r", "alpha_etheta", "alpha_thetaE"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be > 0, got {value!r}")
        if self.mode not in RAMP_MODES:
            raise ValueError(f"ramp mode must be one of {RAMP_MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class GoalSpec:
    goal_pose: Pose


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.stable


def polar_transform(pose: Pose, goal: GoalSpec, r_stop: float = 0.0) -> PolarState:
    """Polar error state of ``pose`` relative to ``goal``.

    The bearing of the goal is measured from +y, the same axis headings are
    measured from, so a robot facing the goal has ``e_theta == 0``. Inside
    ``r_stop`` the terminal state (0, 0, 0) is reported.
    """
    g = goal.goal_pose
    dx = g.x - pose.x
    dy = g.y - pose.y
    r = math.hypot(dx, dy)
    if r < r_stop:
        return PolarState(0.0, 0.0, 0.0)
    bearing = atan2_custom(-dx, dy)
    e_theta = wrap_angle(-pose.theta + bearing)
    theta_E = wrap_angle(-pose.theta - e_theta + g.theta)
    return PolarState(r, e_theta, theta_E)


def regulator_control(state: PolarState, gains: RegulatorGains) -> BodyTwist:
    return BodyTwist(
        gains.k_r * state.r,
        gains.k_etheta * state.e_theta + gains.k_thetaE * state.theta_E,
    )


def ramp_factor(alpha: float, s: float) -> float:
    if not s >= 0:
        raise ValueError(f"ramp argument must be >= 0, got {s!r}")
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha!r}")
    return -math.expm1(-alpha * s)


def effective_gains(base: RegulatorGains, ramp: RampConfig, t: float, r: float) -> RegulatorGains:
    s = t if ramp.mode == "time" else r
    return RegulatorGains(
        base.k_r * ramp_factor(ramp.alpha_r, s),
        base.k_etheta * ramp_factor(ramp.alpha_etheta, s),
        base.k_thetaE * ramp_factor(ramp.alpha_thetaE, s),
    )


def stability_check(gains: RegulatorGains) -> StabilityVerdict:
    """Strict sign conditions for the linearized regulator to be Hurwitz."""
    violations = []
    if not gains.k_r > 0:
        violations.append("k_r > 0")
    if not gains.k_thetaE < 0:
        violations.append("k_thetaE < 0")
    if not gains.k_etheta - gains.k_r > 0:
        violations.append("k_etheta - k_r > 0")
    return StabilityVerdict(not violations, tuple(violations))


def regulator_linearized_matrix(gains: RegulatorGains) -> np.ndarray:
    kr, ke, kt = gains.k_r, gains.k_etheta, gains.k_thetaE
    return np.array(
        [
            [-kr, 0.0, 0.0],
            [0.0, -(ke - kr), -kt],
            [0.0, -kr, 0.0],
        ]
    )


def regulator_nonlinear_derivative(
    state: PolarState, twist: BodyTwist, r_singular: float = R_SINGULAR
) -> PolarRate:
    if state.r <= r_singular:
        raise PolarSingularityError(
            f"polar singularity: r = {state.r:g} <= {r_singular:g}; use the terminal convention"
        )
    s = math.sin(state.e_theta)
    return PolarRate(
        -twist.v * math.cos(state.e_theta),
        twist.v * s / state.r - twist.omega,
        -twist.v * s / state.r,
    )
