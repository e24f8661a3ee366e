"""Differential-drive and unicycle kinematics.

Heading convention: ``theta = 0`` points along +y and positive ``theta`` turns
counter-clockwise, so the body moves along ``(-sin(theta), cos(theta))``.
This differs from the more common "+x forward" convention; headings given
against +x (as in the pose-regulation literature) convert with
:func:`heading_from_x_axis`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


def wrap_angle(theta: float) -> float:
    """Wrap an angle to the half-open interval (-pi, pi]."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    wrapped = math.remainder(theta, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped = math.pi
    return wrapped


def heading_from_x_axis(theta_x: float) -> float:
    """Convert a heading measured from +x to this module's +y-referenced heading."""
    return wrap_angle(theta_x - math.pi / 2)


def heading_to_x_axis(theta: float) -> float:
    return wrap_angle(theta + math.pi / 2)


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Pose:
    """Planar configuration of the axle midpoint. ``theta`` is stored wrapped."""

    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        _require_finite(x=self.x, y=self.y, theta=self.theta)
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    @classmethod
    def from_x_heading(cls, x: float, y: float, theta_x: float) -> "Pose":
        """Build a pose from a heading measured counter-clockwise from +x."""
        return cls(x, y, heading_from_x_axis(theta_x))


@dataclass(frozen=True)
class BodyTwist:
    v: float
    omega: float

    def __post_init__(self) -> None:
        _require_finite(v=self.v, omega=self.omega)


@dataclass(frozen=True)
class WheelSpeeds:
    omega_l: float
    omega_r: float

    def __post_init__(self) -> None:
        _require_finite(omega_l=self.omega_l, omega_r=self.omega_r)


@dataclass(frozen=True)
class RobotGeometry:
    """Wheel radius and axle (back shaft) length, in meters.

    Defaults are the NXT platform constants.
    """

    wheel_radius: float = 0.0275
    axle_length: float = 0.135

    def __post_init__(self) -> None:
        if not (math.isfinite(self.wheel_radius) and self.wheel_radius > 0):
            raise ValueError(f"wheel_radius must be > 0, got {self.wheel_radius!r}")
        if not (math.isfinite(self.axle_length) and self.axle_length > 0):
            raise ValueError(f"axle_length must be > 0, got {self.axle_length!r}")


class PoseRate(NamedTuple):
    x_dot: float
    y_dot: float
    theta_dot: float


def pose_derivative(pose: Pose, twist: BodyTwist) -> PoseRate:
    return PoseRate(
        -twist.v * math.sin(pose.theta),
        twist.v * math.cos(pose.theta),
        twist.omega,
    )


def wheels_to_twist(wheels: WheelSpeeds, geom: RobotGeometry) -> BodyTwist:
    c, b = geom.wheel_radius, geom.axle_length
    return BodyTwist(
        v=(wheels.omega_l + wheels.omega_r) * c / 2.0,
        omega=(wheels.omega_r - wheels.omega_l) * c / b,
    )


def twist_to_wheels(twist: BodyTwist, geom: RobotGeometry) -> WheelSpeeds:
    c, half_b = geom.wheel_radius, geom.axle_length / 2.0
    return WheelSpeeds(
        omega_l=(twist.v - half_b * twist.omega) / c,
        omega_r=(twist.v + half_b * twist.omega) / c,
    )


def rk4_unicycle(
    x: float, y: float, theta: float, v: float, omega: float, dt: float, substeps: int
) -> tuple[float, float, float]:
    """Raw-float RK4 of the unicycle model under a constant (v, omega).

    Returns the unwrapped heading; callers wrap. Kept separate from
    :func:`integrate_pose` so the simulator's inner loop avoids object churn.
    """
    h = dt / substeps
    sin, cos = math.sin, math.cos
    for _ in range(substeps):
        # theta_dot is constant, so the stage headings are known up front
        th2 = theta + 0.5 * h * omega
        th4 = theta + h * omega
        s1, c1 = sin(theta), cos(theta)
        s2, c2 = sin(th2), cos(th2)
        s4, c4 = sin(th4), cos(th4)
        x += -v * h * (s1 + 4.0 * s2 + s4) / 6.0
        y += v * h * (c1 + 4.0 * c2 + c4) / 6.0
        theta = th4
    return x, y, theta


def integrate_pose(pose: Pose, twist: BodyTwist, dt: float, substeps: int = 1) -> Pose:
    """Advance ``pose`` by ``dt`` seconds with ``twist`` held constant.

    Classical fourth-order Runge-Kutta over ``substeps`` equal steps.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps!r}")
    x, y, theta = rk4_unicycle(pose.x, pose.y, pose.theta, twist.v, twist.omega, dt, int(substeps))
    return Pose(x, y, theta)
