"""NXT actuator and sensing emulation.

Covers the rad/s -> motor power calibration with the +/-100 clamp, whole-degree
wheel encoders, and odometry reconstructed from encoder counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kinematics import Pose, RobotGeometry

POWER_LIMIT = 100.0


@dataclass(frozen=True)
class MotorCalibration:
    """Linear map from wheel speed in deg/s to motor power units."""

    rad_to_deg: float = 57.2957
    power_per_degps: float = 0.1010
    power_offset: float = 0.4372

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rad_to_deg) and self.rad_to_deg > 0):
            raise ValueError(f"rad_to_deg must be > 0, got {self.rad_to_deg!r}")
        if not (math.isfinite(self.power_per_degps) and self.power_per_degps > 0):
            raise ValueError(f"power_per_degps must be > 0, got {self.power_per_degps!r}")
        if not (math.isfinite(self.power_offset) and self.power_offset >= 0):
            raise ValueError(f"power_offset must be >= 0, got {self.power_offset!r}")

    @property
    def power_per_radps(self) -> float:
        return self.rad_to_deg * self.power_per_degps


@dataclass(frozen=True)
class PowerCommand:
    """Clamped motor power. ``raw`` keeps the unclamped calibration output."""

    value: float
    saturated: bool = False
    raw: float | None = None

    def __post_init__(self) -> None:
        if not abs(self.value) <= POWER_LIMIT:
            raise ValueError(f"|power| must be <= {POWER_LIMIT:g}, got {self.value!r}")
        if self.raw is None:
            object.__setattr__(self, "raw", float(self.value))


@dataclass(frozen=True)
class EncoderState:
    ticks: int = 0


@dataclass(frozen=True)
class OdometryState:
    pose_estimate: Pose
    last_ticks_l: int = 0
    last_ticks_r: int = 0


def raw_power(omega: float, calib: MotorCalibration) -> float:
    """Unclamped power for a wheel speed; the offset follows the sign of ``omega``."""
    if omega == 0:
        return 0.0
    return omega * calib.power_per_radps + math.copysign(calib.power_offset, omega)


def wheel_speed_to_power(omega: float, calib: MotorCalibration = MotorCalibration()) -> PowerCommand:
    if not math.isfinite(omega):
        raise ValueError(f"wheel speed must be finite, got {omega!r}")
    raw = raw_power(omega, calib)
    value = min(POWER_LIMIT, max(-POWER_LIMIT, raw))
    return PowerCommand(value, abs(raw) > POWER_LIMIT, raw)


def speed_from_power(power: float, calib: MotorCalibration) -> float:
    """Inverse calibration on a bare number; zero inside the dead zone."""
    if abs(power) <= calib.power_offset:
        return 0.0
    return (power - math.copysign(calib.power_offset, power)) / calib.power_per_radps


def power_to_wheel_speed(power: PowerCommand, calib: MotorCalibration = MotorCalibration()) -> float:
    return speed_from_power(power.value, calib)


_TICK_SNAP = 1e-9


def encoder_update(enc: EncoderState, wheel_angle: float) -> EncoderState:
    """Quantize a cumulative wheel angle (rad) to whole degrees, truncating toward zero.

    Values within 1e-9 deg of a whole degree snap to it, so whole-degree
    angles survive the rad -> deg conversion exactly.
    """
    if not math.isfinite(wheel_angle):
        raise ValueError(f"wheel angle must be finite, got {wheel_angle!r}")
    deg = math.degrees(wheel_angle)
    nearest = round(deg)
    if abs(deg - nearest) <= _TICK_SNAP * max(1.0, abs(deg)):
        return EncoderState(int(nearest))
    return EncoderState(math.trunc(deg))


def odometry_update(
    odo: OdometryState, ticks_l: int, ticks_r: int, geom: RobotGeometry = RobotGeometry()
) -> OdometryState:
    """Dead-reckon the pose from new cumulative encoder counts (midpoint rule)."""
    c, b = geom.wheel_radius, geom.axle_length
    dphi_l = math.radians(ticks_l - odo.last_ticks_l)
    dphi_r = math.radians(ticks_r - odo.last_ticks_r)
    ds = c * (dphi_l + dphi_r) / 2.0
    dtheta = c * (dphi_r - dphi_l) / b
    p = odo.pose_estimate
    mid = p.theta + dtheta / 2.0
    pose = Pose(p.x - ds * math.sin(mid), p.y + ds * math.cos(mid), p.theta + dtheta)
    return OdometryState(pose, int(ticks_l), int(ticks_r))
