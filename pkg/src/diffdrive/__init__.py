"""Differential-drive robot control: trajectory tracking, polar pose
regulation with gain ramping, and an NXT-style closed-loop simulator."""

from .hardware import (
    EncoderState,
    MotorCalibration,
    OdometryState,
    PowerCommand,
    encoder_update,
    odometry_update,
    power_to_wheel_speed,
    wheel_speed_to_power,
)
from .kinematics import (
    BodyTwist,
    Pose,
    RobotGeometry,
    WheelSpeeds,
    integrate_pose,
    pose_derivative,
    twist_to_wheels,
    wheels_to_twist,
    wrap_angle,
)
from .regulator import (
    GoalSpec,
    PolarState,
    RampConfig,
    RegulatorGains,
    atan2_custom,
    effective_gains,
    polar_transform,
    regulator_control,
    stability_check,
)
from .scenario import load_scenario
from .sim import ScenarioConfig, SimTrace, parking_scenario, run, run_regulation, run_tracking
from .tracking import (
    TrackingDesignSpec,
    TrackingGains,
    characteristic_roots,
    design_gains,
    tracking_closed_loop_matrix,
    tracking_control,
    tracking_error,
)
from .trajectory import ReferenceProfile, circle_profile, line_profile, reference_at, s_curve_profile

__version__ = "0.1.0"
