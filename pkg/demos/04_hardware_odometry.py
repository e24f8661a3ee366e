"""Motor power calibration, degree encoders and the odometry they feed."""
# %%
import math

from diffdrive import (
    EncoderState,
    OdometryState,
    Pose,
    PowerCommand,
    RobotGeometry,
    encoder_update,
    odometry_update,
    power_to_wheel_speed,
    wheel_speed_to_power,
)

for w in (0.0, 1.0, -1.0, 10.0, 20.0):
    p = wheel_speed_to_power(w)
    print(f"{w:6.1f} rad/s -> power {p.value:7.3f} (raw {p.raw:7.3f}, saturated={p.saturated})")

print("top speed at full power:", round(power_to_wheel_speed(PowerCommand(100.0)), 3), "rad/s")
print("dead zone: power 0.4 ->", power_to_wheel_speed(PowerCommand(0.4)))

# %% encoders count whole degrees
for angle in (0.0, math.radians(0.9999), math.radians(1.5), -math.radians(1.5), 2 * math.pi):
    print(f"{angle:+.5f} rad -> {encoder_update(EncoderState(), angle).ticks} ticks")

# %% dead reckoning a quarter turn on the spot, then a short straight
geo = RobotGeometry()
odo = OdometryState(Pose(0, 0, 0))
spin = round(math.degrees(math.pi / 2 * geo.axle_length / 2 / geo.wheel_radius))
odo = odometry_update(odo, -spin, spin, geo)
odo = odometry_update(odo, -spin + 360, spin + 360, geo)
print("estimate:", odo.pose_estimate)
