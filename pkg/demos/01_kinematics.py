"""Unicycle kinematics: wheel/twist conversion and RK4 integration.

Headings are measured from +y, so theta = 0 drives straight up the y axis.
"""
# %%
import math

from diffdrive import BodyTwist, Pose, RobotGeometry, integrate_pose, twist_to_wheels, wheels_to_twist

geo = RobotGeometry()  # 27.5 mm wheels, 135 mm axle
print(geo)

# %% wheel speeds for a gentle left arc
tw = BodyTwist(0.2, 0.5)
wheels = twist_to_wheels(tw, geo)
print("wheels (rad/s):", wheels)
print("back to twist:", wheels_to_twist(wheels, geo))

# %% one lap of that circle, integrated with 1 ms RK4 steps
lap = 2 * math.pi / tw.omega
pose = integrate_pose(Pose(0, 0, 0), tw, lap, substeps=round(lap / 1e-3))
print(f"after one lap ({lap:.2f} s): {pose}")

# %% the closed form for comparison, half a lap in: centre is at (-v/w, 0)
half = integrate_pose(Pose(0, 0, 0), tw, lap / 2, substeps=6000)
r = tw.v / tw.omega
print(f"half lap: ({half.x:.9f}, {half.y:.9f}), expected ({-2 * r:.9f}, 0)")
