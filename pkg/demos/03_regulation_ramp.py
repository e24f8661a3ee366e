"""Parking at a goal pose with the polar regulator.

Drives from (0, 0) facing +y to (1, 1) facing -x. The gains are ramped in
with 1 - exp(-alpha t) so the first commands stay inside the motor range.
"""
# %%
import math

from diffdrive import RegulatorGains, parking_scenario, run, stability_check

gains = RegulatorGains(0.4, 2.0, -1.0)
print("stable:", bool(stability_check(gains)))
print("flipped k_thetaE:", stability_check(RegulatorGains(0.4, 2.0, 1.0)).violations)

# %% with and without the ramp
for ramp in (True, False):
    trace = run(parking_scenario(ramp_enabled=ramp))
    early = max(max(abs(r.power_l.raw), abs(r.power_r.raw)) for r in trace.records if r.t < 1)
    s = trace.summary
    print(f"ramp={ramp!s:5s} peak power in first second {early:6.1f}, saturated steps {s.saturation_count:3d}, "
          f"converged={s.converged} at t={s.final_time:.2f} s")

# %% where it ended up
trace = run(parking_scenario())
goal = trace.config.goal.goal_pose
end = trace.summary.final_pose_true
print(f"final pose {end}")
print(f"distance {math.hypot(end.x - goal.x, end.y - goal.y):.4f} m, "
      f"heading error {abs(math.remainder(end.theta - goal.theta, 2 * math.pi)):.4f} rad")

# %% a few samples of the polar error (r, e_theta, theta_E)
for rec in trace.records[::150]:
    print(f"t={rec.t:5.2f}", tuple(round(v, 4) for v in rec.error_state.as_tuple()))
