"""Choosing tracking gains from a damping ratio and natural frequency, then
checking where the closed-loop poles actually land."""
# %%
import numpy as np

from diffdrive import (
    Pose,
    ScenarioConfig,
    TrackingDesignSpec,
    characteristic_roots,
    circle_profile,
    design_gains,
    run_tracking,
    tracking_closed_loop_matrix,
)

v_ref, w_ref = 0.2, 0.5
for xi, wn in [(0.5, 1.0), (1.0, 1.0), (1.0, 2.0)]:
    g = design_gains(TrackingDesignSpec(xi, wn), v_ref, w_ref)
    roots = characteristic_roots(tracking_closed_loop_matrix(g, v_ref, w_ref))
    print(f"xi={xi} wn={wn}: k=({g.k1:.3f}, {g.k2:.3f}, {g.k3:.3f}) roots={np.round(roots, 6)}")

# %% asking for wn below |omega_ref| flips k2 negative and leaves a warning
g = design_gains(TrackingDesignSpec(1.0, 0.4), v_ref, w_ref)
print(g.warning)

# %% follow a circle from 10 cm off the path
prof = circle_profile(v_ref, w_ref, duration=30)
for use_odo in (False, True):
    cfg = ScenarioConfig(mode="tracking", profile=prof, initial_pose=Pose(0.1, 0, 0),
                         max_time=10, use_odometry=use_odo)
    s = run_tracking(cfg).summary
    label = "odometry" if use_odo else "truth"
    print(f"{label:9s} |e0|={s.initial_error_norm:.4f}  |e(10 s)|={s.final_error_norm:.6f}")
