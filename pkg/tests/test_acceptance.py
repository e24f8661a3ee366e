"""Acceptance checks. Each test prints one ``PASS``/``FAIL`` line.

Run on its own with ``pytest tests/test_acceptance.py -v`` or
``python tests/test_acceptance.py``.
"""

import itertools
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from diffdrive.cli import main
from diffdrive.kinematics import BodyTwist, Pose, RobotGeometry, WheelSpeeds, rk4_unicycle, twist_to_wheels, wheels_to_twist
from diffdrive.regulator import RegulatorGains, atan2_custom, regulator_linearized_matrix, stability_check
from diffdrive.sim import ScenarioConfig, parking_scenario, run, run_tracking
from diffdrive.tracking import TrackingDesignSpec, characteristic_roots, design_gains, tracking_closed_loop_matrix
from diffdrive.trajectory import circle_profile

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, detail
    return emit


def _match(a, b):
    return min(max(abs(x - y) for x, y in zip(a, p)) for p in itertools.permutations(b))


def test_c1_tracking_spectral_design(report):
    rng = np.random.default_rng(20240601)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        xi = rng.uniform(0.3, 2.0)
        w_ref = rng.uniform(-1.0, 1.0)
        wn = rng.uniform(abs(w_ref) + 0.1, 5.0)
        v_ref = rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 1.0)
        gains = design_gains(TrackingDesignSpec(xi, wn), v_ref, w_ref)
        roots = characteristic_roots(tracking_closed_loop_matrix(gains, v_ref, w_ref))
        disc = complex(xi * xi - 1.0) ** 0.5
        target = [-2 * xi * wn, -xi * wn + wn * disc, -xi * wn - wn * disc]
        worst = max(worst, _match(roots, target))
    elapsed = time.perf_counter() - start
    report("C1 tracking spectral design", worst <= 1e-9 and elapsed < 2.0,
           f"max root error {worst:.2e} (<= 1e-9), {elapsed:.2f} s (< 2 s)")


def test_c2_regulator_stability_equivalence(report):
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    agree = total = 0
    while total < 10_000:
        g = RegulatorGains(*rng.uniform(-3, 3, 3))
        if min(abs(g.k_r), abs(g.k_thetaE), abs(g.k_etheta - g.k_r)) < 1e-6:
            continue
        eig = np.linalg.eigvals(regulator_linearized_matrix(g))
        agree += bool(stability_check(g)) == bool(np.all(eig.real < 0))
        total += 1
    elapsed = time.perf_counter() - start
    report("C2 regulator stability equivalence", agree == total and elapsed < 5.0,
           f"{agree}/{total} agree, {elapsed:.2f} s (< 5 s)")


def test_c3_parking_scenario_convergence(report):
    cfg = parking_scenario()
    start = time.perf_counter()
    trace = run(cfg)
    elapsed = time.perf_counter() - start
    s = trace.summary
    goal = cfg.goal.goal_pose
    r = math.hypot(s.final_pose_true.x - goal.x, s.final_pose_true.y - goal.y)
    # goal heading is pi measured from +x, i.e. pi/2 in the native +y frame
    heading_err = abs(math.remainder(s.final_pose_true.theta - goal.theta, 2 * math.pi))
    ok = s.converged and r < 0.02 and heading_err < 0.05 and s.final_time <= 60 and elapsed < 1.0
    report("C3 regulation scenario convergence", ok,
           f"r={r:.4f} m (< 0.02), heading error {heading_err:.4f} rad (< 0.05), "
           f"t={s.final_time:.2f} s (<= 60), wall {elapsed:.2f} s (< 1 s)")


def test_c4_ramp_efficacy(report):
    def peak(cfg):
        trace = run(cfg)
        return max(max(abs(r.power_l.raw), abs(r.power_r.raw)) for r in trace.records if r.t < 1.0)

    start = time.perf_counter()
    unramped = peak(parking_scenario(ramp_enabled=False, max_time=1.0))
    ramped = peak(parking_scenario(max_time=1.0))
    elapsed = time.perf_counter() - start
    ok = unramped > 100 and ramped < unramped and elapsed < 1.0
    report("C4 ramp efficacy", ok,
           f"peak |power| unramped {unramped:.1f} (> 100), ramped {ramped:.1f}, {elapsed:.2f} s (< 1 s)")


def test_c5_atan2_oracle(report):
    rng = np.random.default_rng(99)
    start = time.perf_counter()
    pts = list(zip(rng.uniform(-10, 10, 100_000), rng.uniform(-10, 10, 100_000)))
    for a in (1e-300, 1e-8, 1.0, 1e8):
        pts += [(0.0, a), (0.0, -a), (a, 0.0), (-a, 0.0), (a, a), (-a, a), (a, -a), (-a, -a)]
    worst = 0.0
    for y, x in pts:
        worst = max(worst, abs(atan2_custom(y, x) - math.atan2(y, x)))
    origin = atan2_custom(0.0, 0.0)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and origin == 0.0 and elapsed < 1.0
    report("C5 atan2 oracle", ok, f"max error {worst:.1e} (<= 1e-12), (0,0) -> {origin}, {elapsed:.2f} s (< 1 s)")


def test_c6_kinematics_fidelity(report):
    start = time.perf_counter()
    v, w = 0.2, 0.5
    x, y, th = 0.0, 0.0, 0.0
    worst = 0.0
    for k in range(1, 10_001):
        x, y, th = rk4_unicycle(x, y, th, v, w, 1e-3, 1)
        t = k * 1e-3
        worst = max(worst, math.hypot(x + v / w * (1 - math.cos(w * t)), y - v / w * math.sin(w * t)))
    geo = RobotGeometry()
    rng = np.random.default_rng(3)
    trip = 0.0
    for v_, w_ in rng.uniform(-2, 2, (1000, 2)):
        back = wheels_to_twist(twist_to_wheels(BodyTwist(v_, w_), geo), geo)
        trip = max(trip, abs(back.v - v_), abs(back.omega - w_))
        wl, wr = rng.uniform(-20, 20, 2)
        again = twist_to_wheels(wheels_to_twist(WheelSpeeds(wl, wr), geo), geo)
        trip = max(trip, abs(again.omega_l - wl), abs(again.omega_r - wr))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and trip <= 1e-12 and elapsed < 1.0
    report("C6 kinematics fidelity", ok,
           f"RK4 position error {worst:.1e} m (<= 1e-6), round trip {trip:.1e} (<= 1e-12), {elapsed:.2f} s (< 1 s)")


def test_c7_tracking_convergence(report):
    prof = circle_profile(0.2, 0.5, duration=30.0)
    base = dict(mode="tracking", profile=prof, initial_pose=Pose(0.1, 0.0, 0.0),
                design=TrackingDesignSpec(1.0, 1.0), max_time=10.0)
    start = time.perf_counter()
    truth = run_tracking(ScenarioConfig(**base, use_odometry=False)).summary
    odo = run_tracking(ScenarioConfig(**base, use_odometry=True)).summary
    elapsed = time.perf_counter() - start
    rt = truth.final_error_norm / truth.initial_error_norm
    ro = odo.final_error_norm / odo.initial_error_norm
    ok = rt <= 0.01 and ro <= 0.05 and elapsed < 1.0
    report("C7 tracking convergence", ok,
           f"|e(10 s)|/|e(0)| truth {rt:.4f} (<= 0.01), odometry {ro:.4f} (<= 0.05), {elapsed:.2f} s (< 1 s)")


def test_c8_determinism(report, tmp_path):
    details, ok = [], True
    for name, command in (("parking.yaml", "simulate-regulate"), ("circle_tracking.yaml", "simulate-track")):
        outs = [tmp_path / f"{name}.a.csv", tmp_path / f"{name}.b.csv"]
        codes = [main([command, "--scenario", str(SCENARIOS / name), "--out", str(o)]) for o in outs]
        a, b = (o.read_bytes() for o in outs)
        ok = ok and codes == [0, 0] and a == b and len(a) > 0
        details.append(f"{name} {len(a)} bytes identical={a == b} exit={codes}")
    report("C8 determinism", ok, "; ".join(details))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
