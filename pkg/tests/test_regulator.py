import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from diffdrive.kinematics import BodyTwist, Pose, integrate_pose
from diffdrive.regulator import (
    GoalSpec,
    PolarSingularityError,
    PolarState,
    RampConfig,
    RegulatorGains,
    atan2_custom,
    effective_gains,
    polar_transform,
    ramp_factor,
    regulator_control,
    regulator_linearized_matrix,
    regulator_nonlinear_derivative,
    stability_check,
)
from diffdrive.tracking import characteristic_roots

DEFAULT_GAINS = RegulatorGains(0.4, 2.0, -1.0)
DEFAULT_RAMP = RampConfig(0.1, 0.1, 0.3)


# --- atan2 -----------------------------------------------------------------------

@pytest.mark.parametrize(
    "y, x, expected",
    [
        (0.0, 1.0, 0.0),
        (0.0, 0.0, 0.0),
        (0.0, -1.0, math.pi),
        (1.0, 1.0, math.pi / 4),
        (1.0, -1.0, 3 * math.pi / 4),
        (-1.0, -1.0, -3 * math.pi / 4),
        (-1.0, 1.0, -math.pi / 4),
        (1.0, 0.0, math.pi / 2),
        (-1.0, 0.0, -math.pi / 2),
    ],
)
def test_atan2_examples(y, x, expected):
    assert atan2_custom(y, x) == pytest.approx(expected, abs=1e-15)


def test_atan2_origin_is_exactly_zero():
    assert atan2_custom(0.0, 0.0) == 0.0


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_atan2_matches_math(y, x):
    assume(y != 0 or x != 0)
    got = atan2_custom(y, x)
    # atan(y/x) - pi can round onto -pi itself when |y/x| is below eps
    assert -math.pi <= got <= math.pi
    diff = math.remainder(got - math.atan2(y + 0.0, x), 2 * math.pi)
    assert abs(diff) <= 1e-12


# --- polar transform -----------------------------------------------------------------

def test_polar_transform_examples_with_x_referenced_headings():
    # headings in these examples are measured from +x
    s = polar_transform(Pose.from_x_heading(0, 0, 0), GoalSpec(Pose.from_x_heading(1, 1, 0)))
    assert s.as_tuple() == pytest.approx((math.sqrt(2), math.pi / 4, -math.pi / 4))
    s = polar_transform(Pose.from_x_heading(0, 0, math.pi / 2), GoalSpec(Pose.from_x_heading(1, 1, math.pi)))
    assert s.as_tuple() == pytest.approx((math.sqrt(2), -math.pi / 4, 3 * math.pi / 4))


def test_polar_transform_native_frame():
    # theta = 0 faces +y: a goal straight ahead has zero bearing error
    s = polar_transform(Pose(0, 0, 0), GoalSpec(Pose(0, 2, 0)))
    assert s.as_tuple() == pytest.approx((2, 0, 0))
    # goal to the left (-x) with the robot facing +y
    s = polar_transform(Pose(0, 0, 0), GoalSpec(Pose(-1, 0, 0)))
    assert s.e_theta == pytest.approx(math.pi / 2)


def test_polar_transform_terminal_convention():
    goal = GoalSpec(Pose(1, 1, 0.3))
    assert polar_transform(Pose(1.001, 1, 0.3), goal, r_stop=0.01).as_tuple() == (0, 0, 0)
    at_goal = polar_transform(Pose(1, 1, 0.3), goal)
    assert at_goal.r == 0.0


coord = st.floats(-5, 5, allow_nan=False)


@given(coord, coord, coord, coord, coord, coord)
def test_scale_covariance(x, y, th, gx, gy, gth):
    assume(math.hypot(gx - x, gy - y) > 1e-3)
    a = polar_transform(Pose(x, y, th), GoalSpec(Pose(gx, gy, gth)))
    b = polar_transform(Pose(x, y, th), GoalSpec(Pose(x + 2 * (gx - x), y + 2 * (gy - y), gth)))
    assert b.r == pytest.approx(2 * a.r, rel=1e-12)
    assert b.e_theta == pytest.approx(a.e_theta, abs=1e-9)
    assert b.theta_E == pytest.approx(a.theta_E, abs=1e-9)


def test_polar_dynamics_consistent_with_kinematics():
    # finite differences of the transform along the real unicycle motion must
    # reproduce the polar model; this pins the bearing/heading frame choice
    rng = np.random.default_rng(8)
    goal = GoalSpec(Pose(0.4, -0.3, 1.1))
    h = 1e-6
    for _ in range(200):
        pose = Pose(*rng.uniform(-2, 2, 2), rng.uniform(-3, 3))
        twist = BodyTwist(*rng.uniform(-1, 1, 2))
        a = polar_transform(pose, goal)
        if a.r < 0.2 or abs(abs(a.e_theta) - math.pi) < 0.1 or abs(abs(a.theta_E) - math.pi) < 0.1:
            continue
        b = polar_transform(integrate_pose(pose, twist, h), goal)
        rate = regulator_nonlinear_derivative(a, twist)
        fd = [(b.r - a.r) / h, (b.e_theta - a.e_theta) / h, (b.theta_E - a.theta_E) / h]
        assert fd == pytest.approx(list(rate), abs=1e-4)


# --- control law, ramp, gains -----------------------------------------------------------

def test_regulator_control_examples():
    assert regulator_control(PolarState(1, 0, 0), DEFAULT_GAINS) == BodyTwist(0.4, 0.0)
    assert regulator_control(PolarState(0, 0, 0), RegulatorGains(3, -2, 7)) == BodyTwist(0.0, 0.0)
    tw = regulator_control(PolarState(2, 0.5, -0.2), DEFAULT_GAINS)
    assert (tw.v, tw.omega) == pytest.approx((0.8, 1.2))


def test_ramp_factor_examples():
    assert ramp_factor(0.1, 0.0) == 0.0
    assert ramp_factor(0.1, 10.0) == pytest.approx(1 - math.exp(-1))
    assert ramp_factor(0.1, 10.0) == pytest.approx(0.63212, abs=1e-5)
    assert abs(ramp_factor(2.0, 20.0) - 1.0) <= 1e-15
    with pytest.raises(ValueError):
        ramp_factor(0.1, -1.0)


@given(st.floats(1e-3, 5), st.floats(0, 10), st.floats(1e-3, 5))
def test_ramp_monotone_and_bounded(alpha, s, ds):
    assume(alpha * (s + ds) < 30)  # beyond that 1 - exp(-x) rounds to 1.0
    a, b = ramp_factor(alpha, s), ramp_factor(alpha, s + ds)
    assert 0.0 <= a < 1.0
    assert b > a


def test_effective_gains_examples():
    assert effective_gains(DEFAULT_GAINS, DEFAULT_RAMP, 0.0, 1.0).as_tuple() == (0.0, 0.0, -0.0)
    g = effective_gains(DEFAULT_GAINS, DEFAULT_RAMP, 10.0, 1.0)
    assert g.as_tuple() == pytest.approx((0.4 * (1 - math.exp(-1)), 2 * (1 - math.exp(-1)), -(1 - math.exp(-3))))
    assert g.as_tuple() == pytest.approx((0.25285, 1.26424, -0.95021), abs=1e-5)
    g = effective_gains(DEFAULT_GAINS, DEFAULT_RAMP, 1e4, 1.0)
    assert g.as_tuple() == pytest.approx(DEFAULT_GAINS.as_tuple(), abs=1e-12)


def test_effective_gains_distance_mode_uses_r():
    ramp = RampConfig(0.1, 0.1, 0.3, mode="distance")
    g = effective_gains(DEFAULT_GAINS, ramp, t=1e4, r=10.0)
    assert g.k_r == pytest.approx(0.4 * (1 - math.exp(-1)))


def test_ramp_config_validation():
    with pytest.raises(ValueError):
        RampConfig(0.0, 0.1, 0.1)
    with pytest.raises(ValueError):
        RampConfig(mode="space")


# --- stability ---------------------------------------------------------------------------

def test_stability_examples():
    assert stability_check(DEFAULT_GAINS)
    v = stability_check(RegulatorGains(0.4, 0.3, -1))
    assert not v and v.violations == ("k_etheta - k_r > 0",)
    v = stability_check(RegulatorGains(-0.1, 2, -1))
    assert not v and "k_r > 0" in v.violations
    v = stability_check(RegulatorGains(0.4, 2, 1))
    assert v.violations == ("k_thetaE < 0",)
    v = stability_check(RegulatorGains(1, 1, -1))
    assert v.violations == ("k_etheta - k_r > 0",)


def test_linearized_matrix_examples():
    np.testing.assert_allclose(regulator_linearized_matrix(DEFAULT_GAINS), [[-0.4, 0, 0], [0, -1.6, 1], [0, -0.4, 0]])
    np.testing.assert_array_equal(regulator_linearized_matrix(RegulatorGains(0, 0, 0)), np.zeros((3, 3)))
    roots = characteristic_roots(regulator_linearized_matrix(DEFAULT_GAINS))
    quad = np.roots([1, 1.6, 0.4])
    np.testing.assert_allclose(sorted(roots.real), sorted([-0.4, *quad.real]), atol=1e-12)
    assert np.all(roots.real < 0)


def test_stability_matches_eigenvalues_sample():
    rng = np.random.default_rng(1)
    checked = 0
    while checked < 2000:
        g = RegulatorGains(*rng.uniform(-3, 3, 3))
        margins = (g.k_r, g.k_thetaE, g.k_etheta - g.k_r)
        if min(abs(m) for m in margins) < 1e-6:
            continue
        eig = np.linalg.eigvals(regulator_linearized_matrix(g))
        assert bool(stability_check(g)) == bool(np.all(eig.real < 0))
        checked += 1


# --- nonlinear polar dynamics -----------------------------------------------------------

def test_nonlinear_derivative_examples():
    assert regulator_nonlinear_derivative(PolarState(1, 0, 0), BodyTwist(0.4, 0)) == pytest.approx((-0.4, 0, 0))
    assert regulator_nonlinear_derivative(PolarState(1, math.pi / 2, 0), BodyTwist(0.4, 0)) == pytest.approx((0, 0.4, -0.4), abs=1e-15)
    assert regulator_nonlinear_derivative(PolarState(0.7, 0.2, 0.1), BodyTwist(0, 1)) == pytest.approx((0, -1, 0))


def test_nonlinear_derivative_singularity():
    with pytest.raises(PolarSingularityError):
        regulator_nonlinear_derivative(PolarState(1e-7, 0.1, 0.1), BodyTwist(0.1, 0))


def test_closed_loop_substitution_identity():
    rng = np.random.default_rng(4)
    for _ in range(500):
        s = PolarState(rng.uniform(1e-3, 3), *rng.uniform(-3, 3, 2))
        g = RegulatorGains(*rng.uniform(-3, 3, 3))
        got = regulator_nonlinear_derivative(s, regulator_control(s, g))
        r, e, th = s.as_tuple()
        expected = (
            -g.k_r * r * math.cos(e),
            g.k_r * math.sin(e) - g.k_etheta * e - g.k_thetaE * th,
            -g.k_r * math.sin(e),
        )
        assert got == pytest.approx(expected, abs=1e-12)
