"""Trajectory tracking: error transform, control law, gain design and
closed-loop linear analysis."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .kinematics import BodyTwist, Pose, wrap_angle
from .trajectory import ReferenceState

log = logging.getLogger(__name__)

DEFAULT_EPSILON_V = 1e-3


class ReferenceTooSlowError(ValueError):
    """The gain design divides by |v_ref|; a stopped reference has no design."""


@dataclass(frozen=True)
class TrackingError:
    e1: float
    e2: float
    e3: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "e3", wrap_angle(self.e3))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.e1, self.e2, self.e3)

    def norm(self) -> float:
        return math.sqrt(self.e1 * self.e1 + self.e2 * self.e2 + self.e3 * self.e3)


@dataclass(frozen=True)
class TrackingGains:
    """Feedback gains ``k1`` (1/s), ``k2`` (1/(m s)), ``k3`` (1/s).

    ``warning`` is set by :func:`design_gains` when the design leaves the
    damped regime (``k2 <= 0``). Hand-set gains are not range-checked so that
    unstable configurations can still be simulated.
    """

    k1: float
    k2: float
    k3: float
    warning: str | None = None

    def __post_init__(self) -> None:
        if not all(math.isfinite(k) for k in (self.k1, self.k2, self.k3)):
            raise ValueError("tracking gains must be finite")


@dataclass(frozen=True)
class TrackingDesignSpec:
    xi: float = 1.0
    omega_n: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.xi) and self.xi > 0):
            raise ValueError(f"xi must be > 0, got {self.xi!r}")
        if not (math.isfinite(self.omega_n) and self.omega_n > 0):
            raise ValueError(f"omega_n must be > 0, got {self.omega_n!r}")


def _sgn(x: float) -> float:
    return 1.0 if x > 0 else (-1.0 if x < 0 else 0.0)


def tracking_error(pose: Pose, ref: ReferenceState) -> TrackingError:
    """Reference offset expressed in the robot frame.

    ``e1`` is along the heading, ``e2`` is to the left of it and ``e3`` is
    the wrapped heading error.
    """
    dx = ref.pose_ref.x - pose.x
    dy = ref.pose_ref.y - pose.y
    s, c = math.sin(pose.theta), math.cos(pose.theta)
    return TrackingError(-s * dx + c * dy, -c * dx - s * dy, ref.pose_ref.theta - pose.theta)


def design_gains(
    spec: TrackingDesignSpec, v_ref: float, omega_ref: float, epsilon_v: float = DEFAULT_EPSILON_V
) -> TrackingGains:
    """Place the linearized error poles at ``(s + 2 xi wn)(s^2 + 2 xi wn s + wn^2)``."""
    if not epsilon_v > 0:
        raise ValueError(f"epsilon_v must be > 0, got {epsilon_v!r}")
    if abs(v_ref) < epsilon_v:
        raise ReferenceTooSlowError(
            f"reference too slow: |v_ref| = {abs(v_ref):g} m/s < epsilon_v = {epsilon_v:g} m/s"
        )
    k13 = 2.0 * spec.xi * spec.omega_n
    k2 = (spec.omega_n**2 - omega_ref**2) / abs(v_ref)
    warning = None
    if spec.omega_n <= abs(omega_ref):
        warning = (
            f"omega_n = {spec.omega_n:g} <= |omega_ref| = {abs(omega_ref):g}; "
            f"k2 = {k2:g} is outside the damped design"
        )
        log.warning(warning)
    return TrackingGains(k13, k2, k13, warning)


def tracking_control(err: TrackingError, ref: ReferenceState, gains: TrackingGains) -> BodyTwist:
    u1 = -gains.k1 * err.e1
    u2 = -gains.k2 * _sgn(ref.v_ref) * err.e2 - gains.k3 * err.e3
    return BodyTwist(ref.v_ref * math.cos(err.e3) - u1, ref.omega_ref - u2)


def tracking_closed_loop_matrix(gains: TrackingGains, v_ref: float, omega_ref: float) -> np.ndarray:
    """Linearized error dynamics under the tracking law."""
    return np.array(
        [
            [-gains.k1, omega_ref, 0.0],
            [-omega_ref, 0.0, v_ref],
            [0.0, -gains.k2 * _sgn(v_ref), -gains.k3],
        ]
    )


def characteristic_coefficients(matrix) -> np.ndarray:
    """Monic coefficients ``[1, a2, a1, a0]`` of ``det(sI - A)`` for a 3x3 ``A``."""
    a = np.asarray(matrix, dtype=float)
    if a.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {a.shape}")
    trace = a[0, 0] + a[1, 1] + a[2, 2]
    minors = (
        a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
        + a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
    )
    det = (
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
        - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
    )
    return np.array([1.0, -trace, minors, -det])


def characteristic_roots(matrix) -> np.ndarray:
    """Roots of the characteristic cubic of a 3x3 matrix.

    Companion-matrix roots of the expanded polynomial, then: roots closer than
    the double-root noise floor (about sqrt(eps) relative) are merged to their
    mean, and the rest get Newton polishing. Sorted by real, then imaginary
    part.
    """
    coeffs = characteristic_coefficients(matrix)
    roots = np.roots(coeffs).astype(complex)
    poly = np.poly1d(coeffs)
    dpoly = poly.deriv()
    scale = 1.0 + float(np.max(np.abs(roots)))
    tol = 1e-6 * scale

    groups: list[list[int]] = []
    for i in range(3):
        for g in groups:
            if any(abs(roots[i] - roots[j]) <= tol for j in g):
                g.append(i)
                break
        else:
            groups.append([i])

    out = np.empty(3, complex)
    for g in groups:
        if len(g) == 1:
            z = roots[g[0]]
            for _ in range(3):
                d = dpoly(z)
                if d == 0:
                    break
                step = poly(z) / d
                if not np.isfinite(step):
                    break
                znew = z - step
                if abs(poly(znew)) >= abs(poly(z)):
                    break
                z = znew
            out[g[0]] = z
        else:
            mean = complex(np.mean(roots[g]))
            for j in g:
                out[j] = mean

    # rounding residue: snap parts that are tiny relative to the spectrum
    re = np.where(np.abs(out.real) <= 1e-14 * scale, 0.0, out.real)
    im = np.where(np.abs(out.imag) <= 1e-14 * scale, 0.0, out.imag)
    out = re + 1j * im
    order = np.lexsort((out.imag, out.real))
    return out[order]
