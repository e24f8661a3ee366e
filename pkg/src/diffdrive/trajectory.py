"""Piecewise-constant reference trajectories for the unicycle model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .kinematics import Pose


@dataclass(frozen=True)
class Segment:
    v_ref: float
    omega_ref: float
    duration: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.v_ref) and math.isfinite(self.omega_ref)):
            raise ValueError("segment commands must be finite")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ValueError(f"segment duration must be > 0, got {self.duration!r}")


@dataclass(frozen=True)
class ReferenceState:
    pose_ref: Pose
    v_ref: float
    omega_ref: float


def _sinc(a: float) -> float:
    return 1.0 if a == 0.0 else math.sin(a) / a


def _advance(pose: Pose, v: float, omega: float, t: float) -> Pose:
    # chord form of the constant-twist arc; exact for omega == 0 as well
    half = 0.5 * omega * t
    chord = v * t * _sinc(half)
    mid = pose.theta + half
    return Pose(pose.x - chord * math.sin(mid), pose.y + chord * math.cos(mid), pose.theta + omega * t)


@dataclass(frozen=True)
class ReferenceProfile:
    """Initial pose plus an ordered list of constant-command segments."""

    initial_pose: Pose
    segments: tuple[Segment, ...]
    _starts: tuple[tuple[float, Pose], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        segments = tuple(
            s if isinstance(s, Segment) else Segment(*s) for s in self.segments
        )
        if not segments:
            raise ValueError("a reference profile needs at least one segment")
        object.__setattr__(self, "segments", segments)
        starts = []
        t0, pose = 0.0, self.initial_pose
        for seg in segments:
            starts.append((t0, pose))
            pose = _advance(pose, seg.v_ref, seg.omega_ref, seg.duration)
            t0 += seg.duration
        starts.append((t0, pose))
        object.__setattr__(self, "_starts", tuple(starts))

    @property
    def duration(self) -> float:
        return self._starts[-1][0]

    @property
    def final_pose(self) -> Pose:
        return self._starts[-1][1]


def reference_at(profile: ReferenceProfile, t: float) -> ReferenceState:
    """Reference pose and commands at time ``t``.

    Each segment is propagated in closed form (line or circular arc). Past the
    end of the profile the final pose is held with zero commands.
    """
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    if t >= profile.duration:
        return ReferenceState(profile.final_pose, 0.0, 0.0)
    for seg, (t0, pose0), (t1, _) in zip(profile.segments, profile._starts, profile._starts[1:]):
        if t < t1:
            return ReferenceState(_advance(pose0, seg.v_ref, seg.omega_ref, t - t0), seg.v_ref, seg.omega_ref)
    raise AssertionError("unreachable")  # pragma: no cover


def line_profile(v: float = 0.2, duration: float = 10.0, initial_pose: Pose | None = None) -> ReferenceProfile:
    return ReferenceProfile(initial_pose or Pose(0.0, 0.0, 0.0), (Segment(v, 0.0, duration),))


def circle_profile(
    v: float = 0.2, omega: float = 0.5, duration: float | None = None, initial_pose: Pose | None = None
) -> ReferenceProfile:
    """Circle of radius ``|v/omega|``; one full lap when ``duration`` is omitted."""
    if duration is None:
        duration = 2.0 * math.pi / abs(omega)
    return ReferenceProfile(initial_pose or Pose(0.0, 0.0, 0.0), (Segment(v, omega, duration),))


def s_curve_profile(
    v: float = 0.2, omega: float = 0.5, arc_duration: float | None = None, initial_pose: Pose | None = None
) -> ReferenceProfile:
    """Two arcs of opposite curvature, a half turn each by default."""
    if arc_duration is None:
        arc_duration = math.pi / abs(omega)
    return ReferenceProfile(
        initial_pose or Pose(0.0, 0.0, 0.0),
        (Segment(v, omega, arc_duration), Segment(v, -omega, arc_duration)),
    )


NAMED_PROFILES = {
    "line": line_profile,
    "circle": circle_profile,
    "s-curve": s_curve_profile,
}


def named_profile(name: str, **params) -> ReferenceProfile:
    try:
        factory = NAMED_PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(NAMED_PROFILES)}") from None
    return factory(**params)


def profile_from_segments(initial_pose: Pose, segments: Sequence[Sequence[float]]) -> ReferenceProfile:
    """Segments may be ``Segment`` objects or ``(v_ref, omega_ref, duration)`` triples."""
    return ReferenceProfile(
        initial_pose, tuple(s if isinstance(s, Segment) else Segment(*map(float, s)) for s in segments)
    )
