"""Reference trajectories.

Three variants share a `kind` tag so a config section can name any of them: a constant-velocity straight line,
a waypoint polyline travelled at constant speed with blended corners, and a fixed pose hold.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, PositiveFloat, model_validator

from rovtrack.controller import ReferencePoint, wrap_angle
from rovtrack.dynamics import ATTITUDE_MARGIN
from rovtrack.errors import OutOfHorizonError
from rovtrack.extra_types import Array, Vector3, Vector6

logger = logging.getLogger(__name__)

HORIZON_TOLERANCE = 1e-9
SQUARE_SIDE = 8.0
SQUARE_SPEED = 0.2
DEFAULT_HEADING = np.pi / 4

ReferenceFn = Callable[[float], ReferencePoint]


def _check_attitude_target(roll: float, pitch: float) -> None:
    limit = np.pi / 2 - ATTITUDE_MARGIN
    if abs(roll) > limit or abs(pitch) > limit:
        msg = f"Reference roll and pitch must stay within +/-{limit:.6f} rad, got roll={roll}, pitch={pitch}"
        raise ValueError(msg)


class StraightLine(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["straight_line"] = "straight_line"
    origin: Vector3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    velocity: Vector3 = Field(default_factory=lambda: [0.2, 0.2, 0.0])
    heading: FiniteFloat = DEFAULT_HEADING
    roll: FiniteFloat = 0.0
    pitch: FiniteFloat = 0.0

    @model_validator(mode="after")
    def check_motion(self) -> StraightLine:
        if not np.linalg.norm(self.velocity) > 0:
            msg = "straight line velocity must be non-zero"
            raise ValueError(msg)
        _check_attitude_target(self.roll, self.pitch)
        return self

    def reference(self, t: float) -> ReferencePoint:
        position = np.array(self.origin) + np.array(self.velocity) * t
        eta = np.concatenate([position, [self.roll, self.pitch, self.heading]])
        eta_dot = np.concatenate([self.velocity, [0.0, 0.0, 0.0]])
        return ReferencePoint(eta=eta, eta_dot=eta_dot, eta_ddot=np.zeros(6))


class WaypointPolyline(BaseModel):
    """Waypoints visited in order at constant speed.

    Velocity changes linearly across a window of `blend` seconds centred on each corner, so position stays exact at the
    corner-free parts of the path and acceleration stays bounded. The last waypoint is treated as a corner into rest.
    With `heading` unset the heading follows each segment and is blended with a smoothstep across the same window.
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["waypoint_polyline"] = "waypoint_polyline"
    waypoints: list[Vector3] = Field(min_length=2)
    speed: PositiveFloat
    heading: Optional[FiniteFloat] = None
    blend: PositiveFloat = 2.0
    roll: FiniteFloat = 0.0
    pitch: FiniteFloat = 0.0

    @model_validator(mode="after")
    def check_segments(self) -> WaypointPolyline:
        lengths = np.linalg.norm(np.diff(np.array(self.waypoints), axis=0), axis=1)
        if np.any(lengths <= 0):
            msg = "consecutive waypoints must be distinct"
            raise ValueError(msg)
        shortest = float(np.min(lengths)) / self.speed
        if self.blend > shortest:
            msg = f"blend window {self.blend} s is longer than the shortest segment ({shortest:.6g} s)"
            raise ValueError(msg)
        _check_attitude_target(self.roll, self.pitch)
        return self

    @property
    def duration(self) -> float:
        lengths = np.linalg.norm(np.diff(np.array(self.waypoints), axis=0), axis=1)
        return float(np.sum(lengths) / self.speed + self.blend / 2)


class CustomHold(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["custom_hold"] = "custom_hold"
    pose: Vector6 = Field(default_factory=lambda: [0.0] * 6)

    @model_validator(mode="after")
    def check_pose(self) -> CustomHold:
        _check_attitude_target(self.pose[3], self.pose[4])
        return self

    def reference(self, _t: float) -> ReferencePoint:
        return ReferencePoint.hold(np.array(self.pose))


Trajectory = Annotated[Union[StraightLine, WaypointPolyline, CustomHold], Field(discriminator="kind")]


@dataclass(frozen=True, kw_only=True)
class PolylineReference:
    waypoints: Array
    corner_times: Array
    velocities: Array
    headings: Optional[Array]
    blend: float
    attitude: tuple[float, float]
    constant_heading: float

    @classmethod
    def from_polyline(cls, polyline: WaypointPolyline) -> PolylineReference:
        waypoints = np.array(polyline.waypoints)
        deltas = np.diff(waypoints, axis=0)
        lengths = np.linalg.norm(deltas, axis=1)
        durations = lengths / polyline.speed
        velocities = polyline.speed * deltas / lengths[:, None]

        headings = None
        if polyline.heading is None:
            raw = np.arctan2(deltas[:, 1], deltas[:, 0])
            unwrapped = [float(raw[0])]
            for angle in raw[1:]:
                unwrapped.append(unwrapped[-1] + wrap_angle(angle - unwrapped[-1]))
            headings = np.array(unwrapped)

        return cls(
            waypoints=waypoints,
            corner_times=np.concatenate([[0.0], np.cumsum(durations)]),
            velocities=np.vstack([velocities, np.zeros(3)]),
            headings=headings,
            blend=polyline.blend,
            attitude=(polyline.roll, polyline.pitch),
            constant_heading=0.0 if polyline.heading is None else polyline.heading,
        )

    def _segment(self, t: float) -> int:
        n_segments = len(self.waypoints) - 1
        return min(int(np.searchsorted(self.corner_times, t, side="right")) - 1, n_segments)

    def reference(self, t: float) -> ReferencePoint:
        segment = self._segment(t)
        start = self.corner_times[segment]
        position = self.waypoints[segment] + self.velocities[segment] * (t - start)
        velocity = self.velocities[segment].copy()
        acceleration = np.zeros(3)
        psi, psi_dot, psi_ddot = self._segment_heading(segment), 0.0, 0.0

        # Nearest corner is either the one ending this segment or the one that started it
        half = self.blend / 2
        for corner in (segment + 1, segment):
            if corner < 1 or corner >= len(self.corner_times):
                continue
            u = (t - (self.corner_times[corner] - half)) / self.blend
            if not 0.0 <= u <= 1.0:
                continue
            jump = self.velocities[corner] - self.velocities[corner - 1]
            offset = min(u, 1.0 - u)
            position = position + jump * self.blend * offset**2 / 2
            velocity = self.velocities[corner - 1] + jump * u
            acceleration = jump / self.blend
            if self.headings is not None and corner < len(self.headings):
                turn = self.headings[corner] - self.headings[corner - 1]
                psi = self.headings[corner - 1] + turn * (3 * u**2 - 2 * u**3)
                psi_dot = turn * 6 * u * (1 - u) / self.blend
                psi_ddot = turn * (6 - 12 * u) / self.blend**2
            break

        roll, pitch = self.attitude
        return ReferencePoint(
            eta=np.concatenate([position, [roll, pitch, psi]]),
            eta_dot=np.concatenate([velocity, [0.0, 0.0, psi_dot]]),
            eta_ddot=np.concatenate([acceleration, [0.0, 0.0, psi_ddot]]),
        )

    def _segment_heading(self, segment: int) -> float:
        if self.headings is None:
            return self.constant_heading
        return float(self.headings[min(segment, len(self.headings) - 1)])


def compile_trajectory(traj: StraightLine | WaypointPolyline | CustomHold) -> ReferenceFn:
    match traj:
        case WaypointPolyline():
            return PolylineReference.from_polyline(traj).reference
        case StraightLine() | CustomHold():
            return traj.reference


def check_horizon(t: float, horizon: Optional[float]) -> None:
    if t < -HORIZON_TOLERANCE or (horizon is not None and t > horizon + HORIZON_TOLERANCE):
        msg = f"Reference requested at t={t:g} s outside [0, {horizon}]"
        raise OutOfHorizonError(msg, time=t)


def reference_at(
    traj: StraightLine | WaypointPolyline | CustomHold, t: float, horizon: Optional[float] = None
) -> ReferencePoint:
    """Evaluate the reference at time t, where `horizon` is the last admissible time (t_f + dt in a run)."""
    check_horizon(t, horizon)
    return compile_trajectory(traj)(t)


def square_path(
    side: float = SQUARE_SIDE,
    speed: float = SQUARE_SPEED,
    heading: Optional[float] = DEFAULT_HEADING,
    blend: float = 2.0,
    depth: float = 0.0,
) -> WaypointPolyline:
    corners = [[0.0, 0.0], [side, 0.0], [side, side], [0.0, side], [0.0, 0.0]]
    return WaypointPolyline(
        waypoints=[[x, y, depth] for x, y in corners],
        speed=speed,
        heading=heading,
        blend=blend,
    )
