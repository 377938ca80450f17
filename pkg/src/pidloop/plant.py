"""Differential-drive kinematics and the 1-D forward/backward reduction."""

from __future__ import annotations

import math
from typing import NamedTuple


def _check_finite(obj, names):
    for name in names:
        if not math.isfinite(getattr(obj, name)):
            raise ValueError(f"{type(obj).__name__}.{name} must be finite")


class DiffDriveParams(NamedTuple):
    wheel_radius: float
    half_track: float

    def validate(self):
        _check_finite(self, self._fields)
        if self.wheel_radius <= 0 or self.half_track <= 0:
            raise ValueError("wheel_radius and half_track must be positive")
        return self


class Pose(NamedTuple):
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0


class WheelRates(NamedTuple):
    phi_dot_r: float
    phi_dot_l: float

    @classmethod
    def straight(cls, v, params):
        """Equal wheel rates giving linear speed ``v``."""
        w = v / params.wheel_radius
        return cls(w, w)


def body_rates(pose: Pose, wheels: WheelRates, params: DiffDriveParams):
    """Return ``(x_dot, y_dot, theta_dot)`` for the given wheel rates."""
    r, b = params.wheel_radius, params.half_track
    forward = 0.5 * r * (wheels.phi_dot_r + wheels.phi_dot_l)
    return (forward * math.cos(pose.theta),
            forward * math.sin(pose.theta),
            0.5 * r / b * (wheels.phi_dot_r - wheels.phi_dot_l))


def step_pose(pose: Pose, wheels: WheelRates, params: DiffDriveParams, h: float) -> Pose:
    """One explicit Euler step of the full kinematic model."""
    if not h > 0:
        raise ValueError("h must be positive")
    xd, yd, td = body_rates(pose, wheels, params)
    return Pose(pose.x + h * xd, pose.y + h * yd, pose.theta + h * td)


def step_1d(x: float, v: float, h: float) -> float:
    """Move along the heading: ``x + v*h``."""
    if not h > 0:
        raise ValueError("h must be positive")
    return x + v * h
