"""Error signal and the PID law evaluated over a full error history."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .numerics import SampledSignal, differentiate_latest, integrate_history

# Relative slack when deciding whether two time grids coincide.
GRID_RTOL = 1e-9


class OutOfDomainError(ValueError):
    """A tabulated reference was queried off its grid."""


@dataclass(frozen=True)
class Gains:
    kp: float
    ki: float
    kd: float

    def __post_init__(self):
        for name in ("kp", "ki", "kd"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"gain {name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)

    def scaled(self, a):
        return Gains(a * self.kp, a * self.ki, a * self.kd)

    def with_axis(self, axis, value):
        """Copy with one of ``kp``/``ki``/``kd`` replaced."""
        if axis not in ("kp", "ki", "kd"):
            raise ValueError(f"unknown gain axis {axis!r}")
        return replace(self, **{axis: float(value)})


@dataclass(frozen=True)
class ReferenceSignal:
    """Setpoint: either a constant or a table on a uniform time grid."""

    value: Optional[float] = None
    table: Optional[SampledSignal] = None

    def __post_init__(self):
        if (self.value is None) == (self.table is None):
            raise ValueError("give exactly one of value or table")
        if self.value is not None:
            v = float(self.value)
            if not math.isfinite(v):
                raise ValueError("constant reference must be finite")
            object.__setattr__(self, "value", v)

    @classmethod
    def constant(cls, value):
        return cls(value=value)

    @classmethod
    def tabulated(cls, table):
        return cls(table=table)

    @property
    def kind(self):
        return "constant" if self.table is None else "tabulated"

    @property
    def is_constant(self):
        return self.table is None

    def _index(self, t):
        tab = self.table
        pos = (t - tab.t0) / tab.h
        k = int(round(pos))
        if k < 0 or k >= len(tab) or abs(pos - k) > 1e-6:
            raise OutOfDomainError(
                f"t={t!r} is not on the reference grid "
                f"[{tab.t0}, {tab.t_last}] with step {tab.h}")
        return k

    def __call__(self, t):
        if self.table is None:
            return self.value
        return float(self.table.values[self._index(t)])

    def on_grid(self, h, n):
        """Reference values at ``k*h`` for ``k = 0..n-1``.

        The table grid must coincide with the requested grid; no
        interpolation is done.
        """
        if self.table is None:
            return np.full(n, self.value)
        tab = self.table
        if abs(tab.h - h) > GRID_RTOL * h:
            raise OutOfDomainError(
                f"reference step {tab.h} does not match simulation step {h}")
        start = self._index(0.0)
        if start + n > len(tab):
            raise OutOfDomainError(
                f"reference table ends at t={tab.t_last}, "
                f"simulation needs t={(n - 1) * h}")
        return tab.values[start:start + n].copy()


def error_at(reference: ReferenceSignal, x: float, t: float) -> float:
    """Tracking error ``R(t) - x``."""
    return reference(t) - x


def pid_output(error_history: SampledSignal, gains: Gains) -> float:
    """Commanded velocity from the newest error, its integral and its slope."""
    e_n = float(error_history.values[-1])
    return (gains.kp * e_n
            + gains.ki * integrate_history(error_history)
            + gains.kd * differentiate_latest(error_history))


def clamp(v, v_max):
    """Symmetric saturation ``|v| <= v_max``; ``None`` disables it."""
    if v_max is None:
        return v
    return min(max(v, -v_max), v_max)
