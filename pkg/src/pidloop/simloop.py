"""Closed-loop simulation, step-response metrics and gain sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from . import _backend
from .control import Gains, ReferenceSignal

MAX_STEPS = 10**7
# |e| beyond this multiple of the step magnitude counts as divergence.
DIVERGENCE_FACTOR = 1e3
DEFAULT_BAND_PCT = 2.0
# Fraction of the horizon averaged for the steady-state error.
STEADY_STATE_FRACTION = 0.1


class IntegralMode(str, Enum):
    FULL = "full-recompute"
    INCREMENTAL = "incremental-trapezoid"  # running sums, same parity rule


class Classification(str, Enum):
    CONVERGED = "converged"
    OSCILLATING = "oscillating"
    DIVERGED = "diverged"


class UnsupportedMetricError(ValueError):
    pass


class DegenerateStepError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce one closed-loop run.

    Defaults: 10 ms step, 10 s horizon, start at 0 m, constant 1 m setpoint,
    no saturation, full-recompute integral.
    """

    gains: Gains = field(default_factory=lambda: Gains(10.8, 17.7, 3.2))
    h: float = 0.01
    t_end: float = 10.0
    x0: float = 0.0
    reference: ReferenceSignal = field(default_factory=lambda: ReferenceSignal.constant(1.0))
    v_max: Optional[float] = None
    integral_mode: IntegralMode = IntegralMode.FULL

    def __post_init__(self):
        h, t_end, x0 = float(self.h), float(self.t_end), float(self.x0)
        if not (math.isfinite(h) and math.isfinite(t_end) and 0.0 < h < t_end):
            raise ValueError(f"need 0 < h < t_end, got h={self.h!r}, t_end={self.t_end!r}")
        if t_end / h > MAX_STEPS:
            raise ValueError(f"t_end/h exceeds {MAX_STEPS} steps")
        if not math.isfinite(x0):
            raise ValueError("x0 must be finite")
        v_max = self.v_max
        if v_max is not None:
            v_max = float(v_max)
            if not v_max > 0:
                raise ValueError("v_max must be positive")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "t_end", t_end)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "v_max", v_max)
        object.__setattr__(self, "integral_mode", IntegralMode(self.integral_mode))

    @property
    def n_steps(self):
        # tolerate t_end/h landing a hair below an integer
        return int(math.floor(self.t_end / self.h + 1e-9))

    def with_gains(self, gains):
        return replace(self, gains=gains)


@dataclass(frozen=True)
class Trajectory:
    """Aligned samples ``t, x, e, v`` of one run."""

    t: np.ndarray
    x: np.ndarray
    e: np.ndarray
    v: np.ndarray
    h: float
    diverged: bool = False

    def __len__(self):
        return self.t.size

    def rows(self):
        return zip(self.t.tolist(), self.x.tolist(), self.e.tolist(), self.v.tolist())


@dataclass(frozen=True)
class ResponseMetrics:
    overshoot_pct: float
    settling_time: float
    steady_state_error: float
    rise_time: float
    classification: Classification

    FIELDS = ("overshoot_pct", "settling_time", "steady_state_error",
              "rise_time", "classification")

    def as_row(self):
        return [self.overshoot_pct, self.settling_time, self.steady_state_error,
                self.rise_time, self.classification.value]


def _step_size(config):
    r0 = config.reference(0.0)
    return abs(r0 - config.x0)


def simulate(config: SimConfig, backend=None) -> Trajectory:
    """Run the closed loop from ``t = 0`` to ``t_end``.

    Each step records the error, commands ``v`` from the whole error history
    (newest sample included), then moves the plant by ``v*h``. A non-finite
    state truncates the run before the offending sample; an error larger
    than ``DIVERGENCE_FACTOR`` times the initial step stops it after that
    sample. Either way the trajectory is flagged as diverged.

    ``backend`` selects ``"compiled"`` or ``"pure"``; ``None`` uses the one
    chosen at import.
    """
    kernel = _backend.kernel if backend is None else _backend.load(backend)
    n = config.n_steps + 1
    ref = config.reference.on_grid(config.h, n)
    step = _step_size(config)
    div_limit = DIVERGENCE_FACTOR * step if step > 0 else math.inf
    g = config.gains
    x, e, v, n_valid, diverged = kernel.run_loop(
        ref, config.x0, config.h, g.kp, g.ki, g.kd,
        math.inf if config.v_max is None else config.v_max,
        config.integral_mode is IntegralMode.INCREMENTAL, div_limit)
    t = config.h * np.arange(n_valid, dtype=np.float64)
    return Trajectory(t=t, x=x[:n_valid], e=e[:n_valid], v=v[:n_valid],
                      h=config.h, diverged=bool(diverged))


def _first_at_or_after(values, threshold):
    hits = np.flatnonzero(values >= threshold)
    return int(hits[0]) if hits.size else None


def compute_metrics(traj: Trajectory, reference: ReferenceSignal,
                    band_pct: float = DEFAULT_BAND_PCT) -> ResponseMetrics:
    """Step-response figures for a run against a constant setpoint.

    The response is normalised so that it rises from 0 (at ``x0``) towards
    1 (at ``R``); a downward step is mirrored. Settling requires ``|e|`` to
    stay inside ``band_pct`` percent of the step from some sample onward
    through at least the final tenth of the horizon. Unsettled runs report
    the last sample time as settling time and are classed oscillating;
    diverged runs report ``inf``. Rise time is 10 % to 90 % measured at
    sample resolution, ``nan`` when 90 % is never reached.
    """
    if not reference.is_constant:
        raise UnsupportedMetricError("metrics are defined for constant setpoints only")
    if len(traj) == 0:
        return ResponseMetrics(math.nan, math.inf, math.nan, math.nan,
                               Classification.DIVERGED)
    R = reference.value
    x0 = float(traj.x[0])
    step = R - x0
    if step == 0.0:
        raise DegenerateStepError("setpoint equals the initial position")
    mag = abs(step)
    t, e = traj.t, traj.e
    abs_e = np.abs(e)
    finite = bool(np.isfinite(traj.x).all() and np.isfinite(abs_e).all())
    diverged = traj.diverged or not finite or bool((abs_e > DIVERGENCE_FACTOR * mag).any())

    with np.errstate(invalid="ignore", over="ignore"):
        y = (traj.x - x0) / step
        overshoot = max(0.0, float(np.nanmax(y)) - 1.0) * 100.0 if finite else math.inf

    t_last = float(t[-1])
    window = t >= t[0] + (1.0 - STEADY_STATE_FRACTION) * (t_last - t[0])
    sse = float(abs_e[window].mean())

    i10 = _first_at_or_after(y, 0.1)
    i90 = _first_at_or_after(y, 0.9)
    rise = float(t[i90] - t[i10]) if i10 is not None and i90 is not None else math.nan

    outside = np.flatnonzero(~(abs_e <= band_pct / 100.0 * mag))
    settle_idx = 0 if outside.size == 0 else int(outside[-1]) + 1
    # settled only if the dwell inside the band covers the steady-state window
    settled = settle_idx < len(t) and settle_idx <= int(np.argmax(window))

    if diverged:
        return ResponseMetrics(overshoot, math.inf, sse, rise, Classification.DIVERGED)
    if settled:
        return ResponseMetrics(overshoot, float(t[settle_idx]), sse, rise,
                               Classification.CONVERGED)
    return ResponseMetrics(overshoot, t_last, sse, rise, Classification.OSCILLATING)


def _sweep_row(base, axis, value, band_pct):
    config = base.with_gains(base.gains.with_axis(axis, value))
    try:
        metrics = compute_metrics(simulate(config), config.reference, band_pct)
    except ArithmeticError:
        metrics = ResponseMetrics(math.nan, math.inf, math.nan, math.nan,
                                  Classification.DIVERGED)
    return float(value), metrics


def gain_sweep(base: SimConfig, axis: str, values, band_pct=DEFAULT_BAND_PCT,
               workers=1):
    """Vary one gain over ``values`` holding the others at ``base``.

    Returns ``[(value, ResponseMetrics), ...]`` in input order. Runs that
    blow up become diverged rows instead of aborting the sweep. With
    ``workers > 1`` rows run on a thread pool; the compiled kernel releases
    the GIL.
    """
    values = [float(v) for v in values]
    if not values:
        raise ValueError("sweep needs at least one value")
    if not all(math.isfinite(v) for v in values):
        raise ValueError("sweep values must be finite")
    if axis not in ("kp", "ki", "kd"):
        raise ValueError(f"unknown gain axis {axis!r}")
    if not base.reference.is_constant:
        raise UnsupportedMetricError("metrics are defined for constant setpoints only")
    if workers <= 1:
        return [_sweep_row(base, axis, v, band_pct) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda v: _sweep_row(base, axis, v, band_pct), values))
