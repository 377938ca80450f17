"""Quadrature and finite differences over uniformly sampled histories.

All routines take a :class:`SampledSignal` and treat sample ``k`` as living
at ``t0 + k*h``. Integrals run over the whole history; derivatives are taken
at the newest sample using backward stencils only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SampledSignal:
    """A uniformly sampled real time series."""

    h: float
    values: np.ndarray = field(repr=False)
    t0: float = 0.0

    def __post_init__(self):
        h = float(self.h)
        if not (math.isfinite(h) and h > 0.0):
            raise ValueError(f"step size must be positive and finite, got {self.h!r}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a non-empty 1-D sequence")
        if values.size <= 16:
            finite = all(map(math.isfinite, values.tolist()))
        else:
            finite = bool(np.isfinite(values).all())
        if not finite:
            raise ValueError("values must all be finite")
        if not math.isfinite(float(self.t0)):
            raise ValueError("t0 must be finite")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, f, t0, t1, n):
        """Sample ``f`` at ``n`` equally spaced points spanning ``[t0, t1]``."""
        if n < 2:
            raise ValueError("need at least two points to span an interval")
        h = (t1 - t0) / (n - 1)
        t = t0 + h * np.arange(n)
        return cls(h=h, values=f(t), t0=t0)

    def __len__(self):
        return self.values.size

    @property
    def times(self):
        return self.t0 + self.h * np.arange(self.values.size)

    @property
    def t_last(self):
        return self.t0 + self.h * (self.values.size - 1)


def _simpson(values, h):
    # values: odd length >= 3, unchecked
    return h / 3.0 * (values[0] + 4.0 * values[1:-1:2].sum()
                      + 2.0 * values[2:-1:2].sum() + values[-1])


def _integrate(values, h):
    n = values.size
    if n == 1:
        return 0.0
    if n == 2:
        return 0.5 * h * (values[0] + values[1])
    if n % 2 == 1:
        return _simpson(values, h)
    return _simpson(values[:-1], h) + 0.5 * h * (values[-1] + values[-2])


def _diff_latest(values, h):
    n = values.size
    if n == 1:
        return 0.0
    if n == 2:
        return (values[-1] - values[-2]) / h
    return (values[-3] - 4.0 * values[-2] + 3.0 * values[-1]) / (2.0 * h)


def simpson_composite(signal: SampledSignal) -> float:
    """Composite Simpson 1/3 rule over the full history.

    Weights are ``1, 4, 2, 4, ..., 2, 4, 1`` times ``h/3``. The rule is exact
    for cubics and needs an odd number of points (an even interval count).

    Raises
    ------
    ValueError
        If the signal has fewer than 3 points or an even number of points.
    """
    n = len(signal)
    if n < 3:
        raise ValueError(f"Simpson's rule needs at least 3 points, got {n}")
    if n % 2 == 0:
        raise ValueError(
            f"Simpson's rule needs an odd point count, got {n}; "
            "use integrate_history for even counts")
    return float(_simpson(signal.values, signal.h))


def trapezoid_last(signal: SampledSignal) -> float:
    """Trapezoidal area of the final interval only."""
    n = len(signal)
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    v = signal.values
    return float(0.5 * signal.h * (v[-1] + v[-2]))


def integrate_history(signal: SampledSignal) -> float:
    """Integral of the whole history from ``t0`` to the newest sample.

    Odd point counts use Simpson's rule directly. Even counts apply Simpson to
    all but the last point and close the final interval with a trapezoid. A
    lone sample integrates to zero.
    """
    return float(_integrate(signal.values, signal.h))


def backward_diff_2pt(signal: SampledSignal) -> float:
    """First-order backward difference at the newest sample."""
    n = len(signal)
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    v = signal.values
    return float((v[-1] - v[-2]) / signal.h)


def backward_diff_3pt(signal: SampledSignal) -> float:
    """Second-order backward difference at the newest sample.

    ``(E[n-2] - 4 E[n-1] + 3 E[n]) / (2h)``; exact for quadratics, with
    truncation error ``-(h**2 / 3) E'''``.
    """
    n = len(signal)
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    v = signal.values
    return float((v[-3] - 4.0 * v[-2] + 3.0 * v[-1]) / (2.0 * signal.h))


def differentiate_latest(signal: SampledSignal) -> float:
    """Derivative at the newest sample with a warm-up fallback.

    One sample gives 0, two samples use the 2-point stencil, and three or
    more use the 3-point stencil. Only the last three samples are read.
    """
    return float(_diff_latest(signal.values, signal.h))
