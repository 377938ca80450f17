"""Self-checks of the quadrature and difference stencils against sin(x)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import SampledSignal, backward_diff_3pt, differentiate_latest, integrate_history

INTEGRAL_TOL = 1e-6
DERIVATIVE_TOL = 1e-4
DERIVATIVE_STEP = 0.01
INTEGRAL_POINTS = 101
N_EVAL = 100
CONVERGENCE_H0 = 0.02
N_HALVINGS = 3
SIMPSON_RATIO = (12.0, 20.0)
DIFF3_RATIO = (3.5, 4.5)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def sin_integral_error(h=None):
    """|integrate_history(sin on [0, pi]) - 2| and the step actually used.

    The interval count is rounded to an even number so the pure Simpson path
    is exercised.
    """
    if h is None:
        n_int = INTEGRAL_POINTS - 1
    else:
        n_int = max(2, int(round(math.pi / h)))
        n_int += n_int % 2
    sig = SampledSignal.from_function(np.sin, 0.0, math.pi, n_int + 1)
    return abs(integrate_history(sig) - 2.0), sig.h


def sin_derivative_errors(h=DERIVATIVE_STEP, n_eval=N_EVAL):
    """Pointwise |d/dt sin - cos| at ``n_eval`` points in ``[2h, 2*pi]``."""
    t_eval = np.linspace(2 * h, 2 * math.pi, n_eval)
    windows = np.sin(t_eval[:, None] - h * np.arange(2, -1, -1))
    est = [differentiate_latest(SampledSignal(h=h, values=w)) for w in windows]
    return np.abs(np.array(est) - np.cos(t_eval))


def simpson_errors(h0=CONVERGENCE_H0, halvings=N_HALVINGS, b=2.0):
    """Errors of the sin integral over ``[0, b]`` for ``h0, h0/2, ...``."""
    exact = 1.0 - math.cos(b)
    out = []
    for j in range(halvings + 1):
        n_int = int(round(b / (h0 / 2**j)))
        sig = SampledSignal.from_function(np.sin, 0.0, b, n_int + 1)
        out.append(abs(integrate_history(sig) - exact))
    return out


def diff3_errors(h0=CONVERGENCE_H0, halvings=N_HALVINGS, t=1.0):
    out = []
    for j in range(halvings + 1):
        h = h0 / 2**j
        sig = SampledSignal(h=h, values=np.sin(t - h * np.arange(2, -1, -1)))
        out.append(abs(backward_diff_3pt(sig) - math.cos(t)))
    return out


def ratios(errors):
    return [a / b for a, b in zip(errors, errors[1:])]


def run_checks(h=None, tol=None):
    """All sin(x) checks. ``h`` resamples the first two; ``tol`` replaces
    both absolute tolerances."""
    tol_int = INTEGRAL_TOL if tol is None else tol
    tol_diff = DERIVATIVE_TOL if tol is None else tol
    checks = []

    err, used_h = sin_integral_error(h)
    checks.append(Check("integral of sin over [0, pi]", err <= tol_int,
                        f"error={err:.3e} tol={tol_int:.1e} h={used_h:.6g}"))

    dh = DERIVATIVE_STEP if h is None else h
    errs = sin_derivative_errors(dh)
    checks.append(Check("derivative of sin vs cos", bool(errs.max() <= tol_diff),
                        f"max error={errs.max():.3e} over {errs.size} points "
                        f"tol={tol_diff:.1e} h={dh:.6g}"))

    lo, hi = SIMPSON_RATIO
    r = ratios(simpson_errors())
    checks.append(Check("Simpson convergence order", all(lo <= q <= hi for q in r),
                        "ratios=" + ",".join(f"{q:.2f}" for q in r) + f" in [{lo}, {hi}]"))

    lo, hi = DIFF3_RATIO
    r = ratios(diff3_errors())
    checks.append(Check("3-point difference convergence order",
                        all(lo <= q <= hi for q in r),
                        "ratios=" + ",".join(f"{q:.2f}" for q in r) + f" in [{lo}, {hi}]"))
    return checks
