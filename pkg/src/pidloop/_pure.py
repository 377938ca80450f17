"""Pure-Python closed-loop kernel (fallback when the extension is absent)."""

import math

import numpy as np

from .numerics import _diff_latest, _integrate


def integrate_array(values, h):
    values = np.ascontiguousarray(values, dtype=np.float64)
    return float(_integrate(values, h))


def _running_integral(e, k, odd, even, h):
    # odd/even: sums of e[i] over odd i <= k and even 2 <= i <= k
    if k == 0:
        return 0.0
    if k == 1:
        return 0.5 * h * (e[0] + e[1])
    if k % 2 == 0:
        return h / 3.0 * (e[0] + 4.0 * odd + 2.0 * (even - e[k]) + e[k])
    return (h / 3.0 * (e[0] + 4.0 * (odd - e[k]) + 2.0 * (even - e[k - 1]) + e[k - 1])
            + 0.5 * h * (e[k] + e[k - 1]))


def run_loop(ref, x0, h, kp, ki, kd, v_max, incremental, div_limit):
    """Advance the 1-D closed loop over every sample of ``ref``.

    Returns ``(x, e, v, n_valid, diverged)``; only the first ``n_valid``
    entries of the arrays are meaningful. ``v_max`` and ``div_limit`` use
    ``inf`` to mean "off". ``incremental`` evaluates the same parity rule
    from running odd/even sums in O(1) per step instead of re-summing.
    """
    ref = np.ascontiguousarray(ref, dtype=np.float64)
    n = ref.size
    x = np.empty(n)
    e = np.empty(n)
    v = np.empty(n)
    with np.errstate(over="ignore", invalid="ignore"):
        n_valid, diverged = _loop(ref, x, e, v, float(x0), h, kp, ki, kd, v_max,
                                  incremental, div_limit)
    return x, e, v, n_valid, diverged


def _loop(ref, x, e, v, xk, h, kp, ki, kd, v_max, incremental, div_limit):
    n = ref.size
    odd = even = 0.0
    n_valid = n
    diverged = False
    for k in range(n):
        ek = ref[k] - xk
        x[k] = xk
        e[k] = ek
        if not math.isfinite(ek):
            n_valid, diverged = k, True
            break
        hist = e[:k + 1]
        if incremental:
            if k % 2:
                odd += ek
            elif k:
                even += ek
            integral = _running_integral(e, k, odd, even, h)
        else:
            integral = _integrate(hist, h)
        vk = kp * ek + ki * integral + kd * _diff_latest(hist, h)
        if vk > v_max:
            vk = v_max
        elif vk < -v_max:
            vk = -v_max
        if not math.isfinite(vk):
            n_valid, diverged = k, True
            break
        v[k] = vk
        if abs(ek) > div_limit:
            n_valid, diverged = k + 1, True
            break
        xk = xk + vk * h
    return n_valid, diverged
