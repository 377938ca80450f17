# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled closed-loop kernel; mirrors ``pidloop._pure`` call for call."""

from libc.math cimport fabs, isfinite

import numpy as np


cdef double _simpson(const double[::1] f, Py_ssize_t n, double h) noexcept nogil:
    # n odd, >= 3
    cdef double odd = 0.0, even = 0.0
    cdef Py_ssize_t i
    for i in range(1, n - 1, 2):
        odd += f[i]
    for i in range(2, n - 1, 2):
        even += f[i]
    return h / 3.0 * (f[0] + 4.0 * odd + 2.0 * even + f[n - 1])


cdef double _integrate(const double[::1] f, Py_ssize_t n, double h) noexcept nogil:
    if n == 1:
        return 0.0
    if n == 2:
        return 0.5 * h * (f[0] + f[1])
    if n % 2 == 1:
        return _simpson(f, n, h)
    return _simpson(f, n - 1, h) + 0.5 * h * (f[n - 1] + f[n - 2])


cdef double _diff_latest(const double[::1] f, Py_ssize_t n, double h) noexcept nogil:
    if n == 1:
        return 0.0
    if n == 2:
        return (f[1] - f[0]) / h
    return (f[n - 3] - 4.0 * f[n - 2] + 3.0 * f[n - 1]) / (2.0 * h)


cdef double _running_integral(const double[::1] e, Py_ssize_t k, double odd,
                              double even, double h) noexcept nogil:
    if k == 0:
        return 0.0
    if k == 1:
        return 0.5 * h * (e[0] + e[1])
    if k % 2 == 0:
        return h / 3.0 * (e[0] + 4.0 * odd + 2.0 * (even - e[k]) + e[k])
    return (h / 3.0 * (e[0] + 4.0 * (odd - e[k]) + 2.0 * (even - e[k - 1]) + e[k - 1])
            + 0.5 * h * (e[k] + e[k - 1]))


def integrate_array(values, double h):
    cdef const double[::1] f = np.ascontiguousarray(values, dtype=np.float64)
    return _integrate(f, f.shape[0], h)


def run_loop(ref_in, double x0, double h, double kp, double ki, double kd,
             double v_max, bint incremental, double div_limit):
    cdef const double[::1] ref = np.ascontiguousarray(ref_in, dtype=np.float64)
    cdef Py_ssize_t n = ref.shape[0]
    x_arr = np.empty(n)
    e_arr = np.empty(n)
    v_arr = np.empty(n)
    cdef double[::1] x = x_arr
    cdef double[::1] e = e_arr
    cdef double[::1] v = v_arr
    cdef double xk = x0, ek, vk, integral, odd = 0.0, even = 0.0
    cdef Py_ssize_t k, n_valid = n
    cdef bint diverged = False
    with nogil:
        for k in range(n):
            ek = ref[k] - xk
            x[k] = xk
            e[k] = ek
            if not isfinite(ek):
                n_valid = k
                diverged = True
                break
            if incremental:
                if k % 2:
                    odd += ek
                elif k:
                    even += ek
                integral = _running_integral(e, k, odd, even, h)
            else:
                integral = _integrate(e, k + 1, h)
            vk = kp * ek + ki * integral + kd * _diff_latest(e, k + 1, h)
            if vk > v_max:
                vk = v_max
            elif vk < -v_max:
                vk = -v_max
            if not isfinite(vk):
                n_valid = k
                diverged = True
                break
            v[k] = vk
            if fabs(ek) > div_limit:
                n_valid = k + 1
                diverged = True
                break
            xk = xk + vk * h
    return x_arr, e_arr, v_arr, n_valid, diverged
