import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import Polynomial

from pidloop.numerics import (
    SampledSignal,
    backward_diff_2pt,
    backward_diff_3pt,
    differentiate_latest,
    integrate_history,
    simpson_composite,
    trapezoid_last,
)

coef = st.floats(-10, 10, allow_nan=False)
steps = st.floats(1e-3, 1.0)


def sig(values, h=1.0, t0=0.0):
    return SampledSignal(h=h, values=values, t0=t0)


def poly_signal(coefs, h, n, t0=0.0):
    p = Polynomial(coefs)
    t = t0 + h * np.arange(n)
    return p, SampledSignal(h=h, values=p(t), t0=t0)


def exact_integral(p, a, b):
    # oracle: analytic antiderivative
    P = p.integ()
    return P(b) - P(a)


def scale(p, a, b):
    # integral of |terms|; guards relative checks against cancellation
    return sum(abs(c) * max(abs(a), abs(b)) ** (i + 1) for i, c in enumerate(p.coef)) + 1e-300


class TestSampledSignal:
    def test_grid(self):
        s = sig([1, 2, 3], h=0.5, t0=1.0)
        np.testing.assert_array_equal(s.times, [1.0, 1.5, 2.0])
        assert s.t_last == 2.0
        assert len(s) == 3

    @pytest.mark.parametrize("h", [0.0, -1.0, math.inf, math.nan])
    def test_bad_step(self, h):
        with pytest.raises(ValueError):
            sig([1.0], h=h)

    @pytest.mark.parametrize("values", [[], [1.0, math.nan], [math.inf], [[1.0, 2.0]],
                                        np.r_[np.zeros(40), math.nan]])
    def test_bad_values(self, values):
        with pytest.raises(ValueError):
            sig(values)

    def test_from_function(self):
        s = SampledSignal.from_function(np.sin, 0.0, math.pi, 101)
        assert s.h == pytest.approx(math.pi / 100)
        assert s.values[-1] == pytest.approx(0.0, abs=1e-15)


class TestSimpson:
    def test_parabola(self):
        # 1 - (t-1)^2 integrated over [0, 2]
        assert simpson_composite(sig([0.0, 1.0, 0.0])) == pytest.approx(4 / 3, rel=1e-15)

    @given(c=coef, h=steps)
    def test_constant(self, c, h):
        assert simpson_composite(sig([c, c, c], h=h)) == pytest.approx(2 * h * c, rel=1e-12, abs=1e-300)

    def test_sin(self):
        s = SampledSignal.from_function(np.sin, 0.0, math.pi, 101)
        assert abs(simpson_composite(s) - 2.0) < 1e-6

    def test_weights(self):
        # 1, 4, 2, 4, 1 pattern via unit impulses
        h = 0.3
        weights = [simpson_composite(sig(np.eye(7)[i], h=h)) * 3 / h for i in range(7)]
        np.testing.assert_allclose(weights, [1, 4, 2, 4, 2, 4, 1], rtol=1e-15)

    @pytest.mark.parametrize("n", [1, 2, 4, 10])
    def test_rejects(self, n):
        with pytest.raises(ValueError):
            simpson_composite(sig(np.ones(n)))

    @settings(max_examples=200)
    @given(coefs=st.lists(coef, min_size=1, max_size=4), h=steps,
           m=st.integers(1, 30), t0=st.floats(-2, 2))
    def test_cubic_exact(self, coefs, h, m, t0):
        p, s = poly_signal(coefs, h, 2 * m + 1, t0)
        a, b = t0, s.t_last
        assert abs(simpson_composite(s) - exact_integral(p, a, b)) <= 1e-12 * scale(p, a, b)

    def test_quartic_not_exact(self):
        p, s = poly_signal([0, 0, 0, 0, 1], 0.5, 5)
        assert abs(simpson_composite(s) - exact_integral(p, 0, 2)) > 1e-3


class TestTrapezoidLast:
    def test_constant(self):
        assert trapezoid_last(sig([7.0, 1.0, 1.0], h=0.5)) == 0.5

    def test_triangle(self):
        assert trapezoid_last(sig([3.0, 0.0, 2.0], h=0.1)) == pytest.approx(0.1, rel=1e-15)

    @given(h=steps)
    def test_antisymmetric(self, h):
        assert trapezoid_last(sig([9.0, -1.0, 1.0], h=h)) == 0.0

    def test_rejects_single(self):
        with pytest.raises(ValueError):
            trapezoid_last(sig([1.0]))


class TestIntegrateHistory:
    def test_single(self):
        assert integrate_history(sig([5.0])) == 0.0

    def test_two_points(self):
        assert integrate_history(sig([1.0, 3.0], h=0.5)) == 1.0

    def test_even_count(self):
        # Simpson over [0, 1, 0] plus trapezoid on [0, 1]
        assert integrate_history(sig([0.0, 1.0, 0.0, 1.0])) == pytest.approx(11 / 6, rel=1e-15)

    def test_linear(self):
        s = SampledSignal.from_function(lambda t: t, 0.0, 1.0, 11)
        assert abs(integrate_history(s) - 0.5) < 1e-12

    @pytest.mark.parametrize("n", range(1, 12))
    def test_parity_dispatch(self, n):
        values = np.random.default_rng(n).normal(size=n)
        s = sig(values, h=0.2)
        if n == 1:
            expected = 0.0
        elif n == 2:
            expected = trapezoid_last(s)
        elif n % 2:
            expected = simpson_composite(s)
        else:
            expected = simpson_composite(sig(values[:-1], h=0.2)) + trapezoid_last(s)
        assert integrate_history(s) == expected

    @given(coefs=st.lists(coef, min_size=1, max_size=2), h=steps, n=st.integers(2, 60))
    def test_linear_exact_any_parity(self, coefs, h, n):
        p, s = poly_signal(coefs, h, n)
        b = s.t_last
        assert abs(integrate_history(s) - exact_integral(p, 0, b)) <= 1e-12 * scale(p, 0, b)

    @given(a=coef, b=coef, n=st.integers(1, 40), seed=st.integers(0, 2**16))
    def test_linearity(self, a, b, n, seed):
        rng = np.random.default_rng(seed)
        f, g = rng.normal(size=n), rng.normal(size=n)
        lhs = integrate_history(sig(a * f + b * g, h=0.1))
        rhs = a * integrate_history(sig(f, h=0.1)) + b * integrate_history(sig(g, h=0.1))
        bound = abs(a) * integrate_history(sig(np.abs(f), h=0.1)) \
            + abs(b) * integrate_history(sig(np.abs(g), h=0.1))
        assert abs(lhs - rhs) <= 1e-12 * bound + 1e-300

    def test_convergence_order(self):
        # global O(h^4) on a fixed interval
        errs = []
        for n_int in (50, 100, 200, 400):
            s = SampledSignal.from_function(np.sin, 0.0, 2.0, n_int + 1)
            errs.append(abs(integrate_history(s) - (1 - math.cos(2.0))))
        for a, b in zip(errs, errs[1:]):
            assert 12 <= a / b <= 20


class TestBackwardDiff:
    def test_2pt_constant(self):
        assert backward_diff_2pt(sig([3.0, 1.0, 1.0])) == 0.0

    def test_2pt_square(self):
        # (0.01 - 0) / 0.1
        assert backward_diff_2pt(sig([0.0, 0.01], h=0.1)) == pytest.approx(0.1, rel=1e-14)

    @given(h=steps)
    def test_2pt_unit_slope(self, h):
        assert backward_diff_2pt(sig([0.0, h], h=h)) == 1.0

    def test_3pt_constant(self):
        assert backward_diff_3pt(sig([2.0, 4.0, 4.0, 4.0])) == 0.0

    def test_3pt_square(self):
        # exact for quadratics: 2t at t = 0.2
        assert backward_diff_3pt(sig([0.0, 0.01, 0.04], h=0.1)) == pytest.approx(0.4, rel=1e-14)

    def test_3pt_sin(self):
        h = 0.01
        s = SampledSignal(h=h, values=np.sin(1.0 - h * np.array([2, 1, 0])))
        assert abs(backward_diff_3pt(s) - math.cos(1.0)) < 1e-4

    def test_3pt_error_term(self):
        # leading error is -(h^2/3) f''' ; for sin, f''' = -cos
        h = 1e-3
        s = SampledSignal(h=h, values=np.sin(1.0 - h * np.array([2, 1, 0])))
        err = backward_diff_3pt(s) - math.cos(1.0)
        assert err == pytest.approx(h**2 / 3 * math.cos(1.0), rel=0.01)

    @pytest.mark.parametrize("fn,n", [(backward_diff_2pt, 1), (backward_diff_3pt, 2)])
    def test_rejects_short(self, fn, n):
        with pytest.raises(ValueError):
            fn(sig(np.ones(n)))

    @given(coefs=st.lists(coef, min_size=1, max_size=3), h=steps, t0=st.floats(-2, 2))
    def test_3pt_quadratic_exact(self, coefs, h, t0):
        p, s = poly_signal(coefs, h, 3, t0)
        t = s.t_last
        dp = p.deriv()
        bound = sum(abs(c) * (i + 1) * (abs(t) + 2 * h) ** i for i, c in enumerate(dp.coef))
        # stencil cancellation grows like |f|/h
        bound += sum(abs(c) * (abs(t) + 2 * h) ** i for i, c in enumerate(p.coef)) / h
        assert abs(backward_diff_3pt(s) - dp(t)) <= 1e-12 * bound + 1e-300

    def test_3pt_convergence(self):
        errs = []
        for j in range(4):
            h = 0.02 / 2**j
            s = SampledSignal(h=h, values=np.sin(1.0 - h * np.array([2, 1, 0])))
            errs.append(abs(backward_diff_3pt(s) - math.cos(1.0)))
        for a, b in zip(errs, errs[1:]):
            assert 3.5 <= a / b <= 4.5


class TestDifferentiateLatest:
    def test_single(self):
        assert differentiate_latest(sig([7.0])) == 0.0

    def test_two(self):
        assert differentiate_latest(sig([0.0, 1.0])) == 1.0

    def test_three(self):
        assert differentiate_latest(sig([0.0, 0.01, 0.04], h=0.1)) == pytest.approx(0.4, rel=1e-14)

    @given(prefix=st.lists(coef, max_size=20), tail=st.lists(coef, min_size=3, max_size=3))
    def test_reads_only_last_three(self, prefix, tail):
        a = differentiate_latest(sig(prefix + tail, h=0.1))
        b = differentiate_latest(sig([123.0] * len(prefix) + tail, h=0.1))
        assert a == b == backward_diff_3pt(sig(tail, h=0.1))
