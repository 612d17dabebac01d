import math

import numpy as np
import pytest

from ultimum import (
    expected_theta,
    median,
    objective,
    pasting_diagnostic,
    rescale,
    scale_w,
    solve,
    solve_threshold,
    threshold_function_g,
    value_function,
)


def exp_integral(rho, y):
    # int_0^y exp(rho x) dx
    if rho == 0.0:
        return y
    return math.expm1(rho * y) / rho


def g_closed_form(model, y):
    """Antiderivative-based evaluation of G, independent of the quadrature."""
    phi0 = model.phi0
    total = -scale_w(model, 0.0)
    for r, c in zip(model.rates, model.amplitudes):
        if r == 0.0:
            continue
        total += model.prefactor * c * r * (exp_integral(r, y) - 2.0 * exp_integral(r - phi0, y))
    return total


def v_closed_form(model, y_star, y):
    """Antiderivative-based evaluation of V, independent of the quadrature."""
    if y >= y_star:
        return 0.0
    phi0 = model.phi0
    span = y_star - y
    total = 0.0
    for r, c in zip(model.rates, model.amplitudes):
        total += model.prefactor * c * (
            2.0 * math.exp(-phi0 * y) * exp_integral(r - phi0, span) - exp_integral(r, span)
        )
    return total


def bm_reference_root():
    # exp(-2 mu y / sigma^2) - 1 + (4 mu / sigma^2) y = 0 reads
    # exp(y) - 1 - 2y = 0 at sigma = 1, mu = -0.5.
    f = lambda y: math.exp(y) - 1.0 - 2.0 * y
    lo, hi = 0.5, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestThresholdFunction:
    def test_zero_at_origin_unbounded_variation(self, bm_model, jd_model):
        assert threshold_function_g(bm_model, 0.0) == pytest.approx(0.0, abs=1e-12)
        assert threshold_function_g(jd_model, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_atom_at_origin_compound_poisson(self, cp_model):
        assert threshold_function_g(cp_model, 0.0) == pytest.approx(-0.5, abs=1e-14)

    def test_bm_root_of_displayed_equation(self, bm_model):
        root = bm_reference_root()
        assert abs(threshold_function_g(bm_model, root)) < 1e-8

    def test_matches_closed_form(self, bm_model, jd_model, cp_model):
        for model in (bm_model, jd_model, cp_model):
            for y in np.linspace(0.05, 4.0 / model.phi0, 25):
                assert threshold_function_g(model, y) == pytest.approx(
                    g_closed_form(model, y), abs=1e-9, rel=1e-9
                )

    def test_negative_argument_rejected(self, bm_model):
        with pytest.raises(ValueError):
            threshold_function_g(bm_model, -0.1)

    def test_shape_negative_then_increasing(self, bm_model, jd_model, cp_model):
        for model in (bm_model, jd_model, cp_model):
            m = math.log(2.0) / model.phi0
            y_star = solve_threshold(model)
            assert threshold_function_g(model, m) < 0.0
            grid = np.linspace(m, y_star + 1.0, 100)
            vals = [threshold_function_g(model, y) for y in grid]
            assert np.all(np.diff(vals) > 0.0)


class TestSolveThreshold:
    def test_jd_benchmark_threshold(self, jd_model):
        assert solve_threshold(jd_model) == pytest.approx(2.0, abs=0.05)

    def test_cp_benchmark_threshold(self, cp_model):
        y_star = solve_threshold(cp_model)
        assert 0.70 <= y_star <= 0.76

    def test_bm_against_displayed_equation(self, bm_model):
        assert solve_threshold(bm_model) == pytest.approx(bm_reference_root(), abs=1e-8)

    def test_root_property_and_location(self, bm_model, jd_model, cp_model):
        for model in (bm_model, jd_model, cp_model):
            y_star = solve_threshold(model)
            m = math.log(2.0) / model.phi0
            assert y_star > m
            tol = 1e-8 * max(1.0, scale_w(model, y_star))
            assert abs(threshold_function_g(model, y_star)) < tol

    def test_scaling_invariance(self, bm_model, jd_model, cp_model):
        rng = np.random.default_rng(515151)
        for model in (bm_model, jd_model, cp_model):
            y_star = solve_threshold(model)
            for _ in range(5):
                c = 10.0 ** rng.uniform(-3.0, 3.0)
                assert abs(solve_threshold(rescale(model, c)) - y_star) <= 1e-10


class TestValueFunction:
    def test_zero_at_and_beyond_threshold(self, bm_model, jd_model, cp_model):
        for model in (bm_model, jd_model, cp_model):
            y_star = solve_threshold(model)
            assert value_function(model, y_star, y_star) == 0.0
            assert value_function(model, y_star, y_star + 0.5) == 0.0
            assert value_function(model, y_star, 10.0 * y_star) == 0.0

    def test_negative_at_zero(self, bm_model, jd_model, cp_model):
        for model in (bm_model, jd_model, cp_model):
            y_star = solve_threshold(model)
            assert value_function(model, y_star, 0.0) < 0.0

    def test_matches_closed_form(self, bm_model, jd_model, cp_model):
        for model in (bm_model, jd_model, cp_model):
            y_star = solve_threshold(model)
            for y in np.linspace(0.0, y_star, 23):
                assert value_function(model, y_star, y) == pytest.approx(
                    v_closed_form(model, y_star, y), abs=1e-9, rel=1e-9
                )

    def test_nondecreasing_and_nonpositive(self, bm_model, jd_model, cp_model):
        for model in (bm_model, jd_model, cp_model):
            y_star = solve_threshold(model)
            ys = np.linspace(0.0, 1.5 * y_star, 500)
            vals = np.array([value_function(model, y_star, y) for y in ys])
            assert np.all(vals <= 0.0)
            assert np.all(np.diff(vals) >= -1e-10)
            assert np.all(np.abs(vals[ys >= y_star]) < 1e-9)

    def test_continuity_at_threshold(self, bm_model, cp_model):
        # V is continuous even where pasting is not smooth
        for model in (bm_model, cp_model):
            y_star = solve_threshold(model)
            assert abs(value_function(model, y_star, y_star - 1e-8)) < 1e-6

    def test_negative_argument_rejected(self, bm_model):
        with pytest.raises(ValueError):
            value_function(bm_model, 1.0, -0.5)


class TestObjective:
    def test_bounds(self, bm_model, jd_model, cp_model):
        for model in (bm_model, jd_model, cp_model):
            obj = objective(model)
            assert 0.0 <= obj <= expected_theta(model.family)

    def test_bm_frozen_value(self, bm_model):
        # V(0) + E[theta] with the closed-form V at the solved threshold
        y_star = solve_threshold(bm_model)
        expected = v_closed_form(bm_model, y_star, 0.0) + 2.0
        assert objective(bm_model) == pytest.approx(expected, abs=1e-9)


class TestPasting:
    def test_bm_smooth(self, bm_model):
        y_star = solve_threshold(bm_model)
        diag = pasting_diagnostic(bm_model, y_star)
        assert diag.classification == "smooth"
        assert abs(diag.left_derivative) <= 1e-3 * scale_w(bm_model, y_star)

    def test_jd_smooth(self, jd_model):
        y_star = solve_threshold(jd_model)
        assert pasting_diagnostic(jd_model, y_star).classification == "smooth"

    def test_cp_continuous_with_analytic_left_derivative(self, cp_model):
        y_star = solve_threshold(cp_model)
        diag = pasting_diagnostic(cp_model, y_star)
        assert diag.classification == "continuous"
        # left derivative of V at y*- is (1 - 2 exp(-phi0 y*)) W(0)
        analytic = (1.0 - 2.0 * math.exp(-cp_model.phi0 * y_star)) * scale_w(cp_model, 0.0)
        assert diag.left_derivative == pytest.approx(analytic, rel=1e-3)
        assert diag.left_derivative > 0.0

    def test_extrapolants_stable(self, cp_model):
        y_star = solve_threshold(cp_model)
        diag = pasting_diagnostic(cp_model, y_star)
        assert diag.e1 == pytest.approx(diag.e2, rel=0.05)

    def test_h_domain(self, bm_model):
        y_star = solve_threshold(bm_model)
        with pytest.raises(ValueError):
            pasting_diagnostic(bm_model, y_star, h=y_star)
        with pytest.raises(ValueError):
            pasting_diagnostic(bm_model, y_star, h=0.0)


class TestSolve:
    def test_solution_fields(self, cp, cp_model):
        sol = solve(cp_model, curve_points=50)
        assert sol.y_star == pytest.approx(solve_threshold(cp_model))
        assert sol.median == pytest.approx(median(cp))
        assert sol.objective == pytest.approx(sol.value_at_zero + sol.expected_theta)
        assert sol.pasting == "continuous"
        assert sol.value_curve.shape == (50, 2)
        vs = sol.value_curve[:, 1]
        assert np.all(np.diff(vs) >= -1e-10)
        assert vs[-1] == pytest.approx(0.0, abs=1e-12)
