from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from hspso.objectives import (
    ObjectiveSpec,
    ackley,
    get_objective,
    griewank,
    objective_names,
    quartic_noise,
    rastrigin,
    rosenbrock,
    sphere,
)

from conftest import ConstantRng, make_rng

ANALYTIC_MINIMIZERS = {
    "f1": np.zeros(30),
    "f2": np.ones(30),
    "f4": np.zeros(30),
    "f5": np.zeros(30),
    "f6": np.zeros(30),
}


class TestAnalyticValues:
    @pytest.mark.parametrize("name", sorted(ANALYTIC_MINIMIZERS))
    def test_global_minimum_is_zero(self, name):
        spec = get_objective(name)
        assert abs(spec.evaluate(ANALYTIC_MINIMIZERS[name])) <= 1e-12

    def test_sphere_values(self):
        assert sphere(np.r_[1.0, 2.0, 3.0, np.zeros(27)]) == 14.0
        assert sphere(np.full(30, 100.0)) == 300000.0

    def test_rosenbrock_values(self):
        assert rosenbrock(np.zeros(30)) == 29.0
        assert rosenbrock(np.array([-1.0, 1.0])) == 4.0

    def test_rastrigin_values(self):
        assert rastrigin(np.ones(30)) == pytest.approx(30.0, abs=1e-12)
        assert rastrigin(np.array([0.5])) == pytest.approx(20.25, abs=1e-12)

    def test_griewank_full_period_cosine(self):
        x = np.array([2.0 * np.pi])
        assert griewank(x) == pytest.approx((2.0 * np.pi) ** 2 / 4000.0, abs=1e-12)

    def test_ackley_closed_form_high_precision(self):
        # independent high-precision evaluation of the closed form at 0.5^2
        x = np.full(2, 0.5)
        with mpmath.workdps(50):
            expected = (
                -20 * mpmath.exp(-mpmath.mpf("0.2") * mpmath.sqrt(mpmath.mpf("0.25")))
                - mpmath.exp(mpmath.cos(2 * mpmath.pi * mpmath.mpf("0.5")))
                + 20
                + mpmath.e
            )
        assert ackley(x) == pytest.approx(float(expected), abs=1e-12)

    def test_griewank_closed_form_high_precision(self):
        x = np.full(2, 600.0)
        with mpmath.workdps(50):
            expected = (
                mpmath.mpf(2 * 600 ** 2) / 4000
                - mpmath.cos(mpmath.mpf(600)) * mpmath.cos(mpmath.mpf(600) / mpmath.sqrt(2))
                + 1
            )
        assert griewank(x) == pytest.approx(float(expected), abs=1e-9)


class TestQuarticNoise:
    def test_zero_noise_stub_equals_weighted_quartic(self):
        spec = get_objective("f3")
        assert spec.evaluate(np.zeros(30), ConstantRng(0.0)) == 0.0
        x = np.full(30, 0.5)
        expected = float(np.sum(np.arange(1, 31) * 0.5 ** 4))
        assert spec.evaluate(x, ConstantRng(0.0)) == expected

    def test_constant_half_noise(self):
        spec = get_objective("f3")
        assert spec.evaluate(np.zeros(30), ConstantRng(0.5)) == pytest.approx(15.0, abs=1e-12)

    def test_monte_carlo_mean_and_bounds(self):
        # at the origin the value is pure noise: mean 15 over many draws,
        # every sample inside [0, 30)
        rng = make_rng(42)
        spec = get_objective("f3")
        x = np.zeros(30)
        values = np.array([spec.evaluate(x, rng) for _ in range(10_000)])
        assert np.all(values >= 0.0) and np.all(values < 30.0)
        assert abs(values.mean() - 15.0) < 0.1  # se ~ 0.016, 6 sigma

    def test_per_eval_noise_mode(self):
        spec = get_objective("f3", noise_mode="per-eval")
        rng = make_rng(1)
        values = np.array([spec.evaluate(np.zeros(30), rng) for _ in range(2000)])
        assert np.all(values >= 0.0) and np.all(values < 1.0)
        assert abs(values.mean() - 0.5) < 0.05

    def test_noise_draw_order_is_index_order(self):
        rng1, rng2 = make_rng(7), make_rng(7)
        spec = get_objective("f3")
        value = spec.evaluate(np.zeros(30), rng1)
        assert value == pytest.approx(float(np.sum(rng2.random(30))), abs=0)

    def test_requires_rng(self):
        with pytest.raises(ValueError):
            get_objective("f3").evaluate(np.zeros(30))


class TestSpecInterface:
    def test_registry_names(self):
        assert {"f1", "f2", "f3", "f4", "f5", "f6", "filter"} <= set(objective_names())

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            get_objective("f7")

    @pytest.mark.parametrize(
        "name,half_width",
        [("f1", 100.0), ("f2", 30.0), ("f3", 1.28), ("f4", 32.0), ("f5", 5.12), ("f6", 600.0)],
    )
    def test_bounds(self, name, half_width):
        spec = get_objective(name)
        assert spec.dim == 30
        assert np.all(spec.lower == -half_width)
        assert np.all(spec.upper == half_width)

    def test_dimension_mismatch_rejected(self):
        spec = get_objective("f1", dim=5)
        with pytest.raises(ValueError):
            spec.evaluate(np.zeros(6))
        with pytest.raises(ValueError):
            spec.evaluate_batch(np.zeros((3, 6)))

    def test_rosenbrock_needs_two_dims(self):
        with pytest.raises(ValueError):
            get_objective("f2", dim=1)

    @pytest.mark.parametrize("name", ["f1", "f2", "f4", "f5", "f6"])
    def test_finite_at_all_box_corners(self, name):
        spec = get_objective(name, dim=6)
        for bits in range(64):
            corner = np.where([(bits >> i) & 1 for i in range(6)], spec.upper, spec.lower)
            assert math.isfinite(spec.evaluate(corner))

    @pytest.mark.parametrize("name", ["f1", "f2", "f4", "f5", "f6"])
    def test_batch_matches_scalar_bitwise(self, name):
        # the optimizer's fast path relies on row-for-row bit equality
        spec = get_objective(name)
        xs = make_rng(3).uniform(spec.lower, spec.upper, (64, spec.dim))
        batch = spec.evaluate_batch(xs)
        scalar = np.array([spec.evaluate(x) for x in xs])
        assert np.array_equal(batch, scalar)

    def test_evaluation_does_not_mutate_input(self):
        x = make_rng(5).uniform(-1, 1, 30)
        kept = x.copy()
        for name in ("f1", "f2", "f4", "f5", "f6"):
            get_objective(name).evaluate(x)
        get_objective("f3").evaluate(x, make_rng(0))
        assert np.array_equal(x, kept)

    def test_deterministic_objectives_repeatable(self):
        x = make_rng(8).uniform(-5, 5, 30)
        for name in ("f1", "f2", "f4", "f5", "f6"):
            spec = get_objective(name)
            assert spec.evaluate(x) == spec.evaluate(x)

    def test_bad_bounds_rejected(self):
        with pytest.raises(ValueError):
            ObjectiveSpec(
                name="bad",
                dim=2,
                lower=np.array([0.0, 0.0]),
                upper=np.array([1.0, 0.0]),
                _scalar=lambda x, rng: 0.0,
            )

    def test_quartic_noise_function_direct(self):
        rng = make_rng(9)
        x = np.full(4, 0.5)
        base = float(np.sum(np.arange(1, 5) * 0.5 ** 4))
        value = quartic_noise(x, ConstantRng(0.25))
        assert value == pytest.approx(base + 1.0, abs=1e-12)
        assert quartic_noise(x, rng, per_term=False) < base + 1.0
