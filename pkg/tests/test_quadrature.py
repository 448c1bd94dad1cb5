import math

import numpy as np
import pytest

from difkit.quadrature import (QuadratureConfig, Rectangle, Triangle,
                               integrate_double, integrate_finite,
                               integrate_semi_infinite)

TIGHT = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-15)


class TestFinite:
    def test_polynomial(self):
        r = integrate_finite(lambda x: x ** 2, 0.0, 1.0)
        assert r.converged
        assert abs(r.value - 1.0 / 3.0) < 1e-12

    def test_full_period_complex(self):
        r = integrate_finite(lambda x: np.exp(1j * x), 0.0, 2.0 * math.pi)
        assert r.converged
        assert abs(r.value) < 1e-10

    def test_endpoint_singularity(self):
        r = integrate_finite(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0)
        assert r.converged
        assert abs(r.value - 2.0) < 1e-9

    def test_empty_interval(self):
        r = integrate_finite(lambda x: x, 1.0, 1.0)
        assert r.converged and r.value == 0

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            integrate_finite(lambda x: x, 1.0, 0.0)

    def test_budget_exhaustion_reports_nonconverged(self):
        cfg = QuadratureConfig(rel_tol=1e-14, abs_tol=1e-16, max_evaluations=60)
        r = integrate_finite(lambda x: np.cos(50.0 * x) / np.sqrt(np.abs(x) + 1e-12),
                             0.0, 1.0, cfg)
        assert not r.converged
        assert r.evaluations <= 60

    def test_determinism(self):
        f = lambda x: np.exp(-x) * np.cos(7.0 * x)  # noqa: E731
        r1 = integrate_finite(f, 0.0, 10.0, TIGHT)
        r2 = integrate_finite(f, 0.0, 10.0, TIGHT)
        assert r1.value == r2.value
        assert r1.error_estimate == r2.error_estimate
        assert r1.evaluations == r2.evaluations


class TestSemiInfinite:
    def test_exponential(self):
        r = integrate_semi_infinite(lambda x: np.exp(-x), 0.0)
        assert r.converged
        assert abs(r.value - 1.0) < 1e-10

    def test_dirichlet(self):
        cfg = QuadratureConfig(oscillation_period_hint=2.0 * math.pi)
        r = integrate_semi_infinite(lambda x: np.sinc(x / math.pi), 0.0, cfg)
        assert r.converged
        assert abs(r.value - math.pi / 2.0) < 1e-9

    def test_gaussian_moment(self):
        r = integrate_semi_infinite(lambda x: x * np.exp(-x * x), 0.0)
        assert r.converged
        assert abs(r.value - 0.5) < 1e-10

    def test_divergence_detected(self):
        r = integrate_semi_infinite(lambda x: np.exp(0.5 * x), 0.0)
        assert not r.converged
        assert math.isinf(r.error_estimate)

    def test_nonzero_start(self):
        r = integrate_semi_infinite(lambda x: np.exp(-x), 3.0)
        assert r.converged
        assert abs(r.value - math.exp(-3.0)) < 1e-11


class TestDouble:
    def test_triangle_area(self):
        r = integrate_double(lambda tp, ts: np.ones_like(ts), Triangle(0.0, 1.0), TIGHT)
        assert r.converged
        assert abs(r.value - 0.5) < 1e-11

    def test_triangle_exponential(self):
        r = integrate_double(lambda tp, ts: np.exp(-(tp - ts)), Triangle(0.0, 1.0), TIGHT)
        assert abs(r.value - math.exp(-1.0)) < 1e-11

    def test_rectangle_area(self):
        r = integrate_double(lambda tp, ts: np.ones_like(ts),
                             Rectangle(0.0, 2.0, 0.0, 3.0), TIGHT)
        assert abs(r.value - 6.0) < 1e-11

    def test_rectangle_separable(self):
        r = integrate_double(lambda tp, ts: tp * ts, Rectangle(0.0, 1.0, 0.0, 2.0), TIGHT)
        assert abs(r.value - 1.0) < 1e-11


class TestProperties:
    def test_linearity(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            a, b = rng.uniform(0.5, 3.0, 2)
            w1, w2 = rng.uniform(0.5, 6.0, 2)
            f = lambda x: np.exp(-w1 * x) * np.cos(w2 * x)  # noqa: E731
            g = lambda x: np.sin(w2 * x) / (1.0 + x * x)  # noqa: E731
            rf = integrate_finite(f, 0.0, 4.0, TIGHT)
            rg = integrate_finite(g, 0.0, 4.0, TIGHT)
            rc = integrate_finite(lambda x: a * f(x) + b * g(x), 0.0, 4.0, TIGHT)
            combined = a * rf.value + b * rg.value
            budget = rc.error_estimate + abs(a) * rf.error_estimate \
                + abs(b) * rg.error_estimate + 1e-13
            assert abs(rc.value - combined) <= budget

    def test_interval_additivity(self):
        rng = np.random.default_rng(11)
        f = lambda x: np.exp(-0.3 * x) * np.sin(3.0 * x)  # noqa: E731
        for _ in range(5):
            mid = rng.uniform(0.5, 4.5)
            whole = integrate_finite(f, 0.0, 5.0, TIGHT)
            left = integrate_finite(f, 0.0, mid, TIGHT)
            right = integrate_finite(f, mid, 5.0, TIGHT)
            budget = whole.error_estimate + left.error_estimate \
                + right.error_estimate + 1e-13
            assert abs(whole.value - (left.value + right.value)) <= budget

    # integrals with known closed forms: the reported estimate must bound the
    # true error on every one of them
    KNOWN = [
        (lambda x: x ** 3, 0.0, 2.0, 4.0),
        (lambda x: np.sin(x), 0.0, math.pi, 2.0),
        (lambda x: np.exp(x), 0.0, 1.0, math.e - 1.0),
        (lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0, math.pi / 4.0),
        (lambda x: np.log(x), 1.0, math.e, 1.0),
        (lambda x: np.cos(10.0 * x), 0.0, 1.0, math.sin(10.0) / 10.0),
        (lambda x: np.sqrt(x), 0.0, 4.0, 16.0 / 3.0),
        (lambda x: x * np.exp(-x), 0.0, 50.0, 1.0 - 51.0 * math.exp(-50.0)),
        (lambda x: np.cosh(x), -1.0, 1.0, 2.0 * math.sinh(1.0)),
        (lambda x: np.exp(2j * x), 0.0, 1.0, (np.exp(2j) - 1.0) / 2j),
        (lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, 2.0),
        (lambda x: x ** 5 - x, -1.0, 2.0, 63.0 / 6.0 - 1.5),
    ]

    @pytest.mark.parametrize("f,a,b,exact", KNOWN)
    def test_error_estimate_bounds_truth(self, f, a, b, exact):
        r = integrate_finite(f, a, b, QuadratureConfig(rel_tol=1e-10, abs_tol=1e-13))
        assert abs(r.value - exact) <= max(r.error_estimate, 1e-14)

    def test_converged_invariant(self):
        cfg = QuadratureConfig()
        for f, a, b, _ in self.KNOWN:
            r = integrate_finite(f, a, b, cfg)
            if r.converged:
                assert r.error_estimate <= cfg.rel_tol * max(1.0, abs(r.value)) + 1e-300


class TestConfig:
    def test_rejects_bad_tolerances(self):
        with pytest.raises(ValueError):
            QuadratureConfig(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(abs_tol=-1.0)

    def test_rejects_tiny_budget(self):
        with pytest.raises(ValueError):
            QuadratureConfig(max_evaluations=10)

    def test_rejects_bad_hint(self):
        with pytest.raises(ValueError):
            QuadratureConfig(oscillation_period_hint=0.0)
