from __future__ import annotations

import math

import numpy as np
import pytest

from pluripot import metric_density as md
from pluripot.extremal import v_ball_many, v_kq_many


class TestMetricTensor:
    def test_identity_at_origin(self):
        mt = md.metric_tensor_at(np.zeros(3))
        assert np.allclose(mt.g, np.eye(3))
        assert mt.det_g == pytest.approx(1.0)

    def test_one_dimensional(self):
        mt = md.metric_tensor_at([1.0])
        assert mt.g[0, 0] == pytest.approx(0.25, rel=1e-15)
        assert mt.det_g == pytest.approx(0.25, rel=1e-15)

    def test_spectrum_three_d(self):
        mt = md.metric_tensor_at([1.0, 0.0, 0.0])
        assert np.allclose(mt.eigenvalues, [0.25, 0.5, 0.5], rtol=1e-13)
        assert mt.det_g == pytest.approx(2.0**-4, rel=1e-13)

    def test_random_sweep_closed_form(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 6))
            x = rng.uniform(-3, 3, size=n)
            mt = md.metric_tensor_at(x)
            s = 1.0 + float(x @ x)
            assert mt.det_g == pytest.approx(s ** -(n + 1), rel=1e-12)
            assert mt.eigenvalues[0] > 0


class TestBaranDelta:
    def test_origin_is_euclidean(self, rng):
        y = rng.normal(size=4)
        assert md.baran_delta_closed(np.zeros(4), y) == pytest.approx(
            np.linalg.norm(y), rel=1e-14)

    def test_parallel_direction(self, rng):
        x = rng.normal(size=3)
        val = md.baran_delta_closed(x, x)
        x2 = float(x @ x)
        assert val == pytest.approx(math.sqrt(x2) / (1 + x2), rel=1e-13)

    def test_quadratic_form_identity(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 6))
            x = rng.uniform(-2, 2, size=n)
            y = rng.normal(size=n)
            form = float(y @ md.metric_tensor_at(x).g @ y)
            assert md.baran_delta_closed(x, y) ** 2 == pytest.approx(form, rel=1e-12)

    def test_numeric_matches_closed(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 6))
            x = rng.uniform(-2, 2, size=n)
            y = rng.normal(size=n)
            est = md.baran_delta_numeric(v_kq_many, x, y)
            assert est.converged
            closed = md.baran_delta_closed(x, y)
            assert abs(est.value - closed) / closed < 1e-6

    def test_numeric_spec_points(self):
        est = md.baran_delta_numeric(v_kq_many, np.zeros(2), np.array([0.6, 0.8]))
        assert est.value == pytest.approx(1.0, abs=1e-8)
        est = md.baran_delta_numeric(v_kq_many, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        assert est.value == pytest.approx(math.sqrt(2) / 2, abs=1e-8)

    def test_ball_delta_at_origin(self):
        est = md.baran_delta_numeric(v_ball_many, np.zeros(2), np.array([1.0, 0.0]))
        assert est.value == pytest.approx(1.0, abs=1e-7)


class TestDualVolumes:
    def test_closed_form_normalizations(self):
        mt = md.metric_tensor_at([1.0, 0.0])
        assert md.dual_ball_volume_closed(mt, "ball-ratio") == pytest.approx(
            math.sqrt(1.0 / 8.0), rel=1e-13)
        assert md.dual_ball_volume_closed(mt, "lebesgue") == pytest.approx(
            math.pi * math.sqrt(1.0 / 8.0), rel=1e-13)

    def test_euclidean_ball_ratio_one(self, rng):
        norm = lambda y: np.linalg.norm(np.atleast_2d(y), axis=1)  # noqa: E731
        est = md.dual_ball_volume_mc(norm, 2, rng=rng, n_samples=200_000)
        assert abs(est.volume - math.pi) < 3 * est.std_error + 1e-3

    def test_mc_matches_closed_anisotropic(self, rng):
        x = np.array([1.0, 0.0])
        mt = md.metric_tensor_at(x)
        norm = lambda y: md.baran_delta_closed_many(x, np.atleast_2d(y))  # noqa: E731
        est = md.dual_ball_volume_mc(norm, 2, rng=rng, n_samples=400_000)
        closed = md.dual_ball_volume_closed(mt, "lebesgue")
        assert abs(est.volume - closed) < 3 * est.std_error

    def test_volume_product(self, rng):
        x = np.array([0.7, -0.4])
        norm = lambda y: md.baran_delta_closed_many(x, np.atleast_2d(y))  # noqa: E731
        dual = md.dual_ball_volume_mc(norm, 2, rng=rng, n_samples=300_000)
        primal = md.primal_ball_volume_mc(norm, 2, rng=rng, n_samples=300_000)
        product = dual.volume * primal.volume
        se = product * math.hypot(dual.std_error / dual.volume,
                                  primal.std_error / primal.volume)
        assert abs(product - md.unit_ball_volume(2) ** 2) < 3 * se

    def test_degenerate_norm_rejected(self, rng):
        norm = lambda y: np.abs(np.atleast_2d(y)[:, 0])  # noqa: E731  (vanishes on a ray)
        with pytest.raises(md.DegenerateNormError):
            md.dual_ball_volume_mc(norm, 2, rng=rng, n_samples=1000)

    def test_dispatcher(self, rng):
        mt = md.metric_tensor_at([0.0, 0.0])
        assert md.dual_ball_volume("riemann_closed", metric=mt) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            md.dual_ball_volume("monte_carlo")
        with pytest.raises(ValueError):
            md.dual_ball_volume("simplex", metric=mt)


class TestMaDensity:
    def test_origin(self):
        for n in (1, 2, 4):
            assert md.ma_density(np.zeros(n)).lam == pytest.approx(math.factorial(n))

    def test_one_dim_at_one(self):
        assert md.ma_density([1.0]).lam == pytest.approx(0.5, rel=1e-14)

    def test_two_dim(self):
        assert md.ma_density([1.0, 1.0]).lam == pytest.approx(2 / (3 * math.sqrt(3)),
                                                              rel=1e-13)

    def test_internal_identity(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 7))
            x = rng.uniform(-4, 4, size=n)
            sample = md.ma_density(x)
            root = math.sqrt(md.metric_tensor_at(x).det_g)
            assert sample.lam == pytest.approx(math.factorial(n) * root, rel=1e-12)
            assert sample.busemann == sample.holmes_thompson

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            md.ma_density([1.0, 2.0], n=3)


class TestTotalMass:
    def test_closed_values(self):
        assert md.total_mass(1).value == pytest.approx(math.pi, rel=1e-9)
        assert md.total_mass(2).value == pytest.approx(4 * math.pi, rel=1e-9)
        assert md.total_mass(3).value == pytest.approx(6 * math.pi**2, rel=1e-9)

    def test_matches_gamma_expression(self):
        for n in range(1, 7):
            q = md.total_mass(n)
            assert q.converged
            assert q.value == pytest.approx(md.total_mass_expected(n), rel=1e-8)

    def test_budget_exhaustion_reported(self):
        q = md.total_mass(2, tol=1e-15, budget=3)
        assert not q.converged
        assert q.error_estimate > 0

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            md.total_mass(7)


class TestBallPipeline:
    def test_one_dimensional(self, rng):
        est = md.ball_density_pipeline(np.zeros(1), rng=rng, n_samples=100_000)
        assert abs(est.lam - 2.0) / 2.0 < 0.02
        assert est.delta_converged

    def test_center_of_disc(self, rng):
        est = md.ball_density_pipeline(np.zeros(2), rng=rng, n_samples=100_000)
        assert abs(est.lam - 2 * math.pi) / (2 * math.pi) < 0.02

    def test_off_center(self, rng):
        for x in (np.array([0.5, 0.0]), np.array([0.3, 0.4])):
            est = md.ball_density_pipeline(x, rng=rng, n_samples=150_000)
            expected = md.ball_density_expected(x)
            assert abs(est.lam - expected) / expected < 0.02

    def test_boundary_guard(self, rng):
        with pytest.raises(ValueError):
            md.ball_density_pipeline(np.array([0.95, 0.0]), rng=rng)


class TestPropBaran:
    def test_conditions(self, rng):
        rep = md.prop_baran_conditions(rng, n=2, n_points=2000, n_fits=8)
        assert rep.claim1_max_laplacian < 1e-6
        assert rep.claim2_min_gap >= -1e-12
        assert rep.claim2_real_max_gap <= 1e-12
        assert 1.9 <= rep.claim3_exponent_min <= rep.claim3_exponent_max <= 2.1
