from __future__ import annotations

import math

import numpy as np
import pytest

from pluripot import ma_verify as mv
from pluripot.extremal import lie_norm, lie_u


class TestKernelCheck:
    def test_unit_imaginary_point(self):
        rep = mv.kernel_check(np.array([1j, 0.0]), 1e-3)
        assert rep.kernel_residual < 1e-5

    def test_sweep(self, rng):
        worst = 0.0
        for n in (2, 3):
            zs = mv.sample_off_real(rng, n, 150)
            for i in range(zs.shape[0]):
                worst = max(worst, mv.kernel_check(zs[i], 1e-3).kernel_residual)
        assert worst < 1e-4

    def test_real_point_rejected(self):
        with pytest.raises(ValueError):
            mv.kernel_check(np.array([1.0 + 0j, 2.0]), 1e-3)

    def test_weight_variety_is_fine(self):
        # 1 + z^2 = 0 at z = i e_1 makes the weight singular, but the
        # candidate itself stays smooth there and the check must accept it
        rep = mv.kernel_check(np.array([1j, 0.0, 0.0]), 1e-3)
        assert rep.kernel_residual < 1e-5

    def test_order_of_convergence(self, rng):
        ratios = []
        for z in mv.sample_off_real(rng, 2, 40, y_range=(0.3, 2.0)):
            r_h = mv.kernel_check(z, 1e-3, richardson=False).kernel_residual
            r_h2 = mv.kernel_check(z, 5e-4, richardson=False).kernel_residual
            if r_h2 > 1e-8:
                ratios.append(r_h / r_h2)
        assert 3.5 <= float(np.median(ratios)) <= 4.5


class TestMaximalityCheck:
    def test_one_variable_laplacian(self):
        # planar harmonic off R: the 1x1 report is the Laplacian / 4
        rep = mv.maximality_check(np.array([2j]), 1e-3)
        assert abs(rep.det_value) < 1e-5

    def test_sweep_determinant_and_spectrum(self, rng):
        for n in (2, 3):
            zs = mv.sample_off_real(rng, n, 100)
            for i in range(zs.shape[0]):
                rep = mv.maximality_check(zs[i], 1e-3)
                assert abs(rep.det_value) < 1e-4
                assert rep.min_eigenvalue > -1e-6

    def test_determinant_order_of_convergence(self, rng):
        ratios = []
        for z in mv.sample_off_real(rng, 2, 40, y_range=(0.3, 2.0)):
            d_h = abs(mv.maximality_check(z, 1e-3, richardson=False).det_value)
            d_h2 = abs(mv.maximality_check(z, 5e-4, richardson=False).det_value)
            if d_h2 > 1e-8:
                ratios.append(d_h / d_h2)
        assert 3.5 <= float(np.median(ratios)) <= 4.5


class TestHomogeneousKernel:
    def test_real_exterior_point(self):
        rep = mv.homogeneous_kernel_check(np.array([2.0 + 0j, 0.0, 0.0]), 1e-3)
        assert rep.kernel_residual < 1e-5

    def test_homogeneity(self, rng):
        z = rng.normal(size=4) + 1j * rng.normal(size=4)
        lam = 3.0
        assert lie_u(lam * z) - lie_u(z) == pytest.approx(math.log(lam), abs=1e-12)

    def test_sweep(self, rng):
        worst = 0.0
        for _ in range(100):
            z = rng.normal(size=4) + 1j * rng.normal(size=4)
            z *= math.exp(rng.uniform(math.log(1.5), math.log(10.0))) / lie_norm(z)
            worst = max(worst, mv.homogeneous_kernel_check(z, 1e-3).kernel_residual)
        assert worst < 1e-4

    def test_standoff_rejected(self, rng):
        z = rng.normal(size=3).astype(complex)
        z *= 0.5 / lie_norm(z)
        with pytest.raises(ValueError):
            mv.homogeneous_kernel_check(z, 1e-3)


class TestConjugationSymmetry:
    def test_hessian_matches_at_conjugate(self, rng):
        worst = 0.0
        for z in mv.sample_off_real(rng, 2, 15):
            worst = max(worst, mv.hessian_conjugate_gap(z))
        for z in mv.sample_off_real(rng, 3, 10):
            worst = max(worst, mv.hessian_conjugate_gap(z))
        assert worst < 1e-8
