from __future__ import annotations

import math

import numpy as np
import pytest

from pluripot import sphere_lift as sl
from pluripot.extremal import v_ball, v_ball_many, weight_q_many


class TestLift:
    def test_origin(self):
        sp = sl.lift_f(np.zeros(3, dtype=complex))
        assert np.allclose(sp.w, np.eye(4)[0])
        assert sp.defect < 1e-15

    def test_real_points_hit_upper_hemisphere(self, rng):
        for _ in range(50):
            x = rng.uniform(-5, 5, size=3)
            sp = sl.lift_f(x.astype(complex))
            scale = 1.0 / math.sqrt(1 + x @ x)
            assert np.allclose(sp.w.imag, 0.0, atol=1e-15)
            assert sp.w[0].real == pytest.approx(scale, rel=1e-14)
            assert np.allclose(sp.w[1:].real, x * scale, atol=1e-14)
            assert abs(np.linalg.norm(sp.w) - 1.0) < 1e-14

    def test_variety_defect(self, rng):
        z = sl.sample_strip(rng, 4, 500)
        w = sl.lift_many(z)
        defect = np.abs(np.sum(w * w, axis=1) - 1.0)
        assert float(np.max(defect)) < 1e-12

    def test_outside_strip_rejected(self):
        with pytest.raises(ValueError):
            sl.lift_f(np.array([0.95j]), s=0.9)

    def test_branch_guard(self):
        # with a relaxed strip bound the cut at arg = pi becomes reachable
        with pytest.raises(sl.UnliftablePointError):
            sl.lift_f(np.array([2j]), s=3.0)
        # approach from below the cut (arg near -pi) is guarded too
        with pytest.raises(sl.UnliftablePointError):
            sl.lift_f(np.array([1e-9 + 2j]), s=3.0)

    def test_strip_point_type(self):
        sp = sl.StripPoint.of([0.1 + 0.2j], s=0.9)
        assert sp.strip_norm == pytest.approx(0.2)
        with pytest.raises(ValueError):
            sl.StripPoint.of([1j], s=0.9)

    def test_sphere_point_type_rejects_off_variety(self):
        with pytest.raises(ValueError):
            sl.SpherePoint.of([1.0 + 0j, 0.5])


class TestLiftNormSq:
    def test_origin_and_reals(self, rng):
        assert sl.lift_norm_sq(np.zeros(2, dtype=complex)) == pytest.approx(1.0)
        x = rng.uniform(-3, 3, size=3)
        assert sl.lift_norm_sq(x.astype(complex)) == pytest.approx(1.0, rel=1e-14)

    def test_small_imaginary(self):
        assert sl.lift_norm_sq([0.3j]) == pytest.approx(1.09 / 0.91, rel=1e-14)

    def test_matches_lifted_norm(self, rng):
        z = sl.sample_strip(rng, 2, 200)
        for i in range(z.shape[0]):
            w = sl.lift_f(z[i])
            assert sl.lift_norm_sq(z[i]) == pytest.approx(
                float(np.sum(np.abs(w.w) ** 2)), rel=1e-12)


class TestFullin:
    def test_real_points_vanish(self, rng):
        x = rng.uniform(-3, 3, size=(50, 2)).astype(complex)
        assert float(np.max(sl.fullin_residual_many(x))) < 1e-13

    def test_spec_point(self):
        z = np.array([0.4j, 0.2 + 0j])
        assert sl.fullin_residual(z) < 1e-10

    def test_strip_sweep(self, rng):
        for n in (1, 2, 3, 4):
            z = sl.sample_strip(rng, n, 10_000, s=0.9)
            assert float(np.max(sl.fullin_residual_many(z))) < 1e-9

    def test_upper_bound_direction(self, rng):
        # the envelope-theoretic inequality: VKQ - Q <= V_ball on the lift
        z = sl.sample_strip(rng, 2, 2000)
        w = sl.lift_many(z)
        qv, _ = weight_q_many(z)
        from pluripot.extremal import v_kq_many
        excess = v_kq_many(z) - qv - v_ball_many(w)
        assert float(np.max(excess)) < 1e-9


class TestSemiIdentity:
    def test_real_lift(self, rng):
        x = rng.uniform(-2, 2, size=3)
        assert sl.semi_identity(sl.lift_f(x.astype(complex))) == 0.0

    def test_spec_point(self):
        w = sl.lift_f(np.array([0.5j, 0.0]))
        assert sl.semi_identity(w) < 1e-12

    def test_sweep(self, rng):
        w = sl.lift_many(sl.sample_strip(rng, 3, 1000))
        assert float(np.max(sl.semi_identity_many(w))) < 1e-11

    def test_sign_symmetry(self, rng):
        w = sl.lift_many(sl.sample_strip(rng, 2, 500))
        flipped = w.copy()
        flipped[:, 0] = -flipped[:, 0]
        assert float(np.max(np.abs(v_ball_many(w) - v_ball_many(flipped)))) < 1e-12

    def test_weight_condition_on_lift(self, rng):
        # -log|W_0| recovers the potential, independent of the root choice
        z = sl.sample_strip(rng, 2, 500)
        w = sl.lift_many(z)
        qv, _ = weight_q_many(z)
        assert float(np.max(np.abs(-np.log(np.abs(w[:, 0])) - qv))) < 1e-12


class TestOrthogonalPushforward:
    def test_identity(self):
        sp = sl.lift_f(np.array([0.2j, 0.1 + 0j]))
        moved = sl.orthogonal_pushforward(np.eye(3), sp)
        assert np.allclose(moved.w, sp.w)

    def test_permutation_preserves_value(self):
        sp = sl.lift_f(np.array([0.5 + 0.1j, -0.2 + 0.3j]))
        perm = np.eye(3)[[2, 0, 1]]
        moved = sl.orthogonal_pushforward(perm, sp)
        assert v_ball(moved.w) == pytest.approx(v_ball(sp.w), abs=1e-14)

    def test_random_rotations(self, rng):
        z = sl.sample_strip(rng, 2, 100)
        for i in range(z.shape[0]):
            sp = sl.lift_f(z[i])
            q_mat = np.linalg.qr(rng.normal(size=(3, 3)))[0]
            moved = sl.orthogonal_pushforward(q_mat, sp)
            assert moved.defect < 1e-12
            assert abs(v_ball(moved.w) - v_ball(sp.w)) < 1e-10

    def test_non_orthogonal_rejected(self):
        sp = sl.lift_f(np.array([0.1j, 0j]))
        with pytest.raises(ValueError):
            sl.orthogonal_pushforward(np.diag([1.0, 2.0, 1.0]), sp)
