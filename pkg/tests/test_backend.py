from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from pluripot import _backend as be


class TestKernelEquivalence:
    def test_pqr_matches_numpy(self, rng):
        xr = rng.normal(size=(500, 4))
        xi = rng.normal(size=(500, 4))
        p0, q0, r0 = be._pqr_numpy(xr, xi)
        p1, q1, r1 = be.pqr_stats(np.ascontiguousarray(xr), np.ascontiguousarray(xi))
        assert np.allclose(p0, p1, rtol=1e-14)
        assert np.allclose(q0, q1, rtol=1e-14)
        assert np.allclose(r0, r1, rtol=1e-14, atol=1e-14)

    def test_membership_matches_numpy(self, rng):
        dirs = rng.normal(size=(96, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        w = np.concatenate([dirs, -dirs]) * rng.uniform(0.8, 1.2, size=(192, 1))
        samples = rng.uniform(-1.5, 1.5, size=(20_000, 3))
        # lo far below the coarse covering deficit keeps early accepts valid
        active = be.dual_membership_count(samples, w, n_coarse=48, lo=0.5)
        reference = be._dual_membership_numpy(samples, w[:48], w[48:], 0.5)
        brute = int(np.count_nonzero((samples @ w.T).max(axis=1) <= 1.0))
        assert active == reference == brute

    def test_membership_empty_fine_block(self, rng):
        w = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        samples = rng.uniform(-2, 2, size=(5000, 2))
        count = be.dual_membership_count(samples, w, n_coarse=4, lo=0.5)
        brute = int(np.count_nonzero((samples @ w.T).max(axis=1) <= 1.0))
        assert count == brute

    def test_coarse_index_validation(self, rng):
        w = rng.normal(size=(8, 2))
        with pytest.raises(ValueError):
            be.dual_membership_count(rng.normal(size=(10, 2)), w, n_coarse=0)


class TestBackendSelection:
    def test_backend_name_valid(self):
        assert be.backend_name() in ("numba", "numpy")

    def test_env_forces_numpy(self):
        code = ("import pluripot._backend as b; print(b.backend_name())")
        out = subprocess.run([sys.executable, "-c", code],
                             env={**os.environ, "PLURIPOT_BACKEND": "numpy"},
                             capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "numpy"

    def test_env_rejects_garbage(self):
        code = "import pluripot._backend"
        out = subprocess.run([sys.executable, "-c", code],
                             env={**os.environ, "PLURIPOT_BACKEND": "sparkles"},
                             capture_output=True, text=True)
        assert out.returncode != 0
