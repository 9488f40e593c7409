"""Numeric kernel backend: numba-jitted hot loops with a pure-numpy fallback.

The two kernels here dominate the runtime of the verification suites:

* ``pqr_stats`` -- the row-wise reductions ``(sum x^2, sum y^2, sum x*y)``
  that every closed-form evaluator is built from,
* ``dual_membership_count`` -- the polar-dual membership test used by the
  Monte Carlo dual-ball volume estimator (a max of dot products against a
  direction set, with a two-stage coarse/fine early exit).

Backend selection is controlled by the environment variable
``PLURIPOT_BACKEND``:

    numba   require numba, fail loudly if it cannot be imported
    numpy   force the pure-numpy path
    auto    (default) use numba when importable, else fall back to numpy

Both implementations are importable directly (``_pqr_numpy`` etc.) so the
test suite and ``benchmarks/bench_backends.py`` can compare them.
"""

from __future__ import annotations

import os

import numpy as np

_CHUNK = 32768  # rows per block in the numpy fallback paths


# ---------------------------------------------------------------- numpy path

def _pqr_numpy(xr: np.ndarray, xi: np.ndarray):
    p = np.einsum("ij,ij->i", xr, xr)
    q = np.einsum("ij,ij->i", xi, xi)
    r = np.einsum("ij,ij->i", xr, xi)
    return p, q, r


def _dual_membership_numpy(samples: np.ndarray, w_coarse: np.ndarray,
                           w_rest: np.ndarray, lo: float) -> int:
    """Count samples xi with max_k xi.w_k <= 1 over the full direction set.

    ``w_coarse`` must be a subset of the full set; samples whose coarse max
    already exceeds 1 are rejected and samples below ``lo`` are accepted
    without touching ``w_rest``.
    """
    count = 0
    for start in range(0, samples.shape[0], _CHUNK):
        block = samples[start:start + _CHUNK]
        lmax = (block @ w_coarse.T).max(axis=1)
        inside = lmax <= lo
        shell = (~inside) & (lmax <= 1.0)
        if np.any(shell):
            if w_rest.shape[0] == 0:
                count += int(np.count_nonzero(shell))
            else:
                rest = (block[shell] @ w_rest.T).max(axis=1)
                count += int(np.count_nonzero(rest <= 1.0))
        count += int(np.count_nonzero(inside))
    return count


# ---------------------------------------------------------------- numba path

def _build_numba_kernels():
    from numba import njit, prange

    @njit(cache=True, parallel=True)
    def pqr_numba(xr, xi):  # pragma: no cover - exercised via dispatch
        m, n = xr.shape
        p = np.empty(m)
        q = np.empty(m)
        r = np.empty(m)
        for i in prange(m):
            sp = 0.0
            sq = 0.0
            sr = 0.0
            for j in range(n):
                a = xr[i, j]
                b = xi[i, j]
                sp += a * a
                sq += b * b
                sr += a * b
            p[i] = sp
            q[i] = sq
            r[i] = sr
        return p, q, r

    @njit(cache=True, parallel=True)
    def dual_membership_numba(samples, w_coarse, w_rest, lo):  # pragma: no cover
        m, n = samples.shape
        kc = w_coarse.shape[0]
        kr = w_rest.shape[0]
        count = 0
        for i in prange(m):
            lmax = -1.0e300
            for k in range(kc):
                s = 0.0
                for j in range(n):
                    s += samples[i, j] * w_coarse[k, j]
                if s > lmax:
                    lmax = s
            if lmax > 1.0:
                continue
            if lmax <= lo:
                count += 1
                continue
            ok = True
            for k in range(kr):
                s = 0.0
                for j in range(n):
                    s += samples[i, j] * w_rest[k, j]
                if s > 1.0:
                    ok = False
                    break
            if ok:
                count += 1
        return count

    return pqr_numba, dual_membership_numba


def _resolve_backend() -> str:
    requested = os.environ.get("PLURIPOT_BACKEND", "auto").strip().lower()
    if requested not in ("auto", "numba", "numpy"):
        raise ValueError(f"PLURIPOT_BACKEND must be auto|numba|numpy, got {requested!r}")
    if requested == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if requested == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _resolve_backend()

if BACKEND == "numba":
    pqr_stats, _dual_membership = _build_numba_kernels()
else:
    pqr_stats, _dual_membership = _pqr_numpy, _dual_membership_numpy


def backend_name() -> str:
    return BACKEND


def dual_membership_count(samples: np.ndarray, w_full: np.ndarray,
                          n_coarse: int, lo: float = 0.95) -> int:
    """Count samples inside the polar dual: max_k xi.w_k <= 1.

    The first ``n_coarse`` rows of ``w_full`` serve as the screening set;
    ``lo`` must not exceed ``1 - (coarse support deficit)`` so that early
    acceptance agrees with the full-set test.
    """
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    w_full = np.ascontiguousarray(w_full, dtype=np.float64)
    if not (0 < n_coarse <= w_full.shape[0]):
        raise ValueError("n_coarse out of range")
    return int(_dual_membership(samples, w_full[:n_coarse], w_full[n_coarse:], float(lo)))
