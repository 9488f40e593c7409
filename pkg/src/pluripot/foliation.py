"""Extremal-ellipse leaves F(zeta) = a + c zeta + conj(c)/zeta.

Great-circle leaves of the real unit ball (a = 0, c = (u - iv)/2 for an
orthonormal pair u, v) complexify great circles of the boundary sphere; the
ball extremal function restricts to log|zeta| outside the closed unit disc
and is harmonic there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHONORMAL_TOL = 1e-12
DEFAULT_RADII = (1.1, 1.5, 2.0, 4.0, 10.0)
DEFAULT_ANGLES = 64
LAPLACE_STEP = 2.5e-4
LAPLACE_MIN_RADIUS = 1.05  # log^+ is not smooth across |zeta| = 1


@dataclass(frozen=True)
class LeafSpec:
    """Center a in R^m and direction c in C^m, c != 0."""

    a: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64).ravel()
        c = np.asarray(self.c, dtype=np.complex128).ravel()
        if a.shape != c.shape:
            raise ValueError("center and direction dimensions differ")
        if np.linalg.norm(c) == 0.0:
            raise ValueError("leaf direction c must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class LeafReport:
    max_extremality_gap: float
    max_laplacian_residual: float
    flagged_nodes: int = 0


def leaf_point(leaf: LeafSpec, zeta) -> np.ndarray:
    """a + c zeta + conj(c)/zeta; batch zeta gives rows of points."""
    zs = np.asarray(zeta, dtype=np.complex128)
    single = zs.ndim == 0
    zs = np.atleast_1d(zs)
    if np.any(zs == 0):
        raise ValueError("leaf parameter zeta = 0 rejected")
    pts = leaf.a[None, :] + np.outer(zs, leaf.c) + np.outer(1.0 / zs, np.conj(leaf.c))
    return pts[0] if single else pts


def great_circle_leaf(u, v) -> LeafSpec:
    """Leaf through the great circle u cos(theta) + v sin(theta)."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if abs(np.linalg.norm(u) - 1.0) > ORTHONORMAL_TOL or \
       abs(np.linalg.norm(v) - 1.0) > ORTHONORMAL_TOL or \
       abs(float(u @ v)) > ORTHONORMAL_TOL:
        raise ValueError("u, v must be orthonormal within 1e-12")
    # Gram-Schmidt cleanup to machine precision
    u = u / np.linalg.norm(u)
    v = v - (v @ u) * u
    nv = np.linalg.norm(v)
    if nv < 1e-8:
        raise ValueError("degenerate (parallel) direction pair")
    v = v / nv
    return LeafSpec(a=np.zeros_like(u), c=0.5 * (u - 1j * v))


def random_great_circle_leaf(rng: np.random.Generator, m: int) -> LeafSpec:
    mat = rng.normal(size=(m, 2))
    q, _ = np.linalg.qr(mat)
    return great_circle_leaf(q[:, 0], q[:, 1])


def check_leaf(evaluator, leaf: LeafSpec, radii=DEFAULT_RADII,
               n_angles: int = DEFAULT_ANGLES, fd_step: float = LAPLACE_STEP) -> LeafReport:
    """Extremality gap sup |V(F(zeta)) - log^+|zeta|| and FD Laplacian in zeta.

    The evaluator takes a batch (m, dim) of complex points.  The Laplacian is
    the 5-point stencil in the zeta plane, checked only at radii beyond
    LAPLACE_MIN_RADIUS where the restriction is smooth.
    """
    radii = np.asarray(radii, dtype=np.float64)
    angles = np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False)
    zetas = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()

    vals = np.asarray(evaluator(leaf_point(leaf, zetas)))
    flagged = int(np.count_nonzero(~np.isfinite(vals)))
    target = np.log(np.maximum(np.abs(zetas), 1.0))
    finite = np.isfinite(vals)
    gap = float(np.max(np.abs(vals[finite] - target[finite]))) if np.any(finite) else np.inf

    lap_zetas = zetas[np.abs(zetas) >= LAPLACE_MIN_RADIUS]
    if lap_zetas.size:
        h = fd_step
        stencil = np.concatenate([lap_zetas + h, lap_zetas - h,
                                  lap_zetas + 1j * h, lap_zetas - 1j * h, lap_zetas])
        sv = np.asarray(evaluator(leaf_point(leaf, stencil)))
        flagged += int(np.count_nonzero(~np.isfinite(sv)))
        k = lap_zetas.size
        lap = (sv[:k] + sv[k:2 * k] + sv[2 * k:3 * k] + sv[3 * k:4 * k] - 4.0 * sv[4 * k:]) / (h * h)
        lap_res = float(np.max(np.abs(lap[np.isfinite(lap)]))) if np.any(np.isfinite(lap)) else np.inf
    else:
        lap_res = 0.0
    return LeafReport(max_extremality_gap=gap, max_laplacian_residual=lap_res,
                      flagged_nodes=flagged)


__all__ = [
    "LeafSpec", "LeafReport", "leaf_point", "great_circle_leaf",
    "random_great_circle_leaf", "check_leaf", "DEFAULT_RADII",
]
