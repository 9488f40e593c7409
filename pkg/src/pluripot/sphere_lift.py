"""Lift of C^n into the complexified sphere W_0^2 + ... + W_n^2 = 1.

The lift F(z) = (f(z), z f(z)) with f = (1+z^2)^(-1/2) (principal branch) is
defined on the strip ||Im z|| < s < 1, where Re(1+z^2) > 0 keeps the square
root away from its cut.  On the sphere the ball extremal function collapses
to log h(|W|^2)/2, which ties it to the weighted extremal function of R^n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extremal import v_ball, v_ball_many, v_kq_many, weight_q_many

DEFAULT_STRIP = 0.9
TOL_VARIETY = 1e-10
BRANCH_GUARD = 1e-6


class UnliftablePointError(ValueError):
    """1 + z^2 is too close to the branch cut of the principal square root."""


@dataclass(frozen=True)
class StripPoint:
    """A point of the strip ||Im z|| < s."""

    z: np.ndarray
    strip_norm: float
    s: float = DEFAULT_STRIP

    @staticmethod
    def of(z, s: float = DEFAULT_STRIP) -> "StripPoint":
        arr = np.asarray(z, dtype=np.complex128).ravel()
        norm = float(np.linalg.norm(arr.imag))
        if not norm < s:
            raise ValueError(f"||Im z|| = {norm} is not inside the strip s = {s}")
        return StripPoint(z=arr, strip_norm=norm, s=s)


@dataclass(frozen=True)
class SpherePoint:
    """A point of the complexified sphere, with its variety defect |W.W - 1|."""

    w: np.ndarray
    defect: float

    @staticmethod
    def of(w, tol: float = TOL_VARIETY) -> "SpherePoint":
        arr = np.asarray(w, dtype=np.complex128).ravel()
        defect = float(abs(np.sum(arr * arr) - 1.0))
        if defect >= tol:
            raise ValueError(f"variety defect {defect:.3e} exceeds {tol:.1e}")
        return SpherePoint(w=arr, defect=defect)

    @property
    def w0(self) -> complex:
        return complex(self.w[0])

    @property
    def w_rest(self) -> np.ndarray:
        return self.w[1:]


def lift_many(z, s: float = DEFAULT_STRIP) -> np.ndarray:
    """Batched lift: rows of z (m, n) map to rows (m, n+1) on the sphere."""
    arr = np.asarray(z, dtype=np.complex128)
    single = arr.ndim == 1
    if single:
        arr = arr.reshape(1, -1)
    norms = np.linalg.norm(arr.imag, axis=1)
    if np.any(norms >= s):
        raise ValueError("point outside the strip ||Im z|| < s")
    c = 1.0 + np.sum(arr * arr, axis=1)
    if np.any(np.pi - np.abs(np.angle(c)) < BRANCH_GUARD) or np.any(c == 0):
        raise UnliftablePointError("1 + z^2 within the branch-cut guard band")
    f = 1.0 / np.sqrt(c)
    w = np.concatenate([f[:, None], arr * f[:, None]], axis=1)
    return w[0] if single else w


def lift_f(z, s: float = DEFAULT_STRIP) -> SpherePoint:
    w = lift_many(z, s)
    return SpherePoint.of(w, tol=1e-12)


def lift_norm_sq(z, s: float = DEFAULT_STRIP) -> float:
    """|F(z)|^2 = (1 + |z|^2)/|1 + z^2| on the strip."""
    arr = np.asarray(z, dtype=np.complex128).ravel()
    if np.linalg.norm(arr.imag) >= s:
        raise ValueError("point outside the strip ||Im z|| < s")
    c = 1.0 + complex(np.sum(arr * arr))
    if np.pi - abs(np.angle(c)) < BRANCH_GUARD or c == 0:
        raise UnliftablePointError("1 + z^2 within the branch-cut guard band")
    return float((1.0 + np.sum(np.abs(arr) ** 2)) / abs(c))


def fullin_residual_many(z, s: float = DEFAULT_STRIP) -> np.ndarray:
    """| V_ball(F(z)) - (V_{K,Q}(z) - Q(z)) | over strip points."""
    arr = np.asarray(z, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    w = lift_many(arr, s)
    lhs = v_ball_many(w)
    q_vals, singular = weight_q_many(arr)
    if np.any(singular):
        raise UnliftablePointError("weight potential singular on the strip sample")
    rhs = v_kq_many(arr) - q_vals
    return np.abs(lhs - rhs)


def fullin_residual(z, s: float = DEFAULT_STRIP) -> float:
    return float(fullin_residual_many(z, s)[0])


def semi_identity(w) -> float:
    """| V_ball at W in C^{n+1} - V_ball at W' in C^n | for W on the sphere.

    On the variety |W'^2 - 1| = |W_0|^2 and |W'|^2 + |W_0|^2 = |W|^2, so both
    Joukowski arguments agree and the residual is pure floating-point noise.
    """
    sp = w if isinstance(w, SpherePoint) else SpherePoint.of(w)
    return float(abs(v_ball(sp.w) - v_ball(sp.w_rest)))


def semi_identity_many(w_batch) -> np.ndarray:
    arr = np.asarray(w_batch, dtype=np.complex128)
    defects = np.abs(np.sum(arr * arr, axis=1) - 1.0)
    if np.any(defects >= TOL_VARIETY):
        raise ValueError("batch contains points off the variety")
    return np.abs(v_ball_many(arr) - v_ball_many(arr[:, 1:]))


def orthogonal_pushforward(t_mat, w) -> SpherePoint:
    """Apply a real orthogonal map T(u + iv) = T(u) + i T(v) to a sphere point."""
    t = np.asarray(t_mat, dtype=np.float64)
    sp = w if isinstance(w, SpherePoint) else SpherePoint.of(w)
    if t.shape != (sp.w.shape[0], sp.w.shape[0]):
        raise ValueError("orthogonal map dimension mismatch")
    if np.max(np.abs(t.T @ t - np.eye(t.shape[0]))) > 1e-12:
        raise ValueError("matrix is not orthogonal within 1e-12")
    moved = t @ sp.w.real + 1j * (t @ sp.w.imag)
    return SpherePoint.of(moved, tol=10.0 * TOL_VARIETY)


def sample_strip(rng: np.random.Generator, n: int, count: int,
                 s: float = DEFAULT_STRIP, x_radius: float = 3.0) -> np.ndarray:
    """Seeded strip sample: Re z uniform in a box, Im z uniform in the s-ball.

    ||Im z|| is floored at 1e-4 s: both sides of the lift identities vanish
    as Im z -> 0 but pick up sqrt-of-cancellation noise there, so the collar
    carries no information and would only add fp spikes.
    """
    x = rng.uniform(-x_radius, x_radius, size=(count, n))
    direction = rng.normal(size=(count, n))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = s * 0.999 * rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / n)
    radius = np.maximum(radius, 1e-4 * s)
    return x + 1j * direction * radius


__all__ = [
    "StripPoint", "SpherePoint", "UnliftablePointError", "lift_f", "lift_many",
    "lift_norm_sq", "fullin_residual", "fullin_residual_many", "semi_identity",
    "semi_identity_many", "orthogonal_pushforward", "sample_strip",
    "DEFAULT_STRIP", "TOL_VARIETY",
]
