"""Closed-form extremal-function evaluators.

For z = x + iy in C^n every formula here reduces to the three row statistics
p = |x|^2, q = |y|^2, r = x.y:

    weight potential     Q(z)   = log|1 + z^2| / 2
    weighted extremal    VKQ(z) = log((1 + p + q) + 2 sqrt((1+p) q - r^2)) / 2
    real-ball extremal   VB(W)  = log h(|W|^2 + |W^2 - 1|) / 2
    log-homogeneous      U(Z)   = log((p + q) + 2 sqrt(p q - r^2)) / 2

The radicands are evaluated in the algebraically expanded forms above, which
are exact identities for (1+|z|^2)^2 - |1+z^2|^2 and |Z|^4 - |Z^2|^2; they are
nonnegative by Cauchy-Schwarz and vanish exactly on the real points, so the
cancellation-prone difference of squares never appears.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import pqr_stats
from .core import joukowski_inverse

# relative scale for flagging |1+z^2| ~ 0 as singular
EPS_SING = 1e-15
# radicand more negative than -EPS_RADICAND*(1+|z|^2)^2 is an arithmetic fault
EPS_RADICAND = 1e-12
# Lie-ball membership slack
EPS_MEMBER = 1e-12

LOG2_HALF = 0.5 * np.log(2.0)


@dataclass(frozen=True)
class EvalResult:
    """Total evaluation: singular points carry -inf rather than faulting."""

    value: float
    singular: bool = False


def _as_batch(z):
    arr = np.asarray(z, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
        return arr, True
    if arr.ndim == 1:
        return arr.reshape(1, -1), True
    if arr.ndim == 2:
        return arr, False
    raise ValueError("expected a point (n,) or batch (m, n) of complex coordinates")


def _pqr(arr):
    xr = np.ascontiguousarray(arr.real)
    xi = np.ascontiguousarray(arr.imag)
    return pqr_stats(xr, xi)


def _radicand_weighted(p, q, r):
    """(1+|z|^2)^2 - |1+z^2|^2 = 4[(1+p) q - r^2], clamped at zero."""
    rad = 4.0 * ((1.0 + p) * q - r * r)
    floor = -EPS_RADICAND * (1.0 + p + q) ** 2
    if np.any(rad < floor):
        raise FloatingPointError("weighted radicand went negative beyond tolerance")
    return np.maximum(rad, 0.0)


def _radicand_homogeneous(p, q, r):
    """|Z|^4 - |Z^2|^2 = 4[p q - r^2], clamped at zero."""
    rad = 4.0 * (p * q - r * r)
    floor = -EPS_RADICAND * (p + q) ** 2
    if np.any(rad < floor):
        raise FloatingPointError("homogeneous radicand went negative beyond tolerance")
    return np.maximum(rad, 0.0)


# ------------------------------------------------------------------ weight Q

def weight_q_many(z):
    """Values of log|1+z^2|/2 with a mask flagging the singular locus 1+z^2=0."""
    arr, _ = _as_batch(z)
    p, q, r = _pqr(arr)
    # |1+z^2| = hypot(1 + p - q, 2r) for z = x+iy
    mod = np.hypot(1.0 + p - q, 2.0 * r)
    singular = mod < EPS_SING * (1.0 + p + q)
    with np.errstate(divide="ignore"):
        vals = 0.5 * np.log(mod)
    vals[singular] = -np.inf
    return vals, singular


def weight_q(z) -> EvalResult:
    vals, singular = weight_q_many(z)
    return EvalResult(value=float(vals[0]), singular=bool(singular[0]))


# ------------------------------------------------------- weighted extremal V

def v_kq_many(z):
    arr, _ = _as_batch(z)
    p, q, r = _pqr(arr)
    rad = _radicand_weighted(p, q, r)
    return 0.5 * np.log1p(p + q + np.sqrt(rad))


def v_kq(z) -> float:
    return float(v_kq_many(z)[0])


# ------------------------------------------------------------- ball extremal

# Points within this margin of the ball (in the Joukowski argument) evaluate
# to exactly 0.  The argument carries O(eps)-level cancellation noise which
# the square root would amplify to ~1e-8; the margin absorbs it, at the price
# of flattening a collar where the true value is below ~2e-7 anyway.
EPS_ON_BALL = 256.0 * np.finfo(float).eps


def v_ball_many(w):
    """Extremal function of the real unit ball of R^m at points of C^m."""
    arr, _ = _as_batch(w)
    p, q, r = _pqr(arr)
    # |W^2 - 1| for W = u+iv: W^2 = (p - q) + 2ir
    t = (p + q) + np.hypot(p - q - 1.0, 2.0 * r)
    t = np.maximum(t, 1.0)
    on_ball = t - 1.0 <= EPS_ON_BALL
    vals = 0.5 * np.log(t + np.sqrt(t - 1.0) * np.sqrt(t + 1.0))
    vals[on_ball] = 0.0
    return vals


def v_ball(w) -> float:
    return float(v_ball_many(w)[0])


# ---------------------------------------------------------- Lie ball objects

def lie_u_many(z):
    arr, _ = _as_batch(z)
    p, q, r = _pqr(arr)
    if np.any(p + q == 0.0):
        raise ValueError("lie_u is undefined at Z = 0")
    rad = _radicand_homogeneous(p, q, r)
    return 0.5 * np.log(p + q + np.sqrt(rad))


def lie_u(z) -> float:
    return float(lie_u_many(z)[0])


def lie_norm_many(z):
    arr, _ = _as_batch(z)
    p, q, r = _pqr(arr)
    rad = _radicand_homogeneous(p, q, r)
    return np.sqrt(p + q + np.sqrt(rad))


def lie_norm(z) -> float:
    return float(lie_norm_many(z)[0])


def lie_member(z, eps: float = EPS_MEMBER) -> bool:
    return bool(lie_norm(z) <= 1.0 + eps)


# ------------------------------------------------- projective chart extremal

def omega_extremal_many(chart: str, z):
    """The omega-psh extremal function of the real points of P^n, per chart.

    affine   : value at [1:z],  log(1 + sqrt(1 - |1+z^2|^2/(1+|z|^2)^2)) / 2
    infinity : value at [0:z],  log(1 + sqrt(1 - |z^2|^2/|z|^4)) / 2
    """
    arr, _ = _as_batch(z)
    p, q, r = _pqr(arr)
    if chart == "affine":
        rad = _radicand_weighted(p, q, r)
        return 0.5 * np.log1p(np.sqrt(rad) / (1.0 + p + q))
    if chart == "infinity":
        if np.any(p + q == 0.0):
            raise ValueError("infinity chart requires z != 0")
        rad = _radicand_homogeneous(p, q, r)
        return 0.5 * np.log1p(np.sqrt(rad) / (p + q))
    raise ValueError(f"chart must be 'affine' or 'infinity', got {chart!r}")


def omega_extremal(chart: str, z) -> float:
    return float(omega_extremal_many(chart, z)[0])


# ------------------------------------------------------------ n = 1 exact VKQ

def one_var_exact(z: complex) -> float:
    """max(log|z - i|, log|z + i|), the one-variable weighted extremal function."""
    zc = complex(z)
    with np.errstate(divide="ignore"):
        return float(max(np.log(abs(zc - 1j)), np.log(abs(zc + 1j))))


def one_var_exact_many(z):
    arr = np.asarray(z, dtype=np.complex128).ravel()
    with np.errstate(divide="ignore"):
        return np.maximum(np.log(np.abs(arr - 1j)), np.log(np.abs(arr + 1j)))


__all__ = [
    "EvalResult", "weight_q", "weight_q_many", "v_kq", "v_kq_many",
    "v_ball", "v_ball_many", "lie_u", "lie_u_many", "lie_norm",
    "lie_norm_many", "lie_member", "omega_extremal", "omega_extremal_many",
    "one_var_exact", "one_var_exact_many", "LOG2_HALF",
]
