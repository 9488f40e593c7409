"""Hessian kernel identities and maximality of the weighted extremal function.

Off R^n the candidate u has H_u(z)(z - conj z) = 0, hence det H_u(z) = 0 and
(dd^c u)^n vanishes; the homogenized U on C^{n+1} annihilates both Z and
conj(Z).  These are finite-difference checks with O(step^2) contracts; the
tolerance checks default to Richardson-extrapolated Hessians while the
convergence-order diagnostics use the raw step and step/2 matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import HermitianForm, wirtinger_hessian_fd
from .extremal import lie_norm, lie_u_many, v_kq_many

STANDOFF_FACTOR = 10.0


@dataclass(frozen=True)
class MaxReport:
    kernel_residual: float
    det_value: float
    min_eigenvalue: float


def _check_standoff(z: np.ndarray, step: float) -> None:
    # The candidate is smooth everywhere off R^n (its radicand only vanishes
    # there), so the real points are the only excluded stencil region; the
    # zero set of 1 + z^2 is singular for the weight but not for the FD target.
    y_norm = float(np.linalg.norm(z.imag))
    if y_norm < STANDOFF_FACTOR * step:
        raise ValueError(
            f"||Im z|| = {y_norm:.3e} closer than {STANDOFF_FACTOR}*step to R^n")


def _normalized_det(form: HermitianForm) -> float:
    """|det H| divided by the product of the n-1 largest |eigenvalues|.

    For a matrix with a near-null direction this is just the smallest
    |eigenvalue|, which scales uniformly across |z| regimes; for n = 1 it is
    the single entry, i.e. the FD Laplacian / 4.
    """
    eigs = np.abs(form.eigenvalues)
    order = np.sort(eigs)
    top = order[1:]
    denom = float(np.prod(top)) if top.size else 1.0
    if denom == 0.0:
        return float(order[0])
    return float(np.prod(order)) / denom


def _kernel_residual(form: HermitianForm, vec: np.ndarray) -> float:
    nv = float(np.linalg.norm(vec))
    if nv == 0.0:
        raise ValueError("kernel direction is zero")
    return float(np.linalg.norm(form.entries @ vec)) / nv


def kernel_check(z, step: float = 1e-3, *, richardson: bool = True) -> MaxReport:
    """Residual ||H_u(z)(z - conj z)|| / ||z - conj z|| for u = V_{K,Q}."""
    zp = np.asarray(z, dtype=np.complex128).ravel()
    _check_standoff(zp, step)
    form = wirtinger_hessian_fd(v_kq_many, zp, step, richardson=richardson)
    return MaxReport(
        kernel_residual=_kernel_residual(form, zp - np.conj(zp)),
        det_value=_normalized_det(form),
        min_eigenvalue=float(form.eigenvalues[0]),
    )


def maximality_check(z, step: float = 1e-3, *, richardson: bool = True) -> MaxReport:
    """Normalized |det| and spectrum floor of the FD Hessian of V_{K,Q}."""
    return kernel_check(z, step, richardson=richardson)


def homogeneous_kernel_check(z_hom, step: float = 1e-3, *,
                             richardson: bool = True) -> MaxReport:
    """Residuals ||H_U(Z) Z|| and ||H_U(Z) conj(Z)|| for the homogenized U.

    kernel_residual carries the larger of the two (both are O(step^2)).
    Z must sit outside the closed Lie ball by the stand-off margin.
    """
    zp = np.asarray(z_hom, dtype=np.complex128).ravel()
    if lie_norm(zp) < 1.0 + STANDOFF_FACTOR * step:
        raise ValueError("Z inside or too close to the closed Lie ball")
    form = wirtinger_hessian_fd(lie_u_many, zp, step, richardson=richardson)
    res_z = float(np.linalg.norm(form.entries @ zp))
    res_zbar = float(np.linalg.norm(form.entries @ np.conj(zp)))
    return MaxReport(
        kernel_residual=max(res_z, res_zbar),
        det_value=_normalized_det(form),
        min_eigenvalue=float(form.eigenvalues[0]),
    )


def hessian_conjugate_gap(z, step: float = 2e-3) -> float:
    """max |H_u(conj z) - H_u(z)| entrywise, Richardson-extrapolated.

    The candidate's Hessian is real symmetric, so conjugating the point
    leaves it unchanged up to FD noise.
    """
    zp = np.asarray(z, dtype=np.complex128).ravel()
    h_at = wirtinger_hessian_fd(v_kq_many, zp, step, richardson=True).entries
    h_conj = wirtinger_hessian_fd(v_kq_many, np.conj(zp), step, richardson=True).entries
    return float(np.max(np.abs(h_conj - h_at)))


def sample_off_real(rng: np.random.Generator, n: int, count: int,
                    y_range=(0.2, 5.0), x_radius: float = 3.0) -> np.ndarray:
    """Points with ||Im z|| log-uniform in y_range; n = 1 draws avoid Re z = 0."""
    x = rng.uniform(-x_radius, x_radius, size=(count, n))
    direction = rng.normal(size=(count, n))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = np.exp(rng.uniform(np.log(y_range[0]), np.log(y_range[1]), size=(count, 1)))
    z = x + 1j * direction * radius
    if n == 1:
        # guard band around the imaginary axis (see ledger: the n=1 switching
        # set of the max formula is R itself, so this is belt-and-braces)
        off = np.abs(z.real) < 0.05
        z.real[off] = np.sign(z.real[off] + 0.5) * 0.05
    return z


__all__ = [
    "MaxReport", "kernel_check", "maximality_check", "homogeneous_kernel_check",
    "hessian_conjugate_gap", "sample_off_real",
]
