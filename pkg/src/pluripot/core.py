"""Complex-vector primitives, the inverse Joukowski map and finite-difference
mixed Wirtinger Hessians.

Everything downstream consumes points of C^n as numpy arrays; batch inputs
have shape ``(m, n)``.  Evaluators passed to :func:`wirtinger_hessian_fd` are
expected to accept such a batch and return an ``(m,)`` float array.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_HESSIAN_DIM = 16  # dense eigensolver guard; everything here is desk scale


class StencilSingularityError(ValueError):
    """An evaluator returned a non-finite value on a finite-difference node."""

    def __init__(self, node: np.ndarray):
        self.node = np.asarray(node)
        super().__init__(f"evaluator is singular at stencil node {self.node!r}")


@dataclass(frozen=True)
class CPoint:
    """A point of C^n with its cached hermitian square |z|^2 and complex square z^2."""

    coords: np.ndarray
    norm_sq: float
    quad_sum: complex

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def validate(self, rtol: float = 1e-13) -> None:
        z = self.coords
        norm_sq = float(np.sum(z.real**2 + z.imag**2))
        quad = complex(np.sum(z * z))
        scale = 1.0 + norm_sq
        if abs(norm_sq - self.norm_sq) > rtol * scale:
            raise AssertionError("cached |z|^2 disagrees with recomputation")
        if abs(quad - self.quad_sum) > rtol * scale:
            raise AssertionError("cached z^2 disagrees with recomputation")
        if abs(self.quad_sum) > self.norm_sq * (1.0 + rtol) + rtol:
            raise AssertionError("|z^2| <= |z|^2 violated")


@dataclass(frozen=True)
class RVec:
    """A point (or tangent vector) of R^n."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=np.float64)
        if c.ndim != 1 or not np.all(np.isfinite(c)):
            raise ValueError("RVec requires a finite 1-d real vector")
        object.__setattr__(self, "coords", c)


@dataclass
class HermitianForm:
    """A symmetrized complex Hessian with its spectrum report."""

    entries: np.ndarray
    eigenvalues: np.ndarray = field(init=False)
    hermitian_defect: float = field(init=False)

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=np.complex128)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("HermitianForm requires a square matrix")
        if h.shape[0] > MAX_HESSIAN_DIM:
            raise ValueError(f"matrix dimension {h.shape[0]} exceeds {MAX_HESSIAN_DIM}")
        self.hermitian_defect = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
        sym = 0.5 * (h + h.conj().T)
        self.entries = sym
        self.eigenvalues = np.linalg.eigvalsh(sym)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def determinant(self) -> float:
        return float(np.prod(self.eigenvalues))


def quad_and_norm(z) -> CPoint:
    """Cache |z|^2 and z^2 for a point of C^n."""
    arr = np.asarray(z, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise ValueError("expected a 1-d complex vector with n >= 1")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError("non-finite coordinates rejected")
    norm_sq = float(np.sum(arr.real**2 + arr.imag**2))
    quad = complex(np.sum(arr * arr))
    return CPoint(coords=arr, norm_sq=norm_sq, quad_sum=quad)


def joukowski_inverse(t: float) -> float:
    """Inverse of t = (h + 1/h)/2 on the branch h >= 1.

    The factored square root keeps full relative accuracy for t near 1.
    """
    t = float(t)
    if not np.isfinite(t) or t < 1.0:
        raise ValueError(f"joukowski_inverse requires t >= 1, got {t}")
    return t + np.sqrt(t - 1.0) * np.sqrt(t + 1.0)


def _as_point(z) -> np.ndarray:
    arr = np.asarray(z, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError("expected a single point of C^n")
    return arr


def _evaluate_nodes(f, nodes: np.ndarray, batched: bool) -> np.ndarray:
    if batched:
        vals = np.asarray(f(nodes), dtype=np.float64)
    else:
        vals = np.array([float(f(nodes[i])) for i in range(nodes.shape[0])])
    if vals.shape != (nodes.shape[0],):
        raise ValueError("evaluator must return one float per node")
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise StencilSingularityError(nodes[int(np.argmax(bad))])
    return vals


def _hessian_single_step(f, z: np.ndarray, h: float, batched: bool) -> np.ndarray:
    """Raw O(h^2) mixed Wirtinger Hessian d^2 f / dz_j dzbar_k.

    Real-coordinate identity: H = (D_xx + D_yy)/4 + i (D_xy - D_xy^T)/4 with
    centered second differences in the 2n real coordinates.  The mixed-partial
    stencils are symmetric in their two coordinates, so D_yx == D_xy^T exactly
    and the assembled matrix is hermitian by construction.
    """
    n = z.shape[0]
    nodes = [z]
    index = {}

    def push(dx_j, dx_k, dy_j, dy_k):
        # displacement entries: (axis kind, component, sign) pairs baked into one node
        node = z.copy()
        for comp, amt in dx_j + dx_k:
            node[comp] += amt
        for comp, amt in dy_j + dy_k:
            node[comp] += 1j * amt
        key = len(nodes)
        nodes.append(node)
        return key

    # D_xx / D_yy diagonal and off-diagonal, D_xy full
    ixx = np.empty((n, n, 4), dtype=np.int64)
    iyy = np.empty((n, n, 4), dtype=np.int64)
    ixy = np.empty((n, n, 4), dtype=np.int64)
    for j in range(n):
        for k in range(j, n):
            if j == k:
                a = push([(j, +h)], [], [], [])
                b = push([(j, -h)], [], [], [])
                ixx[j, j] = (a, a, b, b)  # (f+ - 2 f0 + f-) handled at reduce time
                a = push([], [], [(j, +h)], [])
                b = push([], [], [(j, -h)], [])
                iyy[j, j] = (a, a, b, b)
            else:
                pp = push([(j, +h)], [(k, +h)], [], [])
                pm = push([(j, +h)], [(k, -h)], [], [])
                mp = push([(j, -h)], [(k, +h)], [], [])
                mm = push([(j, -h)], [(k, -h)], [], [])
                ixx[j, k] = ixx[k, j] = (pp, pm, mp, mm)
                pp = push([], [], [(j, +h)], [(k, +h)])
                pm = push([], [], [(j, +h)], [(k, -h)])
                mp = push([], [], [(j, -h)], [(k, +h)])
                mm = push([], [], [(j, -h)], [(k, -h)])
                iyy[j, k] = iyy[k, j] = (pp, pm, mp, mm)
    for j in range(n):
        for k in range(n):
            pp = push([(j, +h)], [], [], [(k, +h)])
            pm = push([(j, +h)], [], [], [(k, -h)])
            mp = push([(j, -h)], [], [], [(k, +h)])
            mm = push([(j, -h)], [], [], [(k, -h)])
            ixy[j, k] = (pp, pm, mp, mm)

    vals = _evaluate_nodes(f, np.asarray(nodes), batched)
    f0 = vals[0]
    h2 = h * h

    def mixed(idx):
        return (vals[idx[..., 0]] - vals[idx[..., 1]] - vals[idx[..., 2]] + vals[idx[..., 3]]) / (4.0 * h2)

    d_xx = mixed(ixx)
    d_yy = mixed(iyy)
    for j in range(n):
        a, _, b, _ = ixx[j, j]
        d_xx[j, j] = (vals[a] - 2.0 * f0 + vals[b]) / h2
        a, _, b, _ = iyy[j, j]
        d_yy[j, j] = (vals[a] - 2.0 * f0 + vals[b]) / h2
    d_xy = mixed(ixy)
    return 0.25 * (d_xx + d_yy) + 0.25j * (d_xy - d_xy.T)


def wirtinger_hessian_fd(f, z, step: float = 1e-4, *, richardson: bool = False,
                         batched: bool = True) -> HermitianForm:
    """Finite-difference mixed Wirtinger Hessian of a real-valued f on C^n.

    With ``richardson=True`` the steps ``step`` and ``step/2`` are combined to
    cancel the O(step^2) truncation term.
    """
    zp = _as_point(z)
    if not (step > 0) or not np.isfinite(step):
        raise ValueError("step must be positive and finite")
    if zp.shape[0] > MAX_HESSIAN_DIM:
        raise ValueError(f"dimension {zp.shape[0]} exceeds {MAX_HESSIAN_DIM}")
    h_full = _hessian_single_step(f, zp, step, batched)
    if richardson:
        h_half = _hessian_single_step(f, zp, step / 2.0, batched)
        h_full = (4.0 * h_half - h_full) / 3.0
    return HermitianForm(entries=h_full)
