"""Numerics for the weighted pluripotential theory of R^n in C^n.

Closed-form evaluators for the weighted extremal function of R^n with the
log(1+x^2)/2 potential, its Lie-ball homogenization, real-ball extremal
functions and their foliation by complex ellipses, the Baran metric and
Monge-Ampere density they induce, polynomial-envelope lower bounds, and the
Alexander capacity of the real points of projective space -- together with a
verification harness that re-derives every identity by independent numerics.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .capacity import alexander_capacity, alexander_sup
from .core import (CPoint, HermitianForm, RVec, joukowski_inverse, quad_and_norm,
                   wirtinger_hessian_fd)
from .envelope import (EnvelopeCertificate, dehomogenize, homogenize,
                       linear_family_lb, product_family_lb)
from .extremal import (lie_member, lie_norm, lie_u, omega_extremal, one_var_exact,
                       v_ball, v_kq, weight_q)
from .foliation import LeafSpec, check_leaf, great_circle_leaf, leaf_point
from .ma_verify import homogeneous_kernel_check, kernel_check, maximality_check
from .metric_density import (baran_delta_closed, baran_delta_numeric,
                             ball_density_pipeline, dual_ball_volume, ma_density,
                             metric_tensor_at, total_mass)
from .sphere_lift import fullin_residual, lift_f, orthogonal_pushforward, semi_identity

__all__ = [
    "__version__", "backend_name",
    "CPoint", "RVec", "HermitianForm", "quad_and_norm", "joukowski_inverse",
    "wirtinger_hessian_fd",
    "weight_q", "v_kq", "v_ball", "lie_u", "lie_norm", "lie_member",
    "omega_extremal", "one_var_exact",
    "lift_f", "fullin_residual", "semi_identity", "orthogonal_pushforward",
    "LeafSpec", "leaf_point", "great_circle_leaf", "check_leaf",
    "kernel_check", "maximality_check", "homogeneous_kernel_check",
    "baran_delta_closed", "baran_delta_numeric", "metric_tensor_at",
    "dual_ball_volume", "ma_density", "total_mass", "ball_density_pipeline",
    "linear_family_lb", "product_family_lb", "homogenize", "dehomogenize",
    "EnvelopeCertificate",
    "alexander_sup", "alexander_capacity",
]
