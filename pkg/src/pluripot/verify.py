"""Named verification suites.

Each suite re-derives one block of identities from scratch (independent
oracles, finite differences, Monte Carlo, quadrature) and reports residuals
against pinned tolerances.  The acceptance test module runs exactly these
suites; the CLI exposes them as `pluripot verify --suite <name>`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import capacity as cap
from . import envelope as env
from . import foliation as fo
from . import ma_verify as mv
from . import metric_density as md
from . import sphere_lift as sl
from .config import RunConfig
from .extremal import (LOG2_HALF, lie_norm_many, lie_u_many, one_var_exact_many,
                       omega_extremal_many, v_ball_many, v_kq_many, weight_q_many)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    error: str | None = None
    wall_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)


def _check(name: str, residual: float, tolerance: float, *, lower: bool = False,
           detail: str = "") -> CheckResult:
    """lower=False: pass iff residual <= tolerance; lower=True: residual >= tolerance."""
    ok = residual >= tolerance if lower else residual <= tolerance
    return CheckResult(name=name, residual=float(residual), tolerance=float(tolerance),
                       passed=bool(ok), detail=detail)


# ------------------------------------------------------------------- suites

def suite_onevar(cfg: RunConfig, rng) -> list:
    re, im = np.meshgrid(np.linspace(-3.0, 3.0, 201), np.linspace(-3.0, 3.0, 201))
    zs = (re + 1j * im).reshape(-1, 1)
    err = float(np.max(np.abs(v_kq_many(zs) - one_var_exact_many(zs[:, 0]))))
    return [_check("vkq_equals_two_point_max_201x201", err, 1e-12 * cfg.tol_scale)]


def suite_fullin(cfg: RunConfig, rng) -> list:
    checks = []
    for n in (1, 2, 3, 4):
        zs = sl.sample_strip(rng, n, 10_000, s=cfg.strip_s)
        res = sl.fullin_residual_many(zs, s=cfg.strip_s)
        checks.append(_check(f"lift_consistency_n{n}", float(np.max(res)),
                             1e-9 * cfg.tol_scale))
        # one-sided inequality of the upper-bound proposition
        w = sl.lift_many(zs, s=cfg.strip_s)
        qv, _ = weight_q_many(zs)
        excess = float(np.max(v_kq_many(zs) - qv - v_ball_many(w)))
        checks.append(_check(f"upper_bound_direction_n{n}", excess, 1e-9 * cfg.tol_scale))
    return checks


def suite_semi(cfg: RunConfig, rng) -> list:
    checks = []
    for n in (2, 3):
        zs = sl.sample_strip(rng, n, 1000, s=cfg.strip_s)
        w = sl.lift_many(zs, s=cfg.strip_s)
        checks.append(_check(f"hemisphere_projection_n{n}",
                             float(np.max(sl.semi_identity_many(w))),
                             1e-11 * cfg.tol_scale))
        flipped = w.copy()
        flipped[:, 0] = -flipped[:, 0]
        sign_gap = float(np.max(np.abs(v_ball_many(w) - v_ball_many(flipped))))
        checks.append(_check(f"sign_symmetry_n{n}", sign_gap, 1e-12 * cfg.tol_scale))
        qv, _ = weight_q_many(zs)
        need = float(np.max(np.abs(-np.log(np.abs(w[:, 0])) - qv)))
        checks.append(_check(f"weight_matches_lift_w0_n{n}", need, 1e-12 * cfg.tol_scale))
    return checks


def suite_leaves(cfg: RunConfig, rng) -> list:
    radii = (1.0, 1.1, 1.5, 2.0, 4.0, 10.0)
    worst_gap = 0.0
    worst_lap = 0.0
    for i in range(20):
        m = 2 + (i % 4)  # spheres in R^2 .. R^5
        leaf = fo.random_great_circle_leaf(rng, m)
        rep = fo.check_leaf(v_ball_many, leaf, radii=radii)
        worst_gap = max(worst_gap, rep.max_extremality_gap)
        worst_lap = max(worst_lap, rep.max_laplacian_residual)
    return [
        _check("leaf_restriction_is_log_abs", worst_gap, 1e-9 * cfg.tol_scale),
        _check("leaf_harmonicity_fd_laplacian", worst_lap, 1e-6 * cfg.tol_scale),
    ]


def _hessian_sweep(cfg: RunConfig, rng, count_per_dim: int = 500):
    """Shared sweep for the kernel and maximality suites."""
    out = []
    step = cfg.fd_step
    for n in (2, 3):
        zs = mv.sample_off_real(rng, n, count_per_dim)
        for i in range(zs.shape[0]):
            rich = mv.kernel_check(zs[i], step, richardson=True)
            plain = mv.kernel_check(zs[i], step, richardson=False)
            half = mv.kernel_check(zs[i], step / 2.0, richardson=False)
            out.append((n, rich, plain, half))
    return out


def _ratio_median(numer, denom, floor: float = 1e-8) -> float:
    pairs = [(a, b) for a, b in zip(numer, denom) if b > floor]
    if len(pairs) < max(8, len(numer) // 4):
        return float("nan")
    return float(np.median([a / b for a, b in pairs]))


def suite_kernel(cfg: RunConfig, rng) -> list:
    sweep = _hessian_sweep(cfg, rng)
    worst = max(r.kernel_residual for _, r, _, _ in sweep)
    ratio = _ratio_median([p.kernel_residual for _, _, p, _ in sweep],
                          [h.kernel_residual for _, _, _, h in sweep])
    checks = [
        _check("kernel_annihilates_imaginary_direction", worst, 1e-4 * cfg.tol_scale),
        _check("kernel_residual_order_ratio_low", ratio, 3.5, lower=True),
        _check("kernel_residual_order_ratio_high", ratio, 4.5),
    ]
    # homogenized function: H_U Z = H_U conj(Z) = 0 outside the Lie ball
    worst_h = mv.homogeneous_kernel_check(np.array([2.0, 0.0, 0.0], dtype=complex),
                                          cfg.fd_step).kernel_residual
    for n in (2, 3):
        raw = rng.normal(size=(250, n + 1)) + 1j * rng.normal(size=(250, n + 1))
        scale = np.exp(rng.uniform(np.log(1.5), np.log(10.0), size=250))
        raw *= (scale / lie_norm_many(raw))[:, None]
        for i in range(raw.shape[0]):
            worst_h = max(worst_h, mv.homogeneous_kernel_check(raw[i], cfg.fd_step).kernel_residual)
    checks.append(_check("homogeneous_kernel_residual", worst_h, 1e-4 * cfg.tol_scale))
    # logarithmic homogeneity of U and conjugation symmetry of the Hessian
    zs = rng.normal(size=(100, 4)) + 1j * rng.normal(size=(100, 4))
    lam = 3.0
    hom = float(np.max(np.abs(lie_u_many(lam * zs) - lie_u_many(zs) - math.log(lam))))
    checks.append(_check("log_homogeneity_of_lift", hom, 1e-12 * cfg.tol_scale))
    conj_gap = max(mv.hessian_conjugate_gap(z) for z in mv.sample_off_real(rng, 2, 25))
    conj_gap = max(conj_gap, max(mv.hessian_conjugate_gap(z) for z in mv.sample_off_real(rng, 3, 25)))
    checks.append(_check("hessian_conjugation_symmetry", conj_gap, 1e-8 * cfg.tol_scale))
    return checks


def suite_maximality(cfg: RunConfig, rng) -> list:
    sweep = _hessian_sweep(cfg, rng)
    worst_det = max(abs(r.det_value) for _, r, _, _ in sweep)
    worst_eig = min(r.min_eigenvalue for _, r, _, _ in sweep)
    ratio = _ratio_median([abs(p.det_value) for _, _, p, _ in sweep],
                          [abs(h.det_value) for _, _, _, h in sweep])
    return [
        _check("normalized_determinant_vanishes", worst_det, 1e-4 * cfg.tol_scale),
        _check("spectrum_stays_psd", worst_eig, -1e-6 * cfg.tol_scale, lower=True),
        _check("determinant_order_ratio_low", ratio, 3.5, lower=True),
        _check("determinant_order_ratio_high", ratio, 4.5),
    ]


def suite_metric(cfg: RunConfig, rng) -> list:
    worst_rel = 0.0
    converged = True
    for n in (1, 2, 3, 4, 5):
        for _ in range(100):
            x = rng.uniform(-2.0, 2.0, size=n)
            y = rng.normal(size=n)
            est = md.baran_delta_numeric(v_kq_many, x, y)
            converged = converged and est.converged
            closed = md.baran_delta_closed(x, y)
            worst_rel = max(worst_rel, abs(est.value - closed) / closed)
    checks = [
        _check("baran_delta_numeric_vs_closed", worst_rel, 1e-6 * cfg.tol_scale,
               detail="" if converged else "extrapolation diagnostics exceeded"),
    ]
    spec_err = 0.0
    quad_err = 0.0
    for n in (1, 2, 3, 4, 5):
        for _ in range(40):
            x = rng.uniform(-3.0, 3.0, size=n)
            mt = md.metric_tensor_at(x)  # raises if the spectrum drifts
            s = 1.0 + float(x @ x)
            expected = np.concatenate([[s**-2], np.full(n - 1, 1.0 / s)])
            spec_err = max(spec_err, float(np.max(np.abs(mt.eigenvalues - expected) / expected)))
            y = rng.normal(size=n)
            lhs = md.baran_delta_closed(x, y) ** 2
            rhs = float(y @ mt.g @ y)
            quad_err = max(quad_err, abs(lhs - rhs) / max(rhs, 1e-300))
    checks.append(_check("metric_spectrum_closed_form", spec_err, 1e-12 * cfg.tol_scale))
    checks.append(_check("delta_squared_is_quadratic_form", quad_err, 1e-12 * cfg.tol_scale))
    # norm axioms of delta in y
    hom_err = 0.0
    tri_worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 6))
        x = rng.uniform(-2.0, 2.0, size=n)
        y1, y2 = rng.normal(size=n), rng.normal(size=n)
        lam = float(rng.uniform(-3.0, 3.0))
        d1 = md.baran_delta_closed(x, y1)
        hom_err = max(hom_err, abs(md.baran_delta_closed(x, lam * y1) - abs(lam) * d1))
        tri_worst = max(tri_worst, md.baran_delta_closed(x, y1 + y2)
                        - d1 - md.baran_delta_closed(x, y2))
    checks.append(_check("delta_absolute_homogeneity", hom_err, 1e-12 * cfg.tol_scale))
    checks.append(_check("delta_triangle_inequality", tri_worst, 1e-12 * cfg.tol_scale))
    return checks


def suite_density(cfg: RunConfig, rng) -> list:
    checks = []
    ident_err = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 7))
        x = rng.uniform(-4.0, 4.0, size=n)
        sample = md.ma_density(x)
        root = math.sqrt(md.metric_tensor_at(x).det_g)
        ident_err = max(ident_err, abs(sample.lam - md.factorial(n) * root)
                        / (md.factorial(n) * root))
        if sample.busemann != sample.holmes_thompson:
            ident_err = float("inf")
    checks.append(_check("density_equals_factorial_root_det", ident_err,
                         1e-12 * cfg.tol_scale))
    rs = np.linspace(0.0, 5.0, 64)
    prof = md.ma_density_many(np.column_stack([rs, np.zeros(64)]))
    mono = float(np.max(np.diff(prof)))
    checks.append(_check("radial_profile_monotone_decreasing", mono, 0.0))

    # Monte Carlo polar-dual volumes against sqrt(det G), Lebesgue convention
    budget = int(cfg.mc_budget)
    worst_z = 0.0
    prod_worst_z = 0.0
    cases = [(2, rng.uniform(-2.0, 2.0, size=2)) for _ in range(14)]
    cases += [(3, rng.uniform(-1.2, 1.2, size=3)) for _ in range(6)]
    for idx, (n, x) in enumerate(cases):
        mt = md.metric_tensor_at(x)
        norm_fn = (lambda xv: lambda ys: md.baran_delta_closed_many(xv, ys))(x)
        fine = 4096 if n == 2 else 16384
        coarse = 512 if n == 2 else 1024
        est = md.dual_ball_volume_mc(norm_fn, n, rng=rng, n_samples=budget,
                                     n_coarse=coarse, n_fine=fine)
        closed = md.dual_ball_volume_closed(mt, "lebesgue")
        worst_z = max(worst_z, abs(est.volume - closed) / est.std_error)
        if idx % 5 == 0:
            primal = md.primal_ball_volume_mc(norm_fn, n, rng=rng, n_samples=budget)
            product = primal.volume * est.volume
            target = md.unit_ball_volume(n) ** 2
            se = product * math.sqrt((primal.std_error / primal.volume) ** 2
                                     + (est.std_error / est.volume) ** 2)
            prod_worst_z = max(prod_worst_z, abs(product - target) / se)
    checks.append(_check("dual_volume_mc_within_3_sigma", worst_z, 3.0))
    checks.append(_check("volume_product_identity_within_3_sigma", prod_worst_z, 3.0))
    return checks


def suite_mass(cfg: RunConfig, rng) -> list:
    checks = []
    for n in (1, 2, 3):
        q = md.total_mass(n)
        expected = md.total_mass_expected(n)
        rel = abs(q.value - expected) / expected
        checks.append(_check(f"total_mass_n{n}", rel, 1e-6 * cfg.tol_scale,
                             detail="" if q.converged else "quadrature budget exhausted"))
    return checks


def suite_ballpipeline(cfg: RunConfig, rng) -> list:
    checks = []
    for x in (np.zeros(2), np.array([0.5, 0.0]), np.array([0.3, 0.4])):
        est = md.ball_density_pipeline(x, rng=rng, n_samples=200_000)
        expected = md.ball_density_expected(x)
        rel = abs(est.lam - expected) / expected
        label = "0" if not np.any(x) else "_".join(f"{v:g}" for v in x)
        checks.append(_check(f"ball_density_at_{label}", rel, 0.02 * cfg.tol_scale,
                             detail="" if est.delta_converged else "delta extrapolation flagged"))
    return checks


def suite_envelope(cfg: RunConfig, rng) -> list:
    checks = []
    n = 3
    zs = rng.uniform(-3.0, 3.0, (100_000, n)) + 1j * rng.uniform(-3.0, 3.0, (100_000, n))
    dirs = rng.normal(size=(100_000, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    vals = np.log(np.abs(1.0 - 1j * np.einsum("ij,ij->i", dirs, zs)))
    excess = float(np.max(vals - v_kq_many(zs)))
    checks.append(_check("factor_soundness_100k", excess, 1e-9 * cfg.tol_scale))
    worst_gap = 0.0
    cert_excess = -np.inf
    for _ in range(100):
        dim = int(rng.integers(1, 5))
        y = rng.normal(size=dim) * rng.uniform(0.2, 3.0)
        cert = env.linear_family_lb(1j * y, rng=rng)
        worst_gap = max(worst_gap, abs(cert.gap))
        z = rng.uniform(-2.0, 2.0, size=dim) + 1j * rng.uniform(-2.0, 2.0, size=dim)
        cert2 = env.linear_family_lb(z, rng=rng)
        cert_excess = max(cert_excess, -cert2.gap)
    checks.append(_check("imaginary_axis_tightness", worst_gap, 1e-10 * cfg.tol_scale))
    checks.append(_check("certificate_soundness", cert_excess, 1e-9 * cfg.tol_scale))
    z0 = np.array([0.5 + 0.5j, 0.3j])
    prev = -np.inf
    mono_ok = True
    for d in (1, 2, 3, 4):
        cert = env.product_family_lb(z0, d, budget=128,
                                     rng=np.random.Generator(np.random.Philox(key=cfg.seed)))
        mono_ok = mono_ok and cert.lower_bound >= prev - 1e-12
        prev = cert.lower_bound
    checks.append(_check("product_family_monotone", 0.0 if mono_ok else 1.0, 0.5))
    p = env.MultiPoly(2, {(0, 0): 1.0, (1, 0): -1j, (0, 1): 0.5})
    strip = sl.sample_strip(rng, 2, 500, s=cfg.strip_s)
    checks.append(_check("homogenization_lift_identity",
                         env.lift_identity_residual(p, 2, strip), 1e-12 * cfg.tol_scale))
    round_trip = env.dehomogenize(env.homogenize(p, 3)).coeffs == p.coeffs
    checks.append(_check("dehomogenize_roundtrip", 0.0 if round_trip else 1.0, 0.5))
    return checks


def suite_capacity(cfg: RunConfig, rng) -> list:
    checks = []
    sups = []
    for n in range(1, 7):
        result = cap.alexander_sup(n, seed=cfg.seed)
        sups.append(result.sup_value)
        checks.append(_check(f"sup_value_n{n}", abs(result.sup_value - LOG2_HALF),
                             1e-8 * cfg.tol_scale,
                             detail="" if result.converged else "optimizer stagnated"))
        checks.append(_check(f"capacity_n{n}", abs(result.capacity - 2.0**-0.5),
                             1e-8 * cfg.tol_scale))
    spread = float(np.max(sups) - np.min(sups))
    checks.append(_check("capacity_n_independence", spread, 1e-10 * cfg.tol_scale))
    # pointwise bound on both charts
    n = 3
    zs = rng.uniform(-5.0, 5.0, (100_000, n)) + 1j * rng.uniform(-5.0, 5.0, (100_000, n))
    worst = float(np.max(omega_extremal_many("affine", zs)))
    worst = max(worst, float(np.max(omega_extremal_many("infinity", zs))))
    checks.append(_check("pointwise_bound_half_log_2", worst, LOG2_HALF + 1e-12))
    return checks


def suite_propbaran(cfg: RunConfig, rng) -> list:
    rep = md.prop_baran_conditions(rng, n=2)
    return [
        _check("weight_pluriharmonic_off_variety", rep.claim1_max_laplacian,
               1e-6 * cfg.tol_scale),
        _check("candidate_dominates_weight", rep.claim2_min_gap,
               -1e-12 * cfg.tol_scale, lower=True),
        _check("equality_on_reals", rep.claim2_real_max_gap, 1e-12 * cfg.tol_scale),
        _check("weight_increment_exponent_low", rep.claim3_exponent_min, 1.9, lower=True),
        _check("weight_increment_exponent_high", rep.claim3_exponent_max, 2.1),
    ]


SUITES = {
    "onevar": suite_onevar,
    "fullin": suite_fullin,
    "semi": suite_semi,
    "leaves": suite_leaves,
    "kernel": suite_kernel,
    "maximality": suite_maximality,
    "metric": suite_metric,
    "density": suite_density,
    "mass": suite_mass,
    "ballpipeline": suite_ballpipeline,
    "envelope": suite_envelope,
    "capacity": suite_capacity,
    "propbaran": suite_propbaran,
}


def run_suite(name: str, cfg: RunConfig) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    index = list(SUITES).index(name)
    rng = cfg.rng_for(index)
    report = SuiteReport(suite=name)
    start = time.perf_counter()
    try:
        report.checks = SUITES[name](cfg, rng)
    except Exception as exc:  # partial reports must survive a failing suite
        report.error = f"{type(exc).__name__}: {exc}"
    report.wall_seconds = time.perf_counter() - start
    return report


def run_suites(names, cfg: RunConfig, jobs: int = 1) -> list:
    names = list(names)
    if jobs <= 1 or len(names) <= 1:
        return [run_suite(name, cfg) for name in names]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {name: pool.submit(run_suite, name, cfg) for name in names}
    return [futures[name].result() for name in names]


__all__ = ["CheckResult", "SuiteReport", "SUITES", "run_suite", "run_suites"]
