"""Batch command-line front end: evaluate registry functions on points or
grids, run named verification suites, and emit machine-readable tables with a
run manifest.

Exit codes: 0 all requested work passed, 1 verification failure, 2 usage
error.  Every emitted data file carries the content hash of the manifest that
describes the run (the hash is computed over the manifest without its
wall-clock field, so reruns with the same config and seed are byte-identical
up to that field).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import backend_name
from .config import RunConfig, load_config
from .extremal import (lie_norm_many, lie_u_many, omega_extremal_many,
                       one_var_exact_many, v_ball_many, v_kq_many, weight_q_many)
from .metric_density import baran_delta_closed_many, ma_density_many
from .verify import SUITES, run_suites


class UsageError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------- registry

def _complex_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[1] % 2:
        raise UsageError("complex-domain functions need 2n reals per point (re/im interleaved)")
    return rows[:, 0::2] + 1j * rows[:, 1::2]


def _eval_vkq(rows, chart):
    return v_kq_many(_complex_rows(rows)), None


def _eval_vball(rows, chart):
    return v_ball_many(_complex_rows(rows)), None


def _eval_lieu(rows, chart):
    return lie_u_many(_complex_rows(rows)), None


def _eval_lienorm(rows, chart):
    return lie_norm_many(_complex_rows(rows)), None


def _eval_weightq(rows, chart):
    vals, singular = weight_q_many(_complex_rows(rows))
    return vals, np.where(singular, "singular", "")


def _eval_omega(rows, chart):
    return omega_extremal_many(chart, _complex_rows(rows)), None


def _eval_onevar(rows, chart):
    z = _complex_rows(rows)
    if z.shape[1] != 1:
        raise UsageError("oneVar is defined for n = 1 only")
    return one_var_exact_many(z[:, 0]), None


def _eval_madensity(rows, chart):
    return ma_density_many(rows), None


def _eval_barandelta(rows, chart):
    if rows.shape[1] % 2:
        raise UsageError("baranDelta points are x followed by y (2n reals)")
    n = rows.shape[1] // 2
    out = np.array([baran_delta_closed_many(rows[i, :n], rows[i, n:][None, :])[0]
                    for i in range(rows.shape[0])])
    return out, None


EVAL_REGISTRY = {
    "vKQ": (_eval_vkq, "complex"),
    "vBall": (_eval_vball, "complex"),
    "lieU": (_eval_lieu, "complex"),
    "lieNorm": (_eval_lienorm, "complex"),
    "weightQ": (_eval_weightq, "complex"),
    "omegaExtremal": (_eval_omega, "complex"),
    "oneVar": (_eval_onevar, "complex"),
    "maDensity": (_eval_madensity, "real"),
    "baranDelta": (_eval_barandelta, "real-pair"),
}


# ----------------------------------------------------------- point parsing

def _parse_point(text: str) -> list:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"malformed point {text!r}") from exc


def _parse_grid(spec: str) -> np.ndarray:
    """Axis specs 'name=lo:hi:count' joined by commas; row-major point order."""
    axes = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            name, rng = part.split("=")
            lo, hi, count = rng.split(":")
            axes.append((name.strip(), np.linspace(float(lo), float(hi), int(count))))
        except ValueError as exc:
            raise UsageError(f"malformed grid axis {part!r}") from exc
    if not axes:
        raise UsageError("empty grid spec")
    mesh = np.meshgrid(*[a for _, a in axes], indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def _load_points_file(path: str) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        for row in csv.reader(handle):
            if not row or row[0].lstrip().startswith("#"):
                continue
            rows.append([float(tok) for tok in row if tok.strip()])
    if not rows:
        raise UsageError(f"no points found in {path}")
    return np.asarray(rows)


# ----------------------------------------------------------- manifest/io

def _manifest(cfg: RunConfig, args_line: list, extra: dict) -> tuple[dict, str]:
    # jobs is pure scheduling; it must not perturb the content hash
    body = {
        "config": {k: v for k, v in cfg.as_dict().items() if k != "jobs"},
        "seed": cfg.seed,
        "tol_scale": cfg.tol_scale,
        "backend": backend_name(),
        "versions": {
            "pluripot": __version__,
            "numpy": np.__version__,
            "python": ".".join(map(str, sys.version_info[:3])),
        },
    }
    body.update(extra)
    # hash covers everything that determines the numbers; the command line
    # (it may carry output paths) and the wall clock are recorded unhashed
    digest = hashlib.sha256(
        json.dumps(body, sort_keys=True, default=str).encode()).hexdigest()[:16]
    body["manifest_hash"] = digest
    body["jobs"] = cfg.jobs
    body["command_line"] = "pluripot " + " ".join(args_line)
    body["wall_clock"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return body, digest


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, indent=1)
        handle.write("\n")


def _write_table(path: Path, header: list, rows, manifest_hash: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        writer.writerow(header + ["manifest"])
        for row in rows:
            writer.writerow(list(row) + [manifest_hash])


def _suite_payload(report) -> dict:
    return {
        "suite": report.suite,
        "passed": report.passed,
        "error": report.error,
        "checks": [
            {"name": c.name, "residual": c.residual, "tolerance": c.tolerance,
             "passed": c.passed, "detail": c.detail}
            for c in report.checks
        ],
    }


# ---------------------------------------------------------------- commands

def cmd_eval(args, cfg: RunConfig, argv: list) -> int:
    if args.fn not in EVAL_REGISTRY:
        raise UsageError(f"unknown function {args.fn!r}; known: {sorted(EVAL_REGISTRY)}")
    fn, domain = EVAL_REGISTRY[args.fn]
    if args.grid:
        rows = _parse_grid(args.grid)
    elif args.points_file:
        rows = _load_points_file(args.points_file)
    elif args.point:
        rows = np.asarray([_parse_point(p) for p in args.point])
    else:
        raise UsageError("eval needs --grid, --point or --points-file")
    if rows.ndim != 2 or not np.all(np.isfinite(rows)):
        raise UsageError("points must form a finite rectangular table")
    if cfg.n and args.n is not None:
        per_point = {"complex": 2 * cfg.n, "real-pair": 2 * cfg.n, "real": cfg.n}[domain]
        if rows.shape[1] != per_point:
            raise UsageError(f"--n {cfg.n} expects {per_point} reals per point "
                             f"for {args.fn}, got {rows.shape[1]}")

    values, flags = fn(rows, args.chart)
    if domain == "complex":
        n = rows.shape[1] // 2
        header = [f"{axis}{j}" for j in range(n) for axis in ("re", "im")]
    elif domain == "real-pair":
        n = rows.shape[1] // 2
        header = [f"x{j}" for j in range(n)] + [f"y{j}" for j in range(n)]
    else:
        header = [f"x{j}" for j in range(rows.shape[1])]
    header.append("value")
    header.append("flag")

    manifest, digest = _manifest(cfg, argv, {"command": "eval", "fn": args.fn,
                                             "rows": int(rows.shape[0])})
    flag_col = flags if flags is not None else np.full(rows.shape[0], "", dtype=object)
    out = Path(args.out) if args.out else Path(f"eval_{args.fn}.csv")
    if out.suffix == ".json":
        records = [
            {"point": [float(v) for v in rows[i]], "value": float(values[i]),
             "flag": str(flag_col[i]), "manifest": digest}
            for i in range(rows.shape[0])
        ]
        _write_json(out, records)
    else:
        table_rows = ([_fmt(v) for v in rows[i]] + [_fmt(values[i]), str(flag_col[i])]
                      for i in range(rows.shape[0]))
        _write_table(out, header, table_rows, digest)
    _write_json(out.with_suffix(out.suffix + ".manifest.json"), manifest)
    print(f"wrote {rows.shape[0]} rows to {out}")
    return 0


def cmd_verify(args, cfg: RunConfig, argv: list) -> int:
    requested = args.suite or ["all"]
    names = list(SUITES) if "all" in requested else requested
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; known: {list(SUITES)} + ['all']")
    reports = run_suites(names, cfg, jobs=cfg.jobs)
    all_passed = all(r.passed for r in reports)
    manifest, digest = _manifest(cfg, argv, {
        "command": "verify",
        "suites": {r.suite: r.passed for r in reports},
    })
    payload = {"manifest": digest, "suites": [_suite_payload(r) for r in reports]}
    out = Path(args.out) if args.out else Path("verify_report.json")
    _write_json(out, payload)
    _write_json(out.with_suffix(".manifest.json"), manifest)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        worst = max((c.residual / c.tolerance if c.tolerance else 0.0)
                    for c in r.checks) if r.checks else float("nan")
        print(f"{status} {r.suite:<14} checks={len(r.checks):2d} "
              f"wall={r.wall_seconds:7.2f}s" + (f" error={r.error}" if r.error else ""))
        if not r.passed:
            for c in r.checks:
                if not c.passed:
                    print(f"     FAIL {c.name}: residual={c.residual:.3e} "
                          f"tol={c.tolerance:.3e} {c.detail}")
    print(f"report: {out}")
    return 0 if all_passed else 1


def cmd_report(args, cfg: RunConfig, argv: list) -> int:
    out_dir = Path(args.out) if args.out else Path("pluripot_report")
    names = list(SUITES)
    reports = run_suites(names, cfg, jobs=cfg.jobs)
    manifest, digest = _manifest(cfg, argv, {
        "command": "report",
        "suites": {r.suite: r.passed for r in reports},
        "wall_seconds": {r.suite: round(r.wall_seconds, 3) for r in reports},
    })
    _write_json(out_dir / "manifest.json", manifest)
    for r in reports:
        _write_json(out_dir / "suites" / f"{r.suite}.json",
                    {"manifest": digest, **_suite_payload(r)})

    # plot-ready tables
    rs = np.linspace(0.0, 20.0, 2001)
    for n in (1, 2, 3):
        dens = ma_density_many(np.column_stack([rs] + [np.zeros_like(rs)] * (n - 1)))
        _write_table(out_dir / "plots" / f"density_profile_n{n}.csv",
                     ["r", "density"],
                     ([_fmt(r), _fmt(d)] for r, d in zip(rs, dens)), digest)

    from .envelope import product_family_lb
    from .extremal import v_kq
    z0 = np.array([0.5 + 0.5j, 0.3j])
    gap_rows = []
    for d in (1, 2, 3, 4, 5, 6):
        cert = product_family_lb(z0, d, budget=128,
                                 rng=np.random.Generator(np.random.Philox(key=cfg.seed)))
        gap_rows.append([str(d), _fmt(cert.lower_bound), _fmt(v_kq(z0)), _fmt(cert.gap)])
    _write_table(out_dir / "plots" / "envelope_gap_vs_degree.csv",
                 ["degree", "lower_bound", "closed_form", "gap"], gap_rows, digest)

    from .extremal import v_ball_many
    from .foliation import check_leaf, random_great_circle_leaf
    rng = cfg.rng_for(101)
    leaf_rows = []
    for i in range(12):
        m = 2 + (i % 4)
        rep = check_leaf(v_ball_many, random_great_circle_leaf(rng, m))
        leaf_rows.append([str(i), str(m), _fmt(rep.max_extremality_gap),
                          _fmt(rep.max_laplacian_residual)])
    _write_table(out_dir / "plots" / "leaf_gaps.csv",
                 ["leaf", "ambient_dim", "extremality_gap", "laplacian_residual"],
                 leaf_rows, digest)

    all_passed = all(r.passed for r in reports)
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.suite}")
    print(f"bundle: {out_dir}")
    return 0 if all_passed else 1


# ------------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="ambient dimension")
    common.add_argument("--config", default=None, metavar="FILE",
                        help="key = value config file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--tol-scale", type=float, default=None,
                        help="multiply every suite tolerance")
    common.add_argument("--mc-budget", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None,
                        help="concurrent suites (results joined deterministically)")
    common.add_argument("--out", default=None, metavar="PATH")

    parser = argparse.ArgumentParser(
        prog="pluripot",
        description="Weighted extremal functions of R^n: evaluation and verification.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common],
                        help="evaluate a registry function on points or a grid")
    ev.add_argument("--fn", required=True, help=f"one of {sorted(EVAL_REGISTRY)}")
    ev.add_argument("--grid", default=None,
                    help="axis specs, e.g. 're=-3:3:101,im=-3:3:101'")
    ev.add_argument("--point", action="append", default=None,
                    help="comma-separated reals (re/im interleaved for complex fns)")
    ev.add_argument("--points-file", default=None, metavar="CSV")
    ev.add_argument("--chart", choices=["affine", "infinity"], default="affine")

    vf = sub.add_parser("verify", parents=[common],
                        help="run named verification suites")
    vf.add_argument("--suite", action="append", default=None,
                    help=f"suite name or 'all'; known: {list(SUITES)}")

    sub.add_parser("report", parents=[common],
                   help="run every suite and emit a data bundle")
    return parser


def main(argv: list | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, overrides={
            "n": args.n, "seed": args.seed, "tol_scale": args.tol_scale,
            "mc_budget": args.mc_budget, "jobs": args.jobs,
        })
        if args.command == "eval":
            return cmd_eval(args, cfg, argv)
        if args.command == "verify":
            return cmd_verify(args, cfg, argv)
        if args.command == "report":
            return cmd_report(args, cfg, argv)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
