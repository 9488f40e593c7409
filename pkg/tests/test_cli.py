from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from pluripot.cli import main
from pluripot.config import RunConfig, load_config, parse_config_file


def _read_csv(path: Path):
    with path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    return rows[0], rows[1:]


class TestConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.strip_s == 0.9
        assert cfg.mc_budget == 1_000_000

    def test_file_env_flag_precedence(self, tmp_path, monkeypatch):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("seed = 1\nn = 3  # comment\n")
        monkeypatch.setenv("PLURIPOT_SEED", "2")
        cfg = load_config(str(cfg_file), overrides={"seed": 3})
        assert cfg.seed == 3
        assert cfg.n == 3
        monkeypatch.delenv("PLURIPOT_SEED")
        cfg = load_config(str(cfg_file))
        assert cfg.seed == 1

    def test_env_override_every_key(self, monkeypatch):
        for key, raw, expect in (("n", "5", 5), ("strip_s", "0.5", 0.5),
                                 ("fd_step", "1e-4", 1e-4), ("mc_budget", "10", 10),
                                 ("seed", "7", 7), ("tol_scale", "2.0", 2.0),
                                 ("jobs", "1", 1)):
            monkeypatch.setenv(f"PLURIPOT_{key.upper()}", raw)
            assert getattr(load_config(), key) == expect
            monkeypatch.delenv(f"PLURIPOT_{key.upper()}")

    def test_unknown_key_rejected(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("sneaky = 1\n")
        with pytest.raises(KeyError):
            parse_config_file(str(bad))

    def test_substreams_reproducible(self):
        cfg = RunConfig(seed=42)
        a = cfg.rng_for(3).normal(size=5)
        b = cfg.rng_for(3).normal(size=5)
        c = cfg.rng_for(4).normal(size=5)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestEval:
    def test_point_value(self, tmp_path, capsys):
        out = tmp_path / "vkq.csv"
        assert main(["eval", "--fn", "vKQ", "--point", "0,2", "--out", str(out)]) == 0
        header, rows = _read_csv(out)
        assert header == ["re0", "im0", "value", "flag", "manifest"]
        assert float(rows[0][2]) == pytest.approx(math.log(3), rel=1e-15)
        manifest = json.loads(out.with_suffix(".csv.manifest.json").read_text())
        assert rows[0][4] == manifest["manifest_hash"]

    def test_grid_row_count_and_order(self, tmp_path):
        out = tmp_path / "grid.csv"
        assert main(["eval", "--fn", "vKQ", "--grid", "re=-3:3:101,im=-3:3:101",
                     "--out", str(out)]) == 0
        header, rows = _read_csv(out)
        assert len(rows) == 101 * 101
        # row-major: first axis varies slowest
        assert float(rows[0][0]) == -3.0 and float(rows[0][1]) == -3.0
        assert float(rows[1][0]) == -3.0 and float(rows[1][1]) != -3.0

    def test_density_profile_monotone(self, tmp_path):
        out = tmp_path / "dens.csv"
        assert main(["eval", "--fn", "maDensity", "--grid", "x=0:5:51",
                     "--out", str(out)]) == 0
        _, rows = _read_csv(out)
        vals = [float(r[1]) for r in rows]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_weightq_flags_singular(self, tmp_path):
        out = tmp_path / "wq.csv"
        assert main(["eval", "--fn", "weightQ", "--point", "0,1", "--out", str(out)]) == 0
        _, rows = _read_csv(out)
        assert rows[0][3] == "singular"
        assert rows[0][2] == "-inf"

    def test_json_output(self, tmp_path):
        out = tmp_path / "vals.json"
        assert main(["eval", "--fn", "vBall", "--point", "2,0", "--out", str(out)]) == 0
        records = json.loads(out.read_text())
        assert records[0]["value"] == pytest.approx(math.log(2 + math.sqrt(3)))

    def test_barandelta_points(self, tmp_path):
        out = tmp_path / "bd.csv"
        assert main(["eval", "--fn", "baranDelta", "--point", "1,0,0,1",
                     "--out", str(out)]) == 0
        _, rows = _read_csv(out)
        assert float(rows[0][4]) == pytest.approx(math.sqrt(2) / 2, rel=1e-12)

    def test_points_file(self, tmp_path):
        pts = tmp_path / "pts.csv"
        pts.write_text("0,1\n0,2\n")
        out = tmp_path / "o.csv"
        assert main(["eval", "--fn", "vKQ", "--points-file", str(pts),
                     "--out", str(out)]) == 0
        _, rows = _read_csv(out)
        assert len(rows) == 2

    def test_unknown_function_usage_error(self, tmp_path, capsys):
        assert main(["eval", "--fn", "nope", "--point", "1,0"]) == 2

    def test_malformed_grid_usage_error(self):
        assert main(["eval", "--fn", "vKQ", "--grid", "re=oops"]) == 2

    def test_missing_points_usage_error(self):
        assert main(["eval", "--fn", "vKQ"]) == 2

    def test_dimension_flag_validates(self, tmp_path):
        out = tmp_path / "o.csv"
        assert main(["eval", "--fn", "vKQ", "--point", "0,2", "--n", "1",
                     "--out", str(out)]) == 0
        assert main(["eval", "--fn", "vKQ", "--point", "0,2", "--n", "2"]) == 2

    def test_determinism_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["eval", "--fn", "vKQ", "--grid", "re=-1:1:11,im=-1:1:11", "--seed", "5"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestVerifyCommand:
    def test_single_suite_pass(self, tmp_path):
        out = tmp_path / "rep.json"
        assert main(["verify", "--suite", "onevar", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["suites"][0]["suite"] == "onevar"
        assert payload["suites"][0]["passed"] is True
        check = payload["suites"][0]["checks"][0]
        assert set(check) == {"name", "residual", "tolerance", "passed", "detail"}

    def test_unknown_suite_usage_error(self):
        assert main(["verify", "--suite", "nonsense"]) == 2

    def test_failure_exit_code_and_partial_report(self, tmp_path):
        out = tmp_path / "rep.json"
        # shrinking every tolerance far below fp noise forces failures
        code = main(["verify", "--suite", "onevar", "--suite", "mass",
                     "--tol-scale", "1e-20", "--out", str(out)])
        assert code == 1
        payload = json.loads(out.read_text())
        assert len(payload["suites"]) == 2  # report still written for both

    def test_deterministic_json(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            assert main(["verify", "--suite", "ballpipeline", "--seed", "9",
                         "--out", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_jobs_do_not_change_results(self, tmp_path):
        # per-suite substreams make results independent of scheduling
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        base = ["verify", "--suite", "onevar", "--suite", "mass",
                "--suite", "ballpipeline", "--seed", "4"]
        assert main(base + ["--jobs", "1", "--out", str(a)]) == 0
        assert main(base + ["--jobs", "3", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle") / "report"
    code = main(["report", "--mc-budget", "50000", "--seed", "11",
                 "--out", str(out)])
    return code, out


class TestReportCommand:

    def test_exit_code(self, bundle):
        code, _ = bundle
        assert code == 0

    def test_file_inventory(self, bundle):
        _, out = bundle
        assert (out / "manifest.json").exists()
        suite_files = sorted((out / "suites").glob("*.json"))
        assert len(suite_files) >= 12
        plots = sorted((out / "plots").glob("*.csv"))
        assert len(plots) >= 3

    def test_manifest_hash_referenced(self, bundle):
        _, out = bundle
        manifest = json.loads((out / "manifest.json").read_text())
        digest = manifest["manifest_hash"]
        suite = json.loads((out / "suites" / "onevar.json").read_text())
        assert suite["manifest"] == digest
        with (out / "plots" / "density_profile_n2.csv").open(newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[1][-1] == digest

    def test_density_profile_integrates(self, bundle):
        _, out = bundle
        with (out / "plots" / "density_profile_n2.csv").open(newline="") as handle:
            rows = list(csv.reader(handle))[1:]
        r = np.array([float(x[0]) for x in rows])
        dens = np.array([float(x[1]) for x in rows])
        # 2 pi r lambda(r) over [0, R] plus the analytic tail 4 pi / sqrt(1+R^2)
        integrand = 2 * math.pi * r * dens
        body = float(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(r)))
        tail = 4 * math.pi / math.sqrt(1 + r[-1] ** 2)
        assert abs(body + tail - 4 * math.pi) / (4 * math.pi) < 0.01

    def test_every_number_finite_or_flagged(self, bundle):
        _, out = bundle
        for path in (out / "plots").glob("*.csv"):
            with path.open(newline="") as handle:
                rows = list(csv.reader(handle))[1:]
            for row in rows:
                for tok in row[:-1]:
                    try:
                        val = float(tok)
                    except ValueError:
                        continue  # labels and flags
                    assert math.isfinite(val)
