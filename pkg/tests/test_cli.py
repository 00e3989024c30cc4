import json
import math

import numpy as np
import pytest

from cycleflow.cli import main
from cycleflow.io import read_csv


def run(argv):
    return main([str(a) for a in argv])


QUICK_CFG = """\
[params]
alpha = 1.5
eps = 0.25

[sim]
n = 50
dt = 1e-3
t_end = 2
seed = 1
record_stride = 10

[init]
kind = gaussian_iid
mean_x = -0.2
mean_y = 0.4
var = 0.25

[snapshots]
times = 0, 2

[classify]
window = 1
"""


@pytest.fixture()
def quick_cfg(tmp_path):
    p = tmp_path / "quick.cfg"
    p.write_text(QUICK_CFG)
    return p


class TestCycleCommand:
    def test_verified_run(self, tmp_path):
        out = tmp_path / "cyc"
        assert run(["cycle", "--alpha", 10, "--out-dir", out]) == 0
        desc = json.loads((out / "cycle_alpha10.json").read_text())
        assert 4 * math.pi / 21 <= desc["period"] <= 4 * math.pi / 19
        assert desc["annulus_check"] is True
        assert desc["winding_number"] == 1
        manifest = json.loads((out / "manifest.json").read_text())
        assert str(out / "cycle_alpha10.csv") in manifest["outputs"]

    def test_alpha_below_one_is_config_error(self, tmp_path):
        assert run(["cycle", "--alpha", 0.5, "--out-dir", tmp_path / "x"]) == 1

    def test_nonconvergence_is_numerical_error(self, tmp_path):
        code = run(["cycle", "--alpha", 100, "--max-hits", 8,
                    "--out-dir", tmp_path / "y"])
        assert code == 2

    def test_reruns_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(["cycle", "--alpha", 2, "--out-dir", a]) == 0
        assert run(["cycle", "--alpha", 2, "--out-dir", b]) == 0
        assert (a / "cycle_alpha2.csv").read_bytes() == (b / "cycle_alpha2.csv").read_bytes()


class TestSimulateCommand:
    def test_quick_run_outputs(self, quick_cfg, tmp_path):
        out = tmp_path / "sim"
        assert run(["simulate", "--config", quick_cfg, "--out-dir", out]) == 0
        series = read_csv(out / "series.csv")
        assert list(series) == ["t", "mean_x", "mean_y", "var_x", "var_y",
                                "r2_mean", "m3_x", "m4_x", "m3_y", "m4_y"]
        assert series["t"][-1] == 2.0
        snap = read_csv(out / "snapshot_t2.csv")
        assert list(snap) == ["i", "x", "y"]
        assert len(snap["x"]) == 50
        det = read_csv(out / "deterministic.csv")
        assert np.array_equal(det["t"], series["t"])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["verdicts"]["classification"] in (
            "oscillating", "converged", "undecided")
        assert manifest["seed"] == 1
        for p in manifest["outputs"]:
            assert (out / p.split("/")[-1]).exists()

    def test_seed_override_changes_output(self, quick_cfg, tmp_path):
        out1, out2 = tmp_path / "s1", tmp_path / "s2"
        assert run(["simulate", "--config", quick_cfg, "--out-dir", out1]) == 0
        assert run(["simulate", "--config", quick_cfg, "--seed", 2,
                    "--out-dir", out2]) == 0
        a = read_csv(out1 / "series.csv")["mean_x"]
        b = read_csv(out2 / "series.csv")["mean_x"]
        assert not np.array_equal(a, b)

    def test_reruns_byte_identical(self, quick_cfg, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert run(["simulate", "--config", quick_cfg, "--out-dir", out1]) == 0
        assert run(["simulate", "--config", quick_cfg, "--out-dir", out2]) == 0
        assert (out1 / "series.csv").read_bytes() == (out2 / "series.csv").read_bytes()

    def test_missing_seed_field_errors(self, tmp_path, capsys):
        cfg = tmp_path / "noseed.cfg"
        cfg.write_text(QUICK_CFG.replace("seed = 1\n", ""))
        assert run(["simulate", "--config", cfg, "--out-dir", tmp_path / "o"]) == 1
        assert "seed" in capsys.readouterr().err

    def test_eps_above_one_errors(self, tmp_path, capsys):
        cfg = tmp_path / "hot.cfg"
        cfg.write_text(QUICK_CFG.replace("eps = 0.25", "eps = 1.5"))
        assert run(["simulate", "--config", cfg, "--out-dir", tmp_path / "o"]) == 1
        assert "eps" in capsys.readouterr().err


class TestCertifyCommand:
    def test_report_row_regardless_of_sign(self, tmp_path):
        out = tmp_path / "cert"
        assert run(["certify", "--alphas", "1", "--radial", 64,
                    "--angular", 256, "--out-dir", out]) == 0
        sweep = read_csv(out / "cert_sweep.csv")
        assert list(sweep) == ["alpha", "inf_value", "lipschitz_margin",
                               "positive", "estimated_c"]
        assert sweep["alpha"][0] == 1.0
        report = json.loads((out / "cert_alpha1.json").read_text())
        assert report["estimated_c"] > 0.0
        assert report["delta_used"] == 0.04

    def test_refine_keeps_positive_verdicts(self, tmp_path):
        out = tmp_path / "ref"
        assert run(["certify", "--alphas", "100", "--radial", 256,
                    "--angular", 1024, "--refine", "--out-dir", out]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["verdicts"]["refinement_consistent"] is True
        refined = read_csv(out / "cert_sweep_refined.csv")
        assert refined["positive"][0] == 1.0


class TestVerifyCommand:
    def test_small_tracking_run_passes(self, tmp_path):
        out = tmp_path / "v"
        code = run(["verify", "--alpha", 20, "--eps", 1e-3, "--n", 500,
                    "--seeds", 2, "--out-dir", out])
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["verdicts"]["passed"] is True
        assert manifest["verdicts"]["median_max_deviation"] <= 0.1
        rows = read_csv(out / "verify_seeds.csv")
        assert len(rows["seed"]) == 2

    def test_large_eps_fails_tracking(self, tmp_path):
        out = tmp_path / "vf"
        code = run(["verify", "--alpha", 1.5, "--eps", 0.5, "--n", 200,
                    "--seeds", 1, "--out-dir", out])
        assert code == 1
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["verdicts"]["median_max_deviation"] > 0.1

    def test_single_particle_flagged(self, tmp_path):
        out = tmp_path / "v1"
        run(["verify", "--alpha", 20, "--eps", 1e-3, "--n", 1,
             "--seeds", 1, "--out-dir", out])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["verdicts"]["high_variance_ensemble"] is True


class TestSweepCommand:
    def test_summary_csv(self, tmp_path):
        out = tmp_path / "sw"
        assert run(["sweep", "--alphas", "1,10", "--out-dir", out]) == 0
        cols = read_csv(out / "cycles_sweep.csv")
        assert list(cols["alpha"]) == [1.0, 10.0]
        assert all(cols["period_ok"]) and all(cols["annulus_ok"])


class TestHelp:
    @pytest.mark.parametrize("sub", ["cycle", "certify", "simulate", "verify", "sweep"])
    def test_help_documents_flags(self, sub, capsys):
        with pytest.raises(SystemExit) as exc:
            run([sub, "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        assert "--out-dir" in text
        if sub in ("cycle", "verify"):
            assert "dimensionless" in text
