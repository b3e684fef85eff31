import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "reedsim", *map(str, args)], capture_output=True, text=True, cwd=cwd)


def write_config(tmp_path, name="cfg.json", **cfg):
    base = {"g": 1.0, "omega": 4.0, "h": 0.2, "V0": 0.0, "drive": {"type": "cosine"}}
    base.update(cfg)
    p = tmp_path / name
    p.write_text(json.dumps(base))
    return p


class TestAsymptotic:
    def test_defaults_shape(self, tmp_path):
        cfg = write_config(tmp_path)
        r = run("asymptotic", "--config", cfg, "--out", tmp_path)
        assert r.returncode == 0, r.stderr
        rows = np.loadtxt(tmp_path / "modes.csv", delimiter=",", skiprows=1)
        assert rows.shape == (9 * 33, 5)
        report = json.loads((tmp_path / "residual.json").read_text())
        assert report["pass"] and report["residual"] <= report["threshold"]
        manifest = json.loads((tmp_path / "asymptotic.manifest.json").read_text())
        assert manifest["subcommand"] == "asymptotic" and manifest["exit_code"] == 0

    def test_oracle(self, tmp_path):
        cfg = write_config(tmp_path)
        r = run("asymptotic", "--config", cfg, "--out", tmp_path, "--oracle", "--xi", "0.1,0.4", "--modes", "2")
        assert r.returncode == 0, r.stderr
        assert (tmp_path / "modes_oracle.csv").exists()
        assert "max |series - oracle|" in r.stdout
        assert np.loadtxt(tmp_path / "modes.csv", delimiter=",", skiprows=1).shape == (10, 5)

    def test_series_divergence(self, tmp_path):
        cfg = write_config(tmp_path, h=4.0)
        assert run("asymptotic", "--config", cfg, "--out", tmp_path).returncode == 4

    def test_unsupported_regime(self, tmp_path):
        cfg = write_config(tmp_path, omega=1.9)
        assert run("asymptotic", "--config", cfg, "--out", tmp_path).returncode == 3

    def test_bad_config(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"g": 1}')
        assert run("asymptotic", "--config", p, "--out", tmp_path).returncode == 2

    def test_invalid_drive(self, tmp_path):
        cfg = write_config(tmp_path, drive={"type": "coeffs", "sigma": 1.0, "C0": 0.1, "coeffs": [[1, 0.5, 0.0]]})
        assert run("asymptotic", "--config", cfg, "--out", tmp_path).returncode == 2


class TestEvolve:
    def test_golden(self, tmp_path):
        r = run("evolve", "--config", DATA / "resonant.json", "--out", tmp_path, "--xi", "0.3", "--t-end", "5", "--dt", "0.01")
        assert r.returncode == 0, r.stderr
        assert (tmp_path / "evolve.csv").read_text() == (DATA / "golden_evolve_xi0.3.csv").read_text()

    def test_trivial_field(self, tmp_path):
        cfg = write_config(tmp_path, h=0.0)
        assert run("evolve", "--config", cfg, "--out", tmp_path, "--t-end", "2", "--dt", "0.01").returncode == 0
        rows = np.loadtxt(tmp_path / "evolve.csv", delimiter=",", skiprows=1)
        assert np.all(rows[:, 1] == 1) and np.all(rows[:, 2] == 0)

    def test_self_convergence(self, tmp_path):
        cfg = write_config(tmp_path, h=0.1)
        r = run("evolve", "--config", cfg, "--out", tmp_path, "--xi", "0.3", "--t-end", "5", "--dt", "0.02", "--self-convergence")
        assert r.returncode == 0, r.stderr
        rep = json.loads((tmp_path / "self_convergence.json").read_text())
        assert 3 <= rep["richardson_ratio"] <= 5

    def test_step_too_large(self, tmp_path):
        cfg = write_config(tmp_path, h=4.0)
        assert run("evolve", "--config", cfg, "--out", tmp_path, "--t-end", "2", "--dt", "0.2").returncode == 5

    def test_window(self, tmp_path):
        cfg = write_config(tmp_path, h=0.1)
        r = run("evolve", "--config", cfg, "--out", tmp_path, "--t-end", "20", "--dt", "0.01", "--window", "5")
        assert r.returncode == 0, r.stderr

    def test_manifest_reproduces(self, tmp_path):
        cfg = write_config(tmp_path, h=0.1)
        a, b = tmp_path / "a", tmp_path / "b"
        run("evolve", "--config", cfg, "--out", a, "--xi", "0.2", "--t-end", "3", "--dt", "0.01")
        manifest = json.loads((a / "evolve.manifest.json").read_text())
        # rebuild the run from the manifest alone: embedded config plus recorded arguments
        replay = tmp_path / "replay.json"
        replay.write_text(json.dumps(manifest["config"]))
        args = manifest["arguments"]
        r = run("evolve", "--config", replay, "--out", b, "--xi", args["xi"], "--t0", args["t0"], "--t-end", args["t_end"], "--dt", args["dt"])
        assert r.returncode == manifest["exit_code"] == 0
        assert (a / "evolve.csv").read_bytes() == (b / "evolve.csv").read_bytes()


class TestConverge:
    def test_synthetic(self, tmp_path):
        cfg = write_config(tmp_path, h=0.1)
        r = run("converge", "--config", cfg, "--out", tmp_path, "--synthetic")
        assert r.returncode == 0, r.stderr
        summary = json.loads((tmp_path / "converge.json").read_text())
        (entry,) = summary.values()
        assert entry["slope"] == pytest.approx(-0.5, abs=1e-9)
        assert entry["bound_constant"] > 0

    def test_out_of_band_slope(self, tmp_path):
        # the static-field bound state keeps the envelope from decaying at all
        cfg = write_config(tmp_path, h=0.0, V0=0.5)
        r = run("converge", "--config", cfg, "--out", tmp_path, "--xi", "0.0", "--t0", "18,16,14,12,10", "--t-end", "20", "--dt", "0.01")
        assert r.returncode == 6


class TestIntegrals:
    def test_tfj0(self):
        out = json.loads(run("integrals", "tfj0", "--tau", "2").stdout)
        assert out["closed"][0] == 0 and out["closed"][1] == pytest.approx(0.57735, abs=1e-5)

    def test_consistency(self):
        out = json.loads(run("integrals", "consistency", "--tau", "0.5", "--a", "50").stdout)
        assert out["discrepancy"] <= 1e-6

    def test_hfj(self):
        out = json.loads(run("integrals", "hfj", "--tau", "2").stdout)
        assert out["closed"] == pytest.approx((2 / np.pi) ** 0.5 / 3**0.5, rel=1e-12)

    @pytest.mark.parametrize("which", ["finite", "tail", "fresnel", "sqrt", "bessel"])
    def test_others_emit_json(self, which):
        r = run("integrals", which, "--tau", "0.3", "--a", "20", "--x", "2.5", "--k", "1")
        assert r.returncode == 0, r.stderr
        assert json.loads(r.stdout)["identity"] == which

    def test_band_edge(self):
        assert run("integrals", "tfj0", "--tau", "1").returncode == 2


class TestReconstruct:
    def test_outputs(self, tmp_path):
        cfg = write_config(tmp_path)
        r = run("reconstruct", "--config", cfg, "--out", tmp_path, "--xi", "0.3", "--site-offset", "2", "--t-end", "2", "--dt", "0.01")
        assert r.returncode == 0, r.stderr
        site = np.loadtxt(tmp_path / "site+2.csv", delimiter=",", skiprows=1)
        assert site.shape == (201, 4)
        assert (tmp_path / "impurity.csv").exists()


def test_version():
    r = run("--version")
    assert r.returncode == 0 and "reedsim" in r.stdout
