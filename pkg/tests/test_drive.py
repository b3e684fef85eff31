import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reedsim.drive import DriveSpec, RegimeTag, classify, default_mode_cutoff, evaluate_drive, validate
from reedsim.errors import ConfigError


def test_cosine_factory_is_valid():
    spec = DriveSpec.cosine(1.0, 4.0, 0.1)
    assert validate(spec) == []
    assert spec.coefficients == {1: 0.5, -1: 0.5}


def test_cosine_with_unit_prefactor_violates_decay():
    spec = DriveSpec(1.0, 4.0, coefficients={1: 0.5, -1: 0.5}, sigma=1.0, C0=1.0)
    problems = validate(spec)
    assert problems and all("exceeds" in p for p in problems)


def test_realness_violation():
    spec = DriveSpec(1.0, 4.0, coefficients={1: 1.0, -1: 0.0}, sigma=0.1, C0=2.0)
    assert any("realness" in p for p in validate(spec))


def test_missing_partner_is_a_realness_violation():
    spec = DriveSpec(1.0, 4.0, coefficients={2: 0.1}, sigma=0.1, C0=2.0)
    assert any("realness" in p for p in validate(spec))


def test_decay_rate_violation():
    spec = DriveSpec(1.0, 4.0, coefficients={}, sigma=0.0)
    assert any(p.startswith("sigma") for p in validate(spec))


def test_zero_mode_rejected():
    spec = DriveSpec(1.0, 4.0, coefficients={0: 0.2, 1: 0.1, -1: 0.1})
    assert any("zero mode" in p for p in validate(spec))


def test_nonpositive_g_and_omega():
    problems = validate(DriveSpec(0.0, -1.0))
    assert any(p.startswith("g") for p in problems)
    assert any(p.startswith("omega") for p in problems)


class TestClassify:
    def test_resonant(self):
        r = classify(DriveSpec.cosine(1.0, 4.0), 0.1)
        assert r.tag is RegimeTag.MODERATELY_RESONANT and r.epsilon == 0.1

    @pytest.mark.parametrize("omega", [0.3, 1.0, 4.0, 50.0])
    def test_nondegenerate(self, omega):
        assert classify(DriveSpec.cosine(1.0, omega, V0=0.5)).tag is RegimeTag.NON_DEGENERATE

    def test_unsupported(self):
        assert classify(DriveSpec.cosine(1.0, 1.9)).tag is RegimeTag.UNSUPPORTED

    def test_floor(self):
        assert classify(DriveSpec.cosine(1.0, 4.0, V0=1e-13)).tag is RegimeTag.MODERATELY_RESONANT

    @given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.01, 100))
    def test_scale_invariance(self, g, omega, c):
        a = classify(DriveSpec.cosine(g, omega, 0.1))
        b = classify(DriveSpec.cosine(c * g, c * omega, 0.1 * c))
        # alpha is scale invariant up to rounding; skip knife-edge cases
        if abs(g / omega - 0.4) > 1e-9:
            assert a.tag == b.tag


class TestEvaluate:
    def test_cosine_values(self):
        spec = DriveSpec.cosine(1.0, 4.0)
        assert evaluate_drive(spec, 0.0) == pytest.approx(1.0, abs=1e-15)
        assert abs(evaluate_drive(spec, math.pi / 2)) < 1e-15

    @given(st.floats(-50, 50))
    def test_periodic(self, phi):
        spec = DriveSpec.from_positive_modes(1, 4, 0.1, 0, {1: 0.3 + 0.1j, 2: -0.05j, 3: 0.01}, 1.0, 1.5)
        assert abs(evaluate_drive(spec, phi) - evaluate_drive(spec, phi + 2 * math.pi)) < 1e-14

    def test_zero_mean(self):
        spec = DriveSpec.from_positive_modes(1, 4, 0.1, 0, {1: 0.3 + 0.1j, 2: -0.05j, 3: 0.01}, 1.0, 1.5)
        phi = 2 * math.pi * np.arange(256) / 256
        assert abs(np.mean(evaluate_drive(spec, phi))) < 1e-12


class TestConfig:
    def test_cosine_config(self):
        spec = DriveSpec.from_config({"g": 1, "omega": 4, "h": 0.1, "V0": 0, "kappa": 3, "drive": {"type": "cosine"}})
        assert spec.kappa == 3 and spec.coefficients[-1] == 0.5

    def test_coeffs_config_conjugates(self):
        cfg = {"g": 1, "omega": 4, "drive": {"type": "coeffs", "sigma": 1.0, "C0": 1.5, "coeffs": [[1, 0.2, 0.1], [2, 0.0, -0.05]]}}
        spec = DriveSpec.from_config(cfg)
        assert spec.coefficients[-1] == complex(0.2, -0.1)
        assert spec.coefficients[-2] == complex(0.0, 0.05)
        assert validate(spec) == []

    def test_roundtrip(self, tmp_path):
        spec = DriveSpec.from_positive_modes(1.5, 3.0, 0.2, 0.4, {1: 0.2 + 0.1j}, 1.0, 1.5, kappa=2)
        path = tmp_path / "c.json"
        path.write_text(json.dumps(spec.to_config()))
        assert DriveSpec.from_json(path) == spec

    @pytest.mark.parametrize(
        "cfg",
        [
            {"omega": 4},
            {"g": 1, "omega": 4, "drive": {"type": "square"}},
            {"g": 1, "omega": 4, "drive": {"type": "coeffs", "coeffs": [[0, 1, 0]], "sigma": 1, "C0": 1}},
            {"g": "x", "omega": 4},
        ],
    )
    def test_malformed(self, cfg):
        with pytest.raises(ConfigError):
            DriveSpec.from_config(cfg)

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError):
            DriveSpec.from_json(tmp_path / "missing.json")


def test_default_mode_cutoff():
    assert default_mode_cutoff(1.0) == 36
    assert math.exp(-1.0 * default_mode_cutoff(1.0)) < 1e-15
