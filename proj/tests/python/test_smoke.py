import json
import math

import pytest

import subdiff


def test_special_functions():
    assert subdiff.ml(0.5, 1.0, 0.0) == 1.0
    assert subdiff.ml(rho=1.0, z=-2.0) == pytest.approx(math.exp(-2.0), rel=1e-14)
    assert subdiff.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    with pytest.raises(ValueError):
        subdiff.ml(-1.0, 1.0, 0.0)


def test_duhamel_constant_profile():
    value, error = subdiff.duhamel(1.0, 1.0, 2.0, 0.5)
    assert value == pytest.approx((1 - math.exp(-1.0)) / 2.0, rel=1e-14)
    assert error >= 0.0


def test_heat_forward():
    u = subdiff.forward([1.0], [], rho=1.0, t=0.5, modes=8)
    assert u[0] == pytest.approx(math.exp(-0.5), rel=1e-14)
    assert all(c == 0.0 for c in u[1:])


def test_inverse_and_roundtrip():
    f = [1.0, 0.0, 0.5]
    psi = subdiff.forward([], f, rho=0.7, t=1.0, modes=16)
    rec, verdict = subdiff.invert([], psi, rho=0.7, t0=1.0, modes=16)
    assert verdict == "unique"
    assert rec[:3] == pytest.approx(f, abs=1e-12)
    err, verdict = subdiff.roundtrip([0.0, 1.0], f, rho=0.5)
    assert err <= 1e-6 and verdict == "unique"


def test_example1():
    e = subdiff.example1()
    assert e["g0"] == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-12)
    assert e["g1"] < 0.0
    g = {"kind": "example1", "rho": 0.5, "b": 0.1}
    assert subdiff.null_modes(g, 0.5, 1.0) == ["1"]
    assert subdiff.null_modes(g, 0.5, 0.5) == []
    _, verdict = subdiff.invert([], [], g, rho=0.5, t0=1.0)
    assert verdict == "non-unique-family"
    with pytest.raises(subdiff.NoSolutionError):
        subdiff.invert([], [1.0], g, rho=0.5, t0=1.0)


def test_run_writes_manifest(tmp_path):
    code, message = subdiff.run("roundtrip", json.dumps({"output": str(tmp_path)}))
    assert code == 0, message
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["version"] == subdiff.__version__
    assert json.loads((tmp_path / "roundtrip.json").read_text())["rel_error"] <= 1e-6
    with pytest.raises(subdiff.ConfigError):
        subdiff.run("forward", json.dumps({"rho": 3.0}))
