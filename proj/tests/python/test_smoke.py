import json
import math

import numpy as np
import pytest

import lieosc


def test_version():
    assert lieosc.__version__ == "0.1.0"


def test_grid_shapes():
    g = lieosc.Grid("SU2", 4)
    assert len(g) == 8 * 4 * 8
    assert g.points.shape == (len(g), 4)
    assert np.isclose(g.weights.sum(), 1.0)
    assert lieosc.diameter("SU2") == pytest.approx(2 * math.pi)
    t = lieosc.Grid("T2", 8)
    assert t.points.shape == (256, 2)


def test_round_trip_and_plancherel():
    g = lieosc.Grid("T1", 32)
    x = g.points[:, 0]
    f = np.exp(2j * np.pi * 3 * x) + 0.5 * np.exp(-2j * np.pi * 5 * x)
    c = lieosc.forward_transform(g, f, 100.0)
    assert c.energy() == pytest.approx(1.25, rel=1e-12)
    assert np.allclose(lieosc.inverse_transform(c, g), f, atol=1e-12)
    back = lieosc.Coefficients.from_json(c.to_json())
    assert back.energy() == pytest.approx(c.energy())
    assert json.loads(c.to_json())["group"] == "T1"


def test_resolution_error():
    g = lieosc.Grid("T1", 4)
    with pytest.raises(lieosc.ResolutionError):
        lieosc.forward_transform(g, np.ones(len(g)), 1000.0)
    with pytest.raises(lieosc.InvalidArgument):
        lieosc.forward_transform(g, np.ones(3), 10.0)


def test_symbols_and_multiplier():
    s = lieosc.oscillating_symbol("SU2", 0.5)
    assert abs(s(0) - np.exp(1j)) < 1e-15
    assert lieosc.decay_constant(s, 0.5, 64.0) == (pytest.approx(1.0, abs=1e-12), True)
    g = lieosc.Grid("T1", 32)
    out = lieosc.apply_multiplier(lieosc.oscillating_symbol("T1", 0.5), g, np.ones(len(g)), 100.0)
    assert np.allclose(out, np.exp(1j))


def test_kernel_and_seminorm():
    g = lieosc.Grid("T1", 256)
    k = lieosc.synthesize_kernel(lieosc.oscillating_symbol("T1", 0.5), g, 64.0)
    assert k.values.shape == (len(g),)
    assert k.envelope_slope(0.05, 0.4) < 0
    value, per_r = lieosc.estimate_seminorm(k, 0.5, lieosc.log_spaced(1e-3, 0.05, 4), 4, 1)
    assert value == max(per_r) and value > 0


def test_cz_worked_example():
    g = lieosc.Grid("T1", 64)
    f = np.where(g.points[:, 0] < 0.125, 8.0, 0.0)
    good, cells, checks = lieosc.cz_decompose(g, f, 2.0, 6)
    assert len(cells) == 1 and cells[0]["measure"] == 0.25 and cells[0]["mean"] == 4.0
    assert np.abs(good).max() == 4.0
    assert all(passed for passed, _, _ in checks.values())


def test_run_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "schema": 1, "kind": "plancherel", "group": "T1", "bandwidth": 20,
        "grid_resolution": 8, "seed": 1, "params": {"samples": 2},
    }))
    r = lieosc.run_config(cfg, tmp_path / "out")
    assert r["code"] == 0
    assert (tmp_path / "out" / "manifest.json").exists()
    cfg.write_text(cfg.read_text().replace('"T1"', '"T7"'))
    assert lieosc.run_config(cfg, tmp_path / "out2")["code"] == 2
