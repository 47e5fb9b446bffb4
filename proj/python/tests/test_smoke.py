import json
import math

import pytest

import _wrinklelab as wl


def test_relaxed_minimum_constant():
    assert wl.E0 == pytest.approx(-5.0 / 3.0)


def test_profile_partition_identity():
    assert wl.profile_partition_residual(10000) < 1e-12


def test_cascade_is_feasible():
    out = wl.build_cascade(1.0, b=1.0, n_cells=256)
    assert wl.constraint_residual_max(out["field"]) < 1e-10
    e = wl.energy(out["field"])
    assert e["total"] == pytest.approx(e["membrane"] + e["bending"])
    assert 10.0 < e["total"] < 50.0


def test_field_json_round_trip():
    out = wl.build_cascade(2.0, b=0.5, n_cells=128)
    field = json.loads(out["field"])
    assert field["schema_version"] == 1
    assert field["L"] == 2.0
    assert len(field["amplitudes"]) == len(field["modes"]) * len(field["x_nodes"])


def test_projection_restores_feasibility():
    out = wl.build_cascade(1.0, b=1.0, n_cells=128)
    doubled = wl.combine(out["field"], out["field"])
    assert wl.constraint_residual_max(doubled) > 0.1
    fixed = wl.project_constraint(doubled)
    assert wl.constraint_residual_max(fixed) < 1e-12


def test_minimize_descends_below_cascade():
    out = wl.build_cascade(1.0, b=1.0, n_cells=1024)
    start = wl.energy(out["field"])["total"]
    res = wl.minimize(out["field"], grad_tol=1e-6, max_iters=4000, restarts=0,
                      k_top=64.0)
    assert res["sigma"] < start
    assert res["el_residual"] < 1e-3
    checks = json.loads(wl.structural_checks(res["result"]))
    names = {item["name"] for item in checks["items"]}
    assert "multiplier_identity" in names and "gap_ratio" in names


def test_planar_plate_energy():
    el = wl.evaluate_el_planar(4.0, 256, 256)
    assert el["total"] == pytest.approx(-4.0 / 3.0, abs=1e-9)
    assert el["t1c"] == pytest.approx(1.0 / 3.0, abs=1e-9)
    assert el["t2"] == pytest.approx(1.0 / 3.0, abs=1e-9)


def test_repair_scaled_cascade():
    out = wl.repair_scaled_cascade(4.0, scale=0.9, n_cells=128)
    assert out["feasibility_margin"] >= -1e-10
    assert out["penalty"] == pytest.approx(16 * 0.0361 / 3, rel=1e-2)
    assert math.isfinite(out["delta_hat"])
