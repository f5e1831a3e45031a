import json
import math

import pytest

import granuflow


def test_wasserstein_dirac_shift():
    assert granuflow.wasserstein([0.0], [1.0], [2.0], [1.0], 2) == pytest.approx(2.0)
    assert granuflow.wasserstein([0.0, 1.0], [0.5, 0.5], [0.0, 1.0], [0.5, 0.5], 1) == 0.0


def test_mass_mismatch_raises():
    with pytest.raises(granuflow.GranuflowError, match="MassMismatch"):
        granuflow.wasserstein([0.0], [1.0], [0.0], [2.0], 2)


def test_discrete_labels_run_descends():
    r = granuflow.discrete_labels_run(2, "uniform", 16, tau=0.05, T=0.5)
    assert len(r["times"]) == 12
    energy = r["energy"]
    assert all(b <= a + 1e-12 for a, b in zip(energy, energy[1:]))
    assert len(r["positions"][0]) == 2


def test_simulate_writes_outputs(tmp_path):
    cfg = {
        "schema": 1,
        "initial": {"kind": "discrete_labels", "labels": 2, "particles": 8},
        "jko": {"tau": 0.05, "T": 0.3},
        "output_dir": "out",
    }
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    r = granuflow.simulate(str(path))
    assert (tmp_path / "out" / "trajectory.csv").exists()
    assert math.isfinite(r["energy"][-1])


def test_criterion_one_passes():
    r = granuflow.run_criterion(1)
    assert r["passed"], r["detail"]
    assert "jko-descent" in granuflow.suite_names()
