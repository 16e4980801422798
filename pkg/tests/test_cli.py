import json

import numpy as np
import pytest

from levyrough.cli import main
from levyrough.paths import Jump, SamplePath, read_csv, write_csv


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_simulate_writes_path_and_provenance(tmp_path):
    assert run(tmp_path, "simulate", "--seed", "3", "--grid-points", "65") == 0
    p = read_csv(tmp_path / "path.csv")
    assert len(p) == 65 and p.dim == 2
    prov = json.loads((tmp_path / "path.provenance.json").read_text())
    for key in ("command", "config", "config_hash", "seed", "version", "artifacts", "driver"):
        assert key in prov
    assert prov["seed"] == 3 and prov["artifacts"] == ["path.csv"]


def test_simulate_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(a, "simulate", "--seed", "5", "--grid-points", "33", "--format", "json")
    run(b, "simulate", "--seed", "5", "--grid-points", "33", "--format", "json")
    assert (a / "path.json").read_bytes() == (b / "path.json").read_bytes()


def test_missing_seed_is_a_config_error(tmp_path, capsys):
    assert run(tmp_path, "simulate") == 2
    assert "seed" in capsys.readouterr().err


def test_out_of_range_p(tmp_path):
    assert run(tmp_path, "solve", "--seed", "1", "--p", "3.5") == 2


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("numeric:\n  pp: 1\n")
    assert run(tmp_path, "simulate", "--seed", "1", "--config", str(cfg)) == 2


def test_config_command_mismatch(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "area"}))
    assert run(tmp_path, "simulate", "--seed", "1", "--config", str(cfg)) == 2


def test_flags_override_file(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("model:\n  grid_points: 17\nseed: 1\n")
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--grid-points", "9", "--out", str(out)]) == 0
    assert len(read_csv(out / "path.csv")) == 9
    prov = json.loads((out / "path.provenance.json").read_text())
    assert prov["config"]["seed"] == 1 and prov["config"]["model"]["grid_points"] == 9


@pytest.mark.parametrize("p", ["1.5", "2.5"])
def test_constant_field_solve_passes_its_check(tmp_path, p):
    code = run(tmp_path, "solve", "--seed", "2", "--grid-points", "129", "--field", "constant", "--p", p)
    assert code == 0
    prov = json.loads((tmp_path / "solution.provenance.json").read_text())
    assert prov["constant_field_check"]["pass"]
    if p == "2.5":
        assert prov["beta"]["beta"] == 2 * prov["beta"]["beta_min"]
        assert (tmp_path / "driver.enhanced.level2.json").exists()


def test_solve_from_input_with_jumps(tmp_path):
    t = np.linspace(0, 1, 6)
    x = np.array([[0, 0], [0.1, 0], [0.6, 0.2], [0.5, 0.1], [0.4, 0.3], [0.45, 0.2]])
    write_csv(SamplePath(t, x, (Jump(2, [0.15, 0.0], x[2]),)), tmp_path / "d.csv")
    code = run(tmp_path, "solve", "--input", str(tmp_path / "d.csv"), "--field", "rotation", "--p", "1.5")
    assert code == 0
    sol = read_csv(tmp_path / "solution.csv")
    assert len(sol) == 6 and len(sol.jumps) == 1
    assert (tmp_path / "solution.parametrisation.json").exists()


def test_solve_forward_mode(tmp_path):
    assert run(tmp_path, "solve", "--seed", "4", "--grid-points", "65", "--mode", "corrective",
               "--n-corrections", "3", "--model", "levy") == 0


def test_bad_input_file(tmp_path):
    assert run(tmp_path, "pvar", "--input", str(tmp_path / "none.csv")) == 2


def test_pvar_command(tmp_path):
    t = np.linspace(0, 1, 4)
    write_csv(SamplePath(t, np.array([0.0, 1.0, 0.0, 1.0])), tmp_path / "x.csv")
    assert run(tmp_path, "pvar", "--input", str(tmp_path / "x.csv"), "--p", "1.0") == 0
    rep = json.loads((tmp_path / "pvar.json").read_text())
    assert rep["value"] == 3.0


def test_area_command(tmp_path):
    assert run(tmp_path, "area", "--seed", "1", "--trials", "200", "--levels", "5") == 0
    rep = json.loads((tmp_path / "area.json").read_text())
    assert rep["pass"] and rep["C0"] == 1.0


def test_verify_quick_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["verify", "eta-index", "--seed", "0", "--quick", "--out", str(a)]) == 0
    assert main(["verify", "eta-index", "--seed", "0", "--quick", "--out", str(b)]) == 0
    name = "verify-eta-index.json"
    assert (a / name).read_bytes() == (b / name).read_bytes()
    assert "eta-index: PASS" in capsys.readouterr().out
