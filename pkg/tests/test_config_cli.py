import json
from pathlib import Path

import pytest

from cefsim.cli import main
from cefsim.config import (ConfigError, emit_config, parse_config,
                           parse_config_dict)

BUNDLED = Path(__file__).resolve().parents[1] / "src/cefsim/data/canonical_scenario.json"


@pytest.fixture
def doc():
    return json.loads(BUNDLED.read_text())


@pytest.fixture
def fast_config(tmp_path, doc):
    # small step budget for quick CLI runs
    doc["solver"]["steps"] = 600
    p = tmp_path / "fast.json"
    p.write_text(json.dumps(doc))
    return p


# ---------------------------------------------------------------- parsing

def test_bundled_config_matches_expected_values():
    cfg = parse_config(BUNDLED)
    e1, e2 = cfg.eips
    assert (e1.num_clouds, e1.max_workers, e1.fixed_cost, e1.capacity) == (100, 4, 1800, 500)
    assert (e2.num_clouds, e2.max_workers, e2.fixed_cost, e2.capacity) == (120, 8, 2800, 1100)
    assert e1.cpu_cost == e2.cpu_cost == 1e-5
    t = cfg.tasks[0]
    assert (t.n, t.k, t.r0, t.r1, t.r2, t.cycles, t.rate) == (6, 4, 30, 30, 10, 1e6, 1.0)
    assert cfg.solver.steps == 10000 and cfg.solver.horizon == 1.0
    assert cfg.utilization_cost_literal
    assert cfg.initial_profile is None
    x0 = cfg.initial_mixed_profile()
    assert x0.block_sizes == (5, 9)


def test_round_trip(tmp_path):
    cfg = parse_config(BUNDLED)
    out = tmp_path / "echo.json"
    emit_config(cfg, out)
    again = parse_config(out)
    assert again == cfg
    assert again.content_hash() == cfg.content_hash()


def test_hash_changes_with_content(doc):
    base = parse_config_dict(doc).content_hash()
    doc["gamma"] = 0.9
    assert parse_config_dict(doc).content_hash() != base


def test_all_violations_reported(doc):
    doc["tasks"][0]["k"] = 9          # k > n
    doc["eips"][0]["capacity"] = 300  # below num_clouds * max_workers
    doc["gamma"] = -1
    with pytest.raises(ConfigError) as exc:
        parse_config_dict(doc)
    text = str(exc.value)
    assert "tasks[0].k" in text
    assert "eips[0].capacity" in text
    assert "gamma" in text


def test_unknown_fields_flagged(doc):
    doc["eips"][0]["typo_field"] = 1
    with pytest.raises(ConfigError, match="unknown field"):
        parse_config_dict(doc)


def test_initial_profile_validation(doc):
    doc["initial_profile"] = [[1.0, 0.0, 0.0, 0.0, 0.0], [0.5, 0.5]]
    with pytest.raises(ConfigError, match="initial_profile"):
        parse_config_dict(doc)
    doc["initial_profile"] = [[1.0, 0.0, 0.0, 0.0, 0.0],
                              [1.0, 0, 0, 0, 0, 0, 0, 0, 0]]
    cfg = parse_config_dict(doc)
    assert cfg.initial_mixed_profile().blocks[1][0] == 1.0


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="malformed"):
        parse_config(bad)


# -------------------------------------------------------------------- CLI

def test_cli_simulate_outputs(tmp_path, fast_config):
    out = tmp_path / "run"
    code = main(["simulate", str(fast_config), "--out-dir", str(out)])
    assert code == 0
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0].startswith("# config_hash=")
    assert lines[1] == "t," + ",".join(
        [f"x_1_{j}" for j in range(5)] + [f"x_2_{j}" for j in range(9)])
    assert len(lines) == 2 + 601

    report = json.loads((out / "report.json").read_text())
    assert list(report.keys()) == ["equilibrium", "t_adjacency", "t_neighborhood",
                                   "utilities", "residual", "config_hash",
                                   "alpha", "gamma", "steps", "version"]
    assert report["steps"] == 600
    assert (out / "trajectory.svg").exists()


def test_cli_simulate_unconverged_exit(tmp_path, doc):
    # the heavily subdiffusive run keeps fluctuating and never settles
    doc["solver"]["steps"] = 1500
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    code = main(["simulate", str(p), "--alpha", "0.5",
                 "--out-dir", str(tmp_path / "u")])
    assert code == 3


def test_cli_missing_config_is_usage_error(tmp_path, capsys):
    code = main(["simulate", str(tmp_path / "nope.json"),
                 "--out-dir", str(tmp_path)])
    assert code == 1
    assert "not found" in capsys.readouterr().err


def test_cli_sweep_and_determinism(tmp_path, fast_config, monkeypatch):
    args = ["sweep", str(fast_config), "--param", "r1", "--grid", "10:60:10"]
    monkeypatch.setenv("CEF_THREADS", "1")
    assert main(args + ["--out-dir", str(tmp_path / "a")]) == 0
    monkeypatch.setenv("CEF_THREADS", "3")
    assert main(args + ["--out-dir", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a/sweep.csv").read_bytes()
    b = (tmp_path / "b/sweep.csv").read_bytes()
    assert a == b
    assert len(a.decode().splitlines()) == 2 + 6  # meta + header + 6 rows


def test_cli_sweep_invariant_breach(tmp_path, fast_config, capsys):
    code = main(["sweep", str(fast_config), "--param", "W1",
                 "--grid", "100:200:50", "--out-dir", str(tmp_path)])
    assert code == 1
    assert "capacity" in capsys.readouterr().err


def test_cli_field(tmp_path, fast_config):
    out = tmp_path / "f"
    code = main(["field", str(fast_config), "--grid-spec", "0.3:0.5:0.2",
                 "--stride", "200", "--out-dir", str(out)])
    assert code == 0
    doc = json.loads((out / "field.json").read_text())
    assert len(doc["polylines"]) == 4  # 2 grid values per provider
    assert doc["grid_values"] == [0.3, 0.5]
    assert (out / "field.svg").exists()


def test_cli_kernel(tmp_path):
    out = tmp_path / "k"
    code = main(["kernel", "--alphas", "0.65,0.8", "--deltas", "0.01:0.05:0.01",
                 "--out-dir", str(out)])
    assert code == 0
    lines = (out / "kernel.csv").read_text().splitlines()
    assert lines[1] == "delta,alpha_0.65,alpha_0.8"
    assert len(lines) == 2 + 5


def test_cli_bad_grid(tmp_path, fast_config, capsys):
    code = main(["sweep", str(fast_config), "--param", "r1",
                 "--grid", "60:10:10", "--out-dir", str(tmp_path)])
    assert code == 1
