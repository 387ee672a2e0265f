"""Command-line interface: exit codes, outputs, determinism."""

import importlib.resources
import json

import pytest
from click.testing import CliRunner

from driftplan.cli import main

SMALL_CATALOG = """\
# epoch: t0
id,a_km,e,i_deg,raan_deg
2,7055.3,0.0001,98.1,188.3
5,7128.5,0.0,98.4,174.7
8,7200.0,0.0001,98.7,180.3
"""


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def small_files(tmp_path):
    cat = tmp_path / "catalog.csv"
    cat.write_text(SMALL_CATALOG)
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"n_select": 2}))
    return cat, cfg


def _run(runner, cat, cfg, out, *extra):
    return runner.invoke(
        main, ["run", str(cat), str(cfg), "--out", str(out), *extra])


def test_run_small_mission(runner, small_files, tmp_path):
    cat, cfg = small_files
    out = tmp_path / "out"
    result = _run(runner, cat, cfg, out)
    assert result.exit_code == 0, result.output
    assert "converged" in result.output
    names = sorted(p.name for p in out.iterdir())
    assert names == ["cumulative_dv.dat", "iterations.txt",
                     "orbit_timeline.dat", "plan.txt", "raan_gap.dat"]
    assert "path: " in (out / "plan.txt").read_text()


def test_run_twice_byte_identical(runner, small_files, tmp_path):
    cat, cfg = small_files
    out1, out2 = tmp_path / "one", tmp_path / "two"
    assert _run(runner, cat, cfg, out1).exit_code == 0
    assert _run(runner, cat, cfg, out2).exit_code == 0
    for p in sorted(out1.iterdir()):
        assert p.read_bytes() == (out2 / p.name).read_bytes()


def test_run_strategy_flag(runner, small_files, tmp_path):
    cat, cfg = small_files
    base, alt = tmp_path / "base", tmp_path / "alt"
    assert _run(runner, cat, cfg, base).exit_code == 0
    result = _run(runner, cat, cfg, alt, "--strategy", "best_bound",
                  "--branch-rule", "numerical_order", "--verbose")
    assert result.exit_code == 0
    assert "wrote" in result.output
    assert (base / "plan.txt").read_bytes() == (alt / "plan.txt").read_bytes()


def test_run_oversized_selection(runner, small_files, tmp_path):
    cat, _ = small_files
    cfg = tmp_path / "big.json"
    cfg.write_text(json.dumps({"n_select": 4}))
    result = _run(runner, cat, cfg, tmp_path / "out")
    assert result.exit_code == 2
    assert "exceeds" in result.output


def test_run_empty_catalog(runner, tmp_path):
    cat = tmp_path / "empty.csv"
    cat.write_text("id,a_km,e,i_deg,raan_deg\n")
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"n_select": 2}))
    out = tmp_path / "out"
    result = _run(runner, cat, cfg, out)
    assert result.exit_code == 2
    assert not out.exists()


def test_run_bad_config(runner, small_files, tmp_path):
    cat, _ = small_files
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"n_select": 2, "mystery_knob": 3}))
    result = _run(runner, cat, cfg, tmp_path / "out")
    assert result.exit_code == 2
    assert "mystery_knob" in result.output


def test_run_infeasible_budget(runner, small_files, tmp_path):
    cat, _ = small_files
    cfg = tmp_path / "tight.json"
    cfg.write_text(json.dumps({"n_select": 2, "t_max_days": 2.0}))
    result = _run(runner, cat, cfg, tmp_path / "out")
    assert result.exit_code == 3
    assert "infeasible" in result.output


def test_run_unconverged_exit_code(runner, small_files, tmp_path):
    cat, _ = small_files
    cfg = tmp_path / "oneshot.json"
    cfg.write_text(json.dumps({"n_select": 2, "max_iterations": 0}))
    out = tmp_path / "out"
    result = _run(runner, cat, cfg, out)
    assert result.exit_code == 4
    assert "not converged" in result.output
    assert (out / "plan.txt").exists()


def test_check_bundled_catalog(runner):
    path = importlib.resources.files("driftplan") / "data" / "catalog.csv"
    result = runner.invoke(main, ["check", str(path)])
    assert result.exit_code == 0
    assert "11 valid, 0 invalid" in result.output
    rates = [float(line.split()[-1]) for line in
             result.output.splitlines()
             if len(line.split()) == 6 and line.split()[0].isdigit()]
    assert len(rates) == 11
    assert all(0.9 < r < 1.1 for r in rates)


def test_check_reports_bad_row(runner, tmp_path):
    cat = tmp_path / "catalog.csv"
    cat.write_text("id,a_km,e,i_deg,raan_deg\n"
                   "1,7000,0,98,200\n2,7001,1.2,98,201\n")
    result = runner.invoke(main, ["check", str(cat)])
    assert result.exit_code == 2
    assert "line 3" in result.output
    assert "1 valid, 1 invalid" in result.output


def test_check_missing_file(runner, tmp_path):
    result = runner.invoke(main, ["check", str(tmp_path / "nope.csv")])
    assert result.exit_code == 2
