import csv
import json
import math

import numpy as np
import pytest

from risee import __version__
from risee.cli import FIGURES, ExperimentSpec, default_grid, fmt, main, run
from risee.params import ConfigError


def read_csv(path):
    lines = path.read_text().splitlines()
    meta = [l for l in lines if l.startswith("#")]
    rows = list(csv.DictReader(l for l in lines if not l.startswith("#")))
    return meta, rows


def col(rows, name, **where):
    return [float(r[name]) for r in rows if all(r[k] == v for k, v in where.items())]


@pytest.mark.parametrize("figure", [f for f in FIGURES if f != "fig2_ee_vs_n"])
def test_every_figure_runs(tmp_path, figure):
    out = tmp_path / f"{figure}.csv"
    assert main(["run", "--figure", figure, "--out", str(out)]) == 0
    meta, rows = read_csv(out)
    assert rows
    assert any("system.bandwidth_hz" in m for m in meta)
    assert any("system.static_per_element_active_w" in m for m in meta)
    side = json.loads(out.with_suffix(".csv.json").read_text())
    assert side["version"] == __version__ and side["seed"] == 0
    assert side["scenario"]["system"]["num_elements"] == 1024


def test_fig2_small_run_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["run", "--figure", "fig2_ee_vs_n", "--trials", "50", "--seed", "3",
                     "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    _, rows = read_csv(a)
    assert [int(r["N"]) for r in rows] == [2 ** k for k in range(4, 14)]
    assert all(float(r["stderr_active"]) > 0 for r in rows)


def test_fig2_worker_count_does_not_change_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["run", "--figure", "fig2_ee_vs_n", "--trials", "20", "--out", str(a)])
    main(["run", "--figure", "fig2_ee_vs_n", "--trials", "20", "--workers", "2", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_fig7_newton_shortest(tmp_path):
    out = tmp_path / "f7.csv"
    main(["run", "--figure", "fig7_solver_convergence", "--out", str(out)])
    side = json.loads(out.with_suffix(".csv.json").read_text())
    it = side["results"]["iterations_to_1e-6"]
    assert it["newton"] < it["bisection"] < it["annealing"]
    _, rows = read_csv(out)
    assert {r["method"] for r in rows} == {"newton", "bisection", "annealing"}


def test_fig7_single_method(tmp_path):
    out = tmp_path / "f7.csv"
    main(["run", "--figure", "fig7_solver_convergence", "--method", "bisection", "--out", str(out)])
    _, rows = read_csv(out)
    assert {r["method"] for r in rows} == {"bisection"}


def test_fig8_single_sign_change(tmp_path):
    out = tmp_path / "f8.csv"
    main(["run", "--figure", "fig8_f_vs_n", "--out", str(out)])
    _, rows = read_csv(out)
    for pt in ("1.00000000000e+01", "2.00000000000e+01", "3.00000000000e+01"):
        f = np.array(col(rows, "f", pt_dbm=pt))
        assert np.count_nonzero(np.diff(np.sign(f))) == 1


def test_fig6_sidecar_has_optimum(tmp_path):
    out = tmp_path / "f6.csv"
    main(["run", "--figure", "fig6_ee_vs_beta", "--out", str(out)])
    opt = json.loads(out.with_suffix(".csv.json").read_text())["results"]["optimal_beta"]
    for summary in opt.values():
        assert 0 <= summary["beta_opt"] <= 1
        assert summary["gap_to_grid"] < 0.02


def test_beta_report_roundtrip(capsys):
    assert main(["beta"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert set(data) >= {"beta_opt", "ee_opt", "candidates", "grid_argmax", "scenario"}
    assert len(data["candidates"]) == 6
    assert 0 <= data["beta_opt"] <= 1


def test_crossover_report(capsys):
    assert main(["crossover", "--method", "newton"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["newton"]["n_floor_better"] == "active"
    assert 2 ** 8 <= data["newton"]["n0"] <= 2 ** 12


def test_stdout_when_no_out(capsys):
    assert main(["run", "--figure", "fig3_ee_vs_pt"]) == 0
    assert "N,pt_dbm,pt_w,ee_active,ee_passive" in capsys.readouterr().out


def test_bad_config_exits_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("pa_factor = 1.5\n")
    assert main(["run", "--figure", "fig3_ee_vs_pt", "--config", str(bad)]) == 2
    assert "pa_factor" in capsys.readouterr().err
    bad.write_text("nonsense = 1\n")
    assert main(["beta", "--config", str(bad)]) == 2
    assert main(["beta", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_argument_errors():
    with pytest.raises(SystemExit):
        main(["run", "--figure", "fig99"])
    assert main(["run", "--figure", "fig3_ee_vs_pt", "--seed", "-1"]) == 2


def test_invalid_cells_are_empty():
    assert fmt(math.nan) == "" and fmt(None) == "" and fmt(math.inf) == ""
    assert fmt(1.0) == "1.00000000000e+00"
    assert fmt(3) == "3"


def test_spec_validation():
    with pytest.raises(ConfigError):
        ExperimentSpec("fig3_ee_vs_pt", {"n": []})
    with pytest.raises(ConfigError):
        ExperimentSpec("fig3_ee_vs_pt", default_grid("fig3_ee_vs_pt"), trials=0)
    with pytest.raises(ConfigError):
        ExperimentSpec("figX", {})


def test_run_returns_text(scenario):
    text, side = run(ExperimentSpec("fig5_ee_vs_sigmau", default_grid("fig5_ee_vs_sigmau")), scenario)
    assert text.count("\n") > 100
    assert side["figure"] == "fig5_ee_vs_sigmau"
