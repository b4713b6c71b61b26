import numpy as np
import pytest

from eigenweight import artifacts
from eigenweight.cli import main
from eigenweight.config import ConfigError, RegimeMismatch, parse_config
from eigenweight.runner import run

SOLVE = """
# minimal solve
domain = 0, 1
elements = 64
bc = dirichlet
weight = 1
task = solve
"""


def cfg_text(**kw):
    base = {"domain": "0, 1", "elements": "16", "bc": "dirichlet", "weight": "1", "task": "solve"}
    base.update(kw)
    return "\n".join(f"{k} = {v}" for k, v in base.items() if v is not None)


def test_minimal_solve_config():
    cfg = parse_config(SOLVE)
    assert cfg.task == "solve" and cfg.elements == (64,) and cfg.bc.kind == "dirichlet"
    np.testing.assert_array_equal(cfg.weight_values(), np.ones(64))
    assert cfg.tol == 1e-10 and cfg.stripes == (2, 4, 8, 16)


def test_unknown_key_named():
    with pytest.raises(ConfigError, match="sigmaa"):
        parse_config(SOLVE + "sigmaa = 1\n")


@pytest.mark.parametrize("text, match", [
    (cfg_text(elements=None), "elements"),
    (cfg_text(task="optimize"), "task"),
    (cfg_text(bc="neumann"), "bc"),
    (cfg_text(bc="robin"), "sigma"),
    (cfg_text(sigma="1"), "sigma"),
    (cfg_text(elements="ten"), "elements"),
    (cfg_text(tol="-1"), "tol"),
    (cfg_text(weight="1, 2, 3"), "16 cells"),
    (cfg_text(weight=None), "exactly one"),
    (cfg_text(weight=None, weight_two_valued="2, 0.3, -1"), "whole number"),
    (cfg_text(weight=None, weight_two_valued="1, 0.5, -1", task="sweep", stripes="2, 16"), "stripes"),
    (SOLVE + "elements = 8\n", "duplicate"),
    ("domain 0 1", "key = value"),
])
def test_config_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_robin_and_two_valued():
    cfg = parse_config(cfg_text(bc="robin", sigma="0.5", weight=None, weight_two_valued="2, 0.5, -1",
                                task="maximize", tol="1e-9", max_iter="50"))
    assert cfg.bc.sigma == 0.5 and cfg.tol == 1e-9 and cfg.max_iter == 50
    np.testing.assert_array_equal(cfg.weight_values(), np.r_[np.full(8, 2.0), np.full(8, -1.0)])


def test_rectangle_config():
    cfg = parse_config(cfg_text(domain="0, 1, 0, 2", elements="3, 4"))
    assert cfg.grid().n_elements == 12


def test_maximize_zero_integral_is_regime_error():
    with pytest.raises(RegimeMismatch, match="infinity"):
        parse_config(cfg_text(weight=None, weight_two_valued="1, 0.5, -1", task="maximize"))


def test_sweep_regimes():
    with pytest.raises(RegimeMismatch, match="nonpositive"):
        parse_config(cfg_text(task="sweep"))
    with pytest.raises(RegimeMismatch, match="positive"):
        parse_config(cfg_text(task="sweep", weight="-1"))
    with pytest.raises(RegimeMismatch):
        parse_config(cfg_text(task="minimize", weight="-1"))


def test_weight_file_relative_to_config(tmp_path):
    artifacts.write_weight_csv(tmp_path / "w.csv", np.linspace(-1, 2, 16))
    cfg = parse_config(cfg_text(weight=None, weight_file="w.csv"), base_dir=tmp_path)
    np.testing.assert_array_equal(cfg.weight_values(), np.linspace(-1, 2, 16))


def test_solve_run_artifacts(tmp_path):
    out = run(parse_config(SOLVE), tmp_path)
    assert out.exit_code == 0
    s = artifacts.read_summary(tmp_path / "summary")
    lam = float(s["lambda1"])
    assert abs(lam - 9.8696) <= 0.01
    assert float(s["d_star"]) == pytest.approx(1 / lam, rel=1e-15)
    assert s["status"] == "converged" and s["task"] == "solve"
    nodes, u = artifacts.read_eigenfunction_csv(tmp_path / "eigenfunction.csv")
    assert nodes.shape == (65, 1) and u[0] == 0 and u[-1] == 0 and np.all(u[1:-1] > 0)


def test_no_positive_run_exits_zero(tmp_path):
    out = run(parse_config(cfg_text(weight="-1")), tmp_path)
    assert out.exit_code == 0
    s = artifacts.read_summary(tmp_path / "summary")
    assert s["status"] == "no-positive-eigenvalue" and s["persistence"] == "extinct for all d"
    assert not (tmp_path / "eigenfunction.csv").exists()


def test_sweep_run_trace(tmp_path):
    cfg = parse_config(cfg_text(elements="64", weight=None, weight_two_valued="1, 0.5, -1", task="sweep"))
    out = run(cfg, tmp_path)
    assert out.exit_code == 0
    rows = artifacts.read_sweep_csv(tmp_path / "trace.csv")
    assert [r.stripes for r in rows] == [2, 4, 8, 16]
    assert np.all(np.diff([r.mu1 for r in rows]) < 0)
    s = artifacts.read_summary(tmp_path / "summary")
    assert s["mean_weight_status"] == "no-positive-eigenvalue" and s["strictly_decreasing"] == "true"


def test_maximize_run_writes_rearrangements(tmp_path):
    cfg = parse_config(cfg_text(weight=None, weight_two_valued="2, 0.5, -1", task="maximize"))
    out = run(cfg, tmp_path)
    assert out.exit_code == 0
    names = {p.name for p in out.files}
    assert {"summary", "trace.csv", "weight.csv", "eigenfunction.csv",
            "rearrangement_computed.csv", "rearrangement_analytic.csv"} <= names
    s = artifacts.read_summary(tmp_path / "summary")
    assert float(s["gamma"]) == 0.25
    analytic = artifacts.read_step_csv(tmp_path / "rearrangement_analytic.csv")
    np.testing.assert_array_equal(analytic.levels, [2.0, 0.0])


def test_minimize_and_probe_runs(tmp_path):
    cfg = parse_config(cfg_text(weight="2, -1, 0.5, 1, -0.3, 0.1, 0, 1.5", elements="8", task="minimize"))
    out = run(cfg, tmp_path / "min")
    s = artifacts.read_summary(tmp_path / "min" / "summary")
    assert out.exit_code == 0 and s["comonotone"] == "true"
    trace = artifacts.read_trace_csv(tmp_path / "min" / "trace.csv")
    assert trace[-1].mu1 == float(s["mu1"])

    cfg = parse_config(cfg_text(weight="2, -1, 0.5, 1, -0.3, 0.1, 0, 1.5", elements="8", task="probe"))
    assert run(cfg, tmp_path / "probe").exit_code == 0
    lines = (tmp_path / "probe" / "probe.csv").read_text().splitlines()
    assert lines[0] == "check,measured,limit,passed" and all(l.endswith("true") for l in lines[1:])


def test_run_is_deterministic(tmp_path):
    text = cfg_text(weight="2, -1, 0.5, 1, -0.3, 0.1, 0, 1.5", elements="8", task="probe", seed="7")
    run(parse_config(text), tmp_path / "a")
    run(parse_config(text), tmp_path / "b")
    for name in ("summary", "probe.csv", "weight.csv", "trace.csv", "eigenfunction.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_cli_solve(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text(SOLVE)
    assert main(["solve", "--config", str(path), "--out", str(tmp_path / "o")]) == 0
    printed = capsys.readouterr().out
    assert "status=converged" in printed and "in_class=true" in printed
    assert (tmp_path / "o" / "summary").exists()


def test_cli_task_overrides_config(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text(cfg_text(weight=None, weight_two_valued="1, 0.5, -1", stripes="2, 4, 8"))
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path / "o")]) == 0
    assert "task=sweep" in capsys.readouterr().out
    # the same weight cannot be maximized
    assert main(["maximize", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert "infinity" in capsys.readouterr().err


def test_cli_errors(tmp_path, capsys):
    assert main(["solve"]) == 2
    assert main(["solve", "--config", str(tmp_path / "missing.cfg")]) == 2
    path = tmp_path / "bad.cfg"
    path.write_text(SOLVE + "sigmaa = 1\n")
    assert main(["solve", "--config", str(path)]) == 2
    assert "sigmaa" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["optimize", "--config", str(path)])
