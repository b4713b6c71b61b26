import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eigenweight import artifacts
from eigenweight.optimize import SweepRow, TraceRow
from eigenweight.rearrange import StepRearrangement

finite = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=100, deadline=None)
@given(st.lists(finite, min_size=1, max_size=40))
def test_weight_roundtrip_bit_exact(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("w") / "weight.csv"
    artifacts.write_weight_csv(path, values)
    back = artifacts.read_weight_csv(path)
    assert back.tobytes() == np.asarray(values, dtype=float).tobytes()


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(1e-300, 1e300), finite), min_size=1, max_size=30))
def test_trace_roundtrip_bit_exact(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("t") / "trace.csv"
    trace = [TraceRow(i, mu, gap) for i, (mu, gap) in enumerate(rows)]
    artifacts.write_trace_csv(path, trace)
    assert artifacts.read_trace_csv(path) == trace


@settings(max_examples=50, deadline=None)
@given(st.lists(finite, min_size=1, max_size=20), st.integers(1, 3))
def test_eigenfunction_roundtrip(tmp_path_factory, u, dim):
    dim = min(dim, 2)
    path = tmp_path_factory.mktemp("e") / "eigenfunction.csv"
    nodes = np.random.default_rng(len(u)).normal(size=(len(u), dim))
    artifacts.write_eigenfunction_csv(path, nodes, u)
    n2, u2 = artifacts.read_eigenfunction_csv(path)
    assert n2.tobytes() == nodes.tobytes() and u2.tobytes() == np.asarray(u, dtype=float).tobytes()


def test_step_and_sweep_roundtrip(tmp_path):
    step = StepRearrangement([0.1 / 3, 0.7, 1.0], [np.pi, 1 / 7, -np.e])
    artifacts.write_step_csv(tmp_path / "s.csv", step)
    back = artifacts.read_step_csv(tmp_path / "s.csv")
    assert back.breakpoints.tobytes() == step.breakpoints.tobytes()
    assert back.levels.tobytes() == step.levels.tobytes()
    rows = [SweepRow(2, 0.1 / 3), SweepRow(4, 1e-5 / 7)]
    artifacts.write_sweep_csv(tmp_path / "sw.csv", rows)
    assert artifacts.read_sweep_csv(tmp_path / "sw.csv") == rows


def test_headers_checked(tmp_path):
    artifacts.write_weight_csv(tmp_path / "w.csv", [1.0])
    with pytest.raises(ValueError, match="header"):
        artifacts.read_trace_csv(tmp_path / "w.csv")
    (tmp_path / "x.csv").write_text("element,value\n1,2.0\n")
    with pytest.raises(ValueError, match="numbered"):
        artifacts.read_weight_csv(tmp_path / "x.csv")


def test_trace_lambda_column(tmp_path):
    artifacts.write_trace_csv(tmp_path / "t.csv", [TraceRow(0, 0.25, 1e-3)])
    assert (tmp_path / "t.csv").read_text().splitlines() == ["iter,mu1,lambda1,gap", "0,0.25,4,0.001"]


def test_summary_roundtrip(tmp_path):
    items = {"task": "solve", "mu1": 0.1 / 3, "in_class": True, "iterations": 3, "gamma": 0.25}
    artifacts.write_summary(tmp_path / "summary", items)
    s = artifacts.read_summary(tmp_path / "summary")
    assert s == {"task": "solve", "mu1": "0.033333333333333333", "in_class": "true", "iterations": "3",
                 "gamma": "0.25"}
    assert float(s["mu1"]) == 0.1 / 3
