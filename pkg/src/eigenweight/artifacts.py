"""CSV and summary files.  Floats are written with 17 significant digits so
every file reads back to the identical doubles."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .optimize import SweepRow, TraceRow
from .rearrange import StepRearrangement

WEIGHT_HEADER = ["element", "value"]
STEP_HEADER = ["breakpoint", "level"]
TRACE_HEADER = ["iter", "mu1", "lambda1", "gap"]
SWEEP_HEADER = ["stripes", "mu1", "lambda1"]


def fmt(x) -> str:
    return format(float(x), ".17g")


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _read(path, header):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != header:
        raise ValueError(f"{path}: expected header {','.join(header)}")
    return rows[1:]


def write_weight_csv(path, values):
    _write(path, WEIGHT_HEADER, ((i, fmt(v)) for i, v in enumerate(np.asarray(values, dtype=float))))


def read_weight_csv(path) -> np.ndarray:
    rows = _read(path, WEIGHT_HEADER)
    idx = [int(r[0]) for r in rows]
    if idx != list(range(len(rows))):
        raise ValueError(f"{path}: elements must be numbered 0, 1, ... in order")
    return np.array([float(r[1]) for r in rows])


def write_step_csv(path, step: StepRearrangement):
    _write(path, STEP_HEADER, zip(map(fmt, step.breakpoints), map(fmt, step.levels)))


def read_step_csv(path) -> StepRearrangement:
    rows = _read(path, STEP_HEADER)
    return StepRearrangement([float(r[0]) for r in rows], [float(r[1]) for r in rows])


def eigenfunction_header(dimension: int) -> list[str]:
    return ["node", "x", "u"] if dimension == 1 else ["node", "x", "y", "u"]


def write_eigenfunction_csv(path, nodes, u):
    nodes = np.asarray(nodes, dtype=float).reshape(len(u), -1)
    rows = ([i, *map(fmt, xy), fmt(val)] for i, (xy, val) in enumerate(zip(nodes, u)))
    _write(path, eigenfunction_header(nodes.shape[1]), rows)


def read_eigenfunction_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Node coordinates (one row per node) and nodal values."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] not in (eigenfunction_header(1), eigenfunction_header(2)):
        raise ValueError(f"{path}: expected header node,x,u or node,x,y,u")
    data = np.array([[float(x) for x in r[1:]] for r in rows[1:]]).reshape(len(rows) - 1, len(rows[0]) - 1)
    return data[:, :-1], data[:, -1]


def write_trace_csv(path, trace):
    _write(path, TRACE_HEADER, ((r.iteration, fmt(r.mu1), fmt(r.lambda1), fmt(r.gap)) for r in trace))


def read_trace_csv(path) -> list[TraceRow]:
    return [TraceRow(int(r[0]), float(r[1]), float(r[3])) for r in _read(path, TRACE_HEADER)]


def write_sweep_csv(path, rows):
    _write(path, SWEEP_HEADER, ((r.stripes, fmt(r.mu1), fmt(r.lambda1)) for r in rows))


def read_sweep_csv(path) -> list[SweepRow]:
    return [SweepRow(int(r[0]), float(r[1])) for r in _read(path, SWEEP_HEADER)]


def summary_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def write_summary(path, items: dict):
    Path(path).write_text("".join(f"{k}={summary_value(v)}\n" for k, v in items.items()))


def read_summary(path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            k, v = line.split("=", 1)
            out[k] = v
    return out
