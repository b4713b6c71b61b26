"""Run one configured task and write its artifacts."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import artifacts
from .config import RunConfig
from .eigen import EigenSolverError, NoPositiveEigenvalue, WeightedEigenproblem, homogeneity_check
from .mesh import DIRICHLET, Grid
from .optimize import (
    OptResult,
    TraceRow,
    comonotone_check,
    convexity_probe,
    fragmentation_sweep,
    maximize_lambda1,
    minimize_lambda1,
    persistence_threshold,
)
from .rearrange import RearrangementClass, decreasing_rearrangement
from .validate import validate_suite

NO_POSITIVE = "no-positive-eigenvalue"
SOLVER_FAILURE = "solver-failure"
CHECK_FAILED = "check-failed"
OK_STATUSES = ("converged", NO_POSITIVE)


@dataclass
class RunOutcome:
    status: str
    summary: dict
    files: list[Path] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if self.status in OK_STATUSES:
            return 0
        return 2 if self.status == SOLVER_FAILURE else 1


class _Writer:
    def __init__(self, out: Path, grid: Grid):
        self.out, self.grid, self.files = out, grid, []

    def path(self, name) -> Path:
        p = self.out / name
        self.files.append(p)
        return p

    def weight(self, values):
        artifacts.write_weight_csv(self.path("weight.csv"), values)

    def eigenfunction(self, pair):
        if pair is not None:
            artifacts.write_eigenfunction_csv(self.path("eigenfunction.csv"), self.grid.nodes, pair.u)

    def trace(self, rows):
        artifacts.write_trace_csv(self.path("trace.csv"), rows)


def _eigen_summary(mu1: float) -> dict:
    return {
        "mu1": mu1,
        "lambda1": 1.0 / mu1 if mu1 > 0 else float("inf"),
        "d_star": mu1,
    }


def _solve(cfg, grid, m, w: _Writer) -> dict:
    problem = WeightedEigenproblem(grid, tol=cfg.tol)
    w.weight(m)
    try:
        pair = problem.solve(m)
    except NoPositiveEigenvalue as exc:
        w.trace([])
        return {**_eigen_summary(0.0), "status": NO_POSITIVE, "in_class": True,
                "persistence": "extinct for all d", "message": str(exc)}
    w.trace([TraceRow(0, pair.mu1, 0.0)])
    w.eigenfunction(pair)
    return {**_eigen_summary(persistence_threshold(pair)), "status": "converged", "in_class": True,
            "residual": pair.residual}


def _opt_summary(res: OptResult) -> dict:
    out = {**_eigen_summary(res.final_mu1), "status": res.status.value, "in_class": res.in_class}
    if res.trace:
        out["gap"] = res.trace[-1].gap
        out["iterations"] = len(res.trace)
    return out


def _minimize(cfg, grid, m, w: _Writer) -> dict:
    cls = RearrangementClass(m, grid.element_measure)
    res = minimize_lambda1(cls, grid, tol=cfg.tol, max_iter=cfg.max_iter)
    w.weight(res.final_weight.values)
    w.eigenfunction(res.eigenpair)
    w.trace(res.trace)
    q = WeightedEigenproblem(grid).gradient(res.eigenpair)
    return {**_opt_summary(res), "comonotone": comonotone_check(res.final_weight, q, "increasing").holds}


def _maximize(cfg, grid, m, w: _Writer) -> dict:
    cls = RearrangementClass(m, grid.element_measure)
    res = maximize_lambda1(cls, grid, tol=cfg.tol, max_iter=cfg.max_iter)
    w.weight(res.final_weight.values)
    w.eigenfunction(res.eigenpair)
    w.trace(res.trace)
    out = _opt_summary(res)
    out["min_weight"] = float(res.final_weight.values.min())
    if grid.bc_kind == DIRICHLET:
        out["gamma"] = res.gamma
        computed = decreasing_rearrangement(res.final_weight)
        artifacts.write_step_csv(w.path("rearrangement_computed.csv"), computed)
        artifacts.write_step_csv(w.path("rearrangement_analytic.csv"), res.analytic)
        out["l1_to_analytic"] = computed.l1_distance(res.analytic)
    return out


def _sweep(cfg, grid, m, w: _Writer) -> dict:
    cls = RearrangementClass(m, grid.element_measure)
    rows, mean_mu1 = fragmentation_sweep(cls, cfg.stripes, grid)
    artifacts.write_sweep_csv(w.path("trace.csv"), rows)
    w.weight(cls.mean_weight().values)
    mus = [r.mu1 for r in rows]
    decreasing = bool(np.all(np.diff(mus) < 0))
    # the closure infimum: mu1 of the constant mean, which has no positive part
    return {**_eigen_summary(mean_mu1), "status": "converged" if decreasing else CHECK_FAILED,
            "in_class": False, "strictly_decreasing": decreasing,
            "mean_weight_status": NO_POSITIVE if mean_mu1 == 0 else "positive"}


def _probe(cfg, grid, m, w: _Writer) -> dict:
    rng = np.random.default_rng(cfg.seed)
    problem = WeightedEigenproblem(grid, tol=cfg.tol)
    pair = problem.solve(m)
    q = problem.gradient(pair)
    w.weight(m)
    w.eigenfunction(pair)
    w.trace([TraceRow(0, pair.mu1, 0.0)])
    rows = []

    fd_err = 0.0
    for _ in range(5):
        v = rng.standard_normal(m.size)
        h = 1e-4 * np.abs(m).max() / np.abs(v).max()
        fd = (problem.solve(m + h * v).mu1 - problem.solve(m - h * v).mu1) / (2 * h)
        fd_err = max(fd_err, abs(fd - q @ v) / abs(fd))
    rows.append(("derivative", fd_err, 1e-5))
    rows.append(("euler_identity", abs(q @ m - pair.mu1), 1e-10))
    rows.append(("homogeneity", max(homogeneity_check(grid, m, a).rel_error for a in (0.5, 2.0, 3.7)), 1e-12))
    other = rng.permutation(m)
    rows.append(("convexity", convexity_probe(m, other, (0.25, 0.5, 0.75), grid, problem).max_violation, 1e-10))

    with open(w.path("probe.csv"), "w") as fh:
        fh.write("check,measured,limit,passed\n")
        for name, val, lim in rows:
            fh.write(f"{name},{artifacts.fmt(val)},{artifacts.fmt(lim)},{str(val <= lim).lower()}\n")
    passed = all(val <= lim for _, val, lim in rows)
    return {**_eigen_summary(pair.mu1), "status": "converged" if passed else CHECK_FAILED, "in_class": True}


def _validate(cfg, grid, m, w: _Writer) -> dict:
    report = validate_suite(seed=cfg.seed)
    with open(w.path("validate.csv"), "w") as fh:
        fh.write("check,measured,limit,passed\n")
        for c in report.checks:
            fh.write(f"\"{c.name}\",{artifacts.fmt(c.measured)},{artifacts.fmt(c.threshold)},{str(c.passed).lower()}\n")
    return {"status": "converged" if report.passed else CHECK_FAILED, "checks": len(report.checks),
            "failed": sum(not c.passed for c in report.checks)}


TASK_RUNNERS = {
    "solve": _solve,
    "minimize": _minimize,
    "maximize": _maximize,
    "sweep": _sweep,
    "probe": _probe,
    "validate": _validate,
}


def run(cfg: RunConfig, output_dir=None) -> RunOutcome:
    """Execute ``cfg.task``; artifacts go to ``output_dir`` (default ``cfg.output_dir``)."""
    out = Path(output_dir if output_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = cfg.grid()
    m = cfg.weight_values(grid)
    w = _Writer(out, grid)
    try:
        summary = TASK_RUNNERS[cfg.task](cfg, grid, m, w)
    except EigenSolverError as exc:
        summary = {"status": SOLVER_FAILURE, "message": str(exc)}
    summary = {"task": cfg.task, **summary}
    artifacts.write_summary(w.path("summary"), summary)
    return RunOutcome(summary["status"], summary, w.files)
