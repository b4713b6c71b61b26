"""Battery of invariant checks on small grids, with measured margins."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .eigen import WeightedEigenproblem, homogeneity_check
from .mesh import BoundaryCondition, build_grid, element_square_integrals
from .optimize import brute_force_extremes, convexity_probe, maximize_lambda1, minimize_lambda1
from .rearrange import RearrangementClass, hl_max_pairing, hl_min_pairing


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: measured {self.measured:.3e} (limit {self.threshold:.1e})"


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


def _mixed_weight(rng, n):
    """Sign-changing weight with a positive part and positive mean."""
    m = rng.uniform(-1.0, 2.0, n)
    m[rng.integers(n)] = 2.0
    return m


def derivative_check(rng, derivative=element_square_integrals, pairs: int = 20, n: int = 50,
                     rtol: float = 1e-5) -> tuple[CheckResult, CheckResult]:
    """Directional derivative ``sum(q * v)`` against central differences, and ``sum(q * m) = mu1``."""
    grid = build_grid((0.0, 1.0), n, BoundaryCondition.dirichlet())
    problem = WeightedEigenproblem(grid)
    worst_fd = worst_euler = 0.0
    for _ in range(pairs):
        m, v = _mixed_weight(rng, n), rng.standard_normal(n)
        pair = problem.solve(m)
        q = derivative(grid, pair.u)
        exact = float(q @ v)
        h = 1e-4 * np.abs(m).max() / np.abs(v).max()
        fd = (problem.solve(m + h * v).mu1 - problem.solve(m - h * v).mu1) / (2 * h)
        worst_fd = max(worst_fd, abs(fd - exact) / max(abs(fd), 1e-300))
        worst_euler = max(worst_euler, abs(float(q @ m) - pair.mu1))
    return (
        CheckResult("derivative vs central differences (relative)", worst_fd < rtol, worst_fd, rtol),
        CheckResult("Euler identity sum(q*m) = mu1", worst_euler <= 1e-10, worst_euler, 1e-10),
    )


def homogeneity_suite(rng, n: int = 40) -> CheckResult:
    grid = build_grid((0.0, 1.0), n, BoundaryCondition.robin(1.0))
    m = _mixed_weight(rng, n)
    worst = max(homogeneity_check(grid, m, a).rel_error for a in (0.5, 2.0, 3.7))
    return CheckResult("homogeneity mu1(a m) = a mu1(m)", worst <= 1e-12, worst, 1e-12)


def convexity_suite(rng, segments: int = 20, n: int = 40) -> CheckResult:
    grid = build_grid((0.0, 1.0), n, BoundaryCondition.dirichlet())
    problem = WeightedEigenproblem(grid)
    worst = 0.0
    for _ in range(segments):
        r = convexity_probe(_mixed_weight(rng, n), _mixed_weight(rng, n), (0.25, 0.5, 0.75), grid, problem)
        worst = max(worst, r.max_violation)
    return CheckResult("convexity along segments", worst <= 1e-10, worst, 1e-10)


def bracket_suite(rng, pairing_max=hl_max_pairing, pairing_min=hl_min_pairing,
                  members: int = 50, n: int = 12, exhaustive_n: int = 6) -> CheckResult:
    """``sum(s- q) <= sum(m q) <= sum(s+ q)``, and the pairings attain the extremes."""
    worst = 0.0
    cls = RearrangementClass(rng.normal(size=n), 1.0 / n)
    for _ in range(members):
        m = rng.permutation(cls.generator_values)
        q = rng.uniform(0.0, 1.0, n)
        lo, hi = pairing_min(cls, q).values @ q, pairing_max(cls, q).values @ q
        worst = max(worst, lo - m @ q, m @ q - hi)
    small = RearrangementClass(rng.normal(size=exhaustive_n), 1.0 / exhaustive_n)
    for q in (rng.uniform(0.0, 1.0, exhaustive_n), rng.integers(0, 3, exhaustive_n).astype(float)):
        sums = [np.array(p) @ q for p in itertools.permutations(small.generator_values)]
        worst = max(worst, abs(pairing_max(small, q).values @ q - max(sums)),
                    abs(pairing_min(small, q).values @ q - min(sums)))
    tol = 1e-12
    return CheckResult("Hardy-Littlewood bracket and attainment", worst <= tol, worst, tol)


def brute_force_suite(pairing_max=hl_max_pairing, n: int = 6) -> list[CheckResult]:
    """Both optimizers against exhaustive search over all permutations."""
    values = np.array([2.5, 1.7, 0.9, 0.3, -0.4, -1.1])[:n]
    out = []
    for bc in (BoundaryCondition.dirichlet(), BoundaryCondition.robin(1.0)):
        grid = build_grid((0.0, 1.0), n, bc)
        problem = WeightedEigenproblem(grid)
        cls = RearrangementClass(values, grid.element_measure)
        best, _, worst, _ = brute_force_extremes(cls, grid, problem)
        lo = minimize_lambda1(cls, grid, problem=problem, pairing=pairing_max)
        err = abs(lo.final_mu1 - best)
        out.append(CheckResult(f"min lambda1 = exhaustive minimum ({bc.kind})", err <= 1e-12, err, 1e-12))
        hi = maximize_lambda1(cls, grid, problem=problem)
        # the closure minimum of mu1 can only undercut the best vertex
        excess = max(hi.final_mu1 - worst, hi.trace[-1].gap)
        out.append(CheckResult(f"max lambda1 below every vertex, gap closed ({bc.kind})",
                               excess <= 1e-10, max(excess, 0.0), 1e-10))
    return out


def validate_suite(seed: int = 0, pairing_max=hl_max_pairing, pairing_min=hl_min_pairing,
                   derivative=element_square_integrals) -> ValidationReport:
    rng = np.random.default_rng(seed)
    checks = [
        *derivative_check(rng, derivative),
        homogeneity_suite(rng),
        convexity_suite(rng),
        bracket_suite(rng, pairing_max, pairing_min),
        *brute_force_suite(pairing_max),
    ]
    return ValidationReport(tuple(checks))
