"""Optimization of the principal eigenvalue over a rearrangement class.

``lambda1 = 1 / mu1``, so minimizing ``lambda1`` over the class means
maximizing the convex function ``mu1``: its maximum over the closure is taken
at a class member, and the monotone Hardy-Littlewood ascent below stops at a
weight that is increasing-comonotone with ``u**2``.  Maximizing ``lambda1``
means minimizing ``mu1`` over the closure; that is a convex problem solved by
conditional gradient, with the Hardy-Littlewood min pairing as linear oracle.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize

from .eigen import EigenPair, EigenSolverError, NoPositiveEigenvalue, WeightedEigenproblem
from .mesh import DIRICHLET, Grid
from .rearrange import (
    RearrangementClass,
    RearrangementError,
    StepRearrangement,
    Weight,
    checkerboard_rearrangement,
    class_contains,
    closure_contains,
    hl_max_pairing,
    hl_min_pairing,
    truncation_rearrangement,
)


NEWTON_LIMIT = 256
MU_ROUNDING = 1e-14
STALL_ROUNDS = 3
SNAP_SLACK = 1e-7


class Status(enum.Enum):
    CONVERGED = "converged"
    ITER_LIMIT = "iteration-limit"
    NO_MAXIMIZER = "no-maximizer-regime"


class RegimeError(ValueError):
    """The requested problem is not posed for this class."""


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    mu1: float
    gap: float

    @property
    def lambda1(self) -> float:
        return 1.0 / self.mu1 if self.mu1 > 0 else float("inf")


@dataclass(eq=False)
class OptResult:
    final_weight: Weight
    final_mu1: float
    trace: list[TraceRow]
    status: Status
    in_class: bool
    eigenpair: EigenPair | None = None
    gamma: float | None = None
    analytic: StepRearrangement | None = None
    polish_steps: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def final_lambda1(self) -> float:
        return 1.0 / self.final_mu1 if self.final_mu1 > 0 else float("inf")

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def _problem(grid: Grid, problem: WeightedEigenproblem | None) -> WeightedEigenproblem:
    return problem if problem is not None else WeightedEigenproblem(grid)


def _check_sizes(cls: RearrangementClass, grid: Grid):
    if cls.element_count != grid.n_elements or not np.isclose(cls.element_measure, grid.element_measure):
        raise RearrangementError("class and grid have different cells")


def _initial_min_weight(cls: RearrangementClass, grid: Grid) -> Weight:
    for k in (2, 1):
        try:
            return checkerboard_rearrangement(cls, k, grid.shape)
        except RearrangementError:
            pass
    return cls.ascending()


# --------------------------------------------------------------------------
# minimization of lambda1: monotone ascent of mu1 over the class


def _centered_weight(cls: RearrangementClass, grid: Grid) -> Weight:
    """Largest values on the cells nearest the centre of the domain."""
    centre = np.array([(lo + hi) / 2 for lo, hi in grid.extents])
    dist = np.linalg.norm(grid.cell_centers - centre, axis=1)
    values = np.empty(cls.element_count)
    values[np.argsort(dist, kind="stable")] = cls.generator_values
    return Weight(values, cls.element_measure)


def _neighbours(m: np.ndarray):
    """Swaps, segment reversals and single-value moves along the cell order."""
    n = m.size
    for i, j in itertools.combinations(range(n), 2):
        if m[i] == m[j]:
            continue
        c = m.copy()
        c[i], c[j] = c[j], c[i]
        yield c
        if j - i > 1:
            c = m.copy()
            c[i:j + 1] = m[i:j + 1][::-1]
            yield c
            yield np.concatenate([m[:i], m[i + 1:j + 1], [m[i]], m[j + 1:]])
            yield np.concatenate([m[:i], [m[j]], m[i:j], m[j + 1:]])


def _ascend(cls, problem, m: Weight, pair: EigenPair, tol, max_iter, trace, start_iter=0, pairing=hl_max_pairing):
    """The alternating Hardy-Littlewood ascent from ``m``; appends to ``trace``."""
    it = start_iter
    while True:
        q = problem.gradient(pair)
        nxt = pairing(cls, q)
        gain = float((nxt.values - m.values) @ q)
        trace.append(TraceRow(it, pair.mu1, gain))
        if gain < tol or np.array_equal(nxt.values, m.values):
            return m, pair, True
        if it - start_iter + 1 >= max_iter:
            return m, pair, False
        m, pair = nxt, problem.solve(nxt.values)
        it += 1


def minimize_lambda1(
    cls: RearrangementClass,
    grid: Grid,
    tol: float = 1e-10,
    max_iter: int = 500,
    initial: Weight | None = None,
    problem: WeightedEigenproblem | None = None,
    restarts: bool = True,
    local_search: bool | None = None,
    pairing=hl_max_pairing,
) -> OptResult:
    """Maximize ``mu1`` over the class by alternating Hardy-Littlewood pairing.

    The basic step is ``m <- hl_max_pairing(cls, q)`` with ``q`` the cell
    integrals of ``u_m**2``.  It cannot decrease ``mu1``: the new weight pairs
    best with the old eigenfunction, whose Rayleigh quotient bounds the new
    ``mu1`` from below.  It stops at a weight comonotone with ``u**2``.

    Such fixed points need not be global on coarse grids, so with
    ``restarts`` the ascent is repeated from the sorted, reversed and
    centred arrangements and the best fixed point kept.  With
    ``local_search`` (default: at most 16 cells) the result is further
    improved by swaps, segment reversals and single-value moves, each
    accepted improvement followed by a new ascent.  The trace only records
    improvements, so ``mu1`` is weakly increasing along it.  ``pairing``
    replaces the Hardy-Littlewood max pairing (for tamper tests).
    """
    _check_sizes(cls, grid)
    if cls.generator_values[0] <= 0:
        raise RegimeError("no generator value is positive: there is no positive principal eigenvalue to optimize")
    problem = _problem(grid, problem)
    m = initial if initial is not None else _initial_min_weight(cls, grid)
    if not class_contains(cls, m):
        raise RearrangementError("initial weight is not a member of the class")
    if local_search is None:
        local_search = cls.element_count <= 16

    trace: list[TraceRow] = []
    m, pair, done = _ascend(cls, problem, m, problem.solve(m.values), tol, max_iter, trace, pairing=pairing)
    starts = 1
    if done and restarts:
        for start in (cls.generator(), cls.ascending(), _centered_weight(cls, grid)):
            cand, cpair, ok = _ascend(cls, problem, start, problem.solve(start.values), tol, max_iter, [], pairing=pairing)
            starts += 1
            if ok and cpair.mu1 > pair.mu1:
                m, pair = cand, cpair
                q = problem.gradient(pair)
                trace.append(TraceRow(len(trace), pair.mu1, float((pairing(cls, q).values - m.values) @ q)))
    moves = 0
    if done and local_search:
        improved = True
        while improved:
            improved = False
            for c in _neighbours(m.values):
                if problem.mu1(c) > pair.mu1 * (1 + 1e-13):
                    sub: list[TraceRow] = []
                    cand = Weight(c, cls.element_measure)
                    m, pair, done = _ascend(cls, problem, cand, problem.solve(c), tol, max_iter, sub, len(trace), pairing)
                    trace.extend(sub)
                    moves += 1
                    improved = done
                    break
    result = OptResult(
        final_weight=m,
        final_mu1=pair.mu1,
        trace=trace,
        status=Status.CONVERGED if done else Status.ITER_LIMIT,
        in_class=True,
        eigenpair=pair,
    )
    result.extra.update(starts=starts, local_moves=moves)
    return result


# --------------------------------------------------------------------------
# maximization of lambda1: conditional gradient on mu1 over the closure


def golden_section(f, a: float = 0.0, b: float = 1.0, tol: float = 1e-8) -> float:
    """Minimizer of a unimodal ``f`` on ``[a, b]`` to within ``tol``."""
    r = (np.sqrt(5.0) - 1.0) / 2.0
    c, d = b - r * (b - a), a + r * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - r * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + r * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


class _Objective:
    """mu1 and its per-cell gradient, memoized on the exact weight bytes.

    Iterates are solved without the positivity test: the top eigenvalue and
    its gradient are what the descent needs, and on coarse grids points near
    the optimum can lose positivity of the discrete eigenvector.  The final
    weight is solved again with the test.
    """

    def __init__(self, problem: WeightedEigenproblem):
        self.problem = problem
        self._cache: dict[bytes, tuple[float, np.ndarray, EigenPair]] = {}
        self.evaluations = 0

    def __call__(self, m: np.ndarray):
        key = np.ascontiguousarray(m, dtype=float).tobytes()
        hit = self._cache.get(key)
        if hit is None:
            pair = self.problem.solve(m, require_positive=False)
            hit = (pair.mu1, self.problem.gradient(pair), pair)
            self.evaluations += 1
            if len(self._cache) > 4096:
                self._cache.clear()
            self._cache[key] = hit
        return hit

    def value(self, m):
        return self(m)[0]


class _Cone:
    """The closure intersected with the order cone of ``m``.

    Cells are ordered by increasing ``m`` (ties: decreasing gradient).  Inside
    that cone the descending order of any feasible weight is known, so the
    majorization constraints become linear: ascending order along the
    permutation, tail sums bounded by head sums of the generator, equal
    totals.  Coordinates ``y`` are the cell values in that order, and the
    constraints read ``A @ y >= b``, ``sum(y) = total``.
    """

    def __init__(self, cls: RearrangementClass, m: np.ndarray, q: np.ndarray):
        n = m.size
        self.cls = cls
        self.order = np.lexsort((-q, m))
        self.y0 = m[self.order]
        heads = np.cumsum(cls.generator_values)
        self.heads = heads
        ascend = np.zeros((n - 1, n))
        ascend[np.arange(n - 1), np.arange(1, n)] = 1.0
        ascend[np.arange(n - 1), np.arange(n - 1)] = -1.0
        tails = np.tril(np.ones((n, n)))[:, ::-1][:-1]
        self.A = np.vstack([ascend, -tails])
        self.b = np.concatenate([np.zeros(n - 1), -heads[:-1]])
        self.total = heads[-1]
        A, b = self.A, self.b
        self.constraints = [
            {"type": "ineq", "fun": lambda y: A @ y - b, "jac": lambda y: A},
            {"type": "eq", "fun": lambda y: np.array([heads[-1] - y.sum()]), "jac": lambda y: -np.ones((1, n))},
        ]

    def unpermute(self, y) -> np.ndarray:
        out = np.empty(y.size)
        out[self.order] = y
        return out

    def feasible(self, cand: np.ndarray) -> bool:
        slack = 1e-13 * np.abs(self.heads).max()
        return closure_contains(self.cls, Weight(cand, self.cls.element_measure), tol=slack)

    def solve(self, fun, jac, max_iter: int = 500) -> np.ndarray | None:
        res = minimize(fun, self.y0, jac=jac, constraints=self.constraints, method="SLSQP",
                       options={"ftol": 1e-16, "maxiter": max_iter})
        cand = self.unpermute(res.x)
        return cand if self.feasible(cand) else None

    def newton_step(self, H: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Active-set step for ``min g.d + d.H.d / 2`` from ``y0``, then a ratio test."""
        y0, A, n = self.y0, self.A, self.y0.size
        slack = A @ y0 - self.b
        active = list(np.flatnonzero(slack <= 1e-12 * np.abs(self.heads).max()))
        for _ in range(len(active) + 1):
            Aa = np.vstack([np.ones((1, n)), A[active]])
            resid = np.concatenate([[y0.sum() - self.total], slack[active]])
            k = Aa.shape[0]
            kkt = np.block([[H, -Aa.T], [Aa, np.zeros((k, k))]])
            sol = np.linalg.lstsq(kkt, np.concatenate([-g, -resid]), rcond=None)[0]
            d, lam = sol[:n], sol[n + 1:]
            if active and lam.min() < 0:
                # leaving this face lowers the model further
                active.pop(int(np.argmin(lam)))
                continue
            break
        Ad = A @ d
        inactive = np.setdiff1d(np.arange(A.shape[0]), active)
        blocking = inactive[Ad[inactive] < 0]
        alpha = 1.0
        if blocking.size:
            alpha = min(1.0, float(np.min(np.maximum(slack[blocking], 0.0) / -Ad[blocking])))
        return self.unpermute(y0 + alpha * d)


    def snap(self, threshold: float) -> np.ndarray:
        """Orthogonal projection of ``y0`` onto the face of constraints with slack below ``threshold``."""
        slack = self.A @ self.y0 - self.b
        active = np.flatnonzero(slack <= threshold)
        Aa = np.vstack([np.ones((1, self.y0.size)), self.A[active]])
        resid = np.concatenate([[self.y0.sum() - self.total], slack[active]])
        return self.unpermute(self.y0 - np.linalg.lstsq(Aa, resid, rcond=None)[0])


def _snap_to_face(obj: _Objective, cls: RearrangementClass, m: np.ndarray, tol: float):
    """Round a converged iterate onto the face it nearly lies on; None if that breaks anything.

    Where ``u`` is flat the gap certifies ``mu1`` but leaves the weight
    undetermined at the level of the solver noise, so runs from different
    starts end at different points.  Constraints within ``SNAP_SLACK`` (relative
    to the value scale) of being tight are made tight; the result must stay
    feasible, not raise ``mu1`` beyond rounding and keep the gap below ``tol``.
    """
    mu, q, _ = obj(m)
    cone = _Cone(cls, m, q)
    cand = cone.snap(SNAP_SLACK * np.abs(cls.generator_values).max())
    if np.array_equal(cand, m) or not cone.feasible(cand):
        return None
    try:
        if obj.value(cand) > mu * (1 + MU_ROUNDING) or _fw_gap(obj, cls, cand) >= tol:
            return None
    except (EigenSolverError, NoPositiveEigenvalue):
        return None
    return cand


def _order_polish(obj: _Objective, cls: RearrangementClass, m: np.ndarray):
    """Minimize ``mu1`` itself over the order cone of ``m``; None if no progress."""
    mu, q, _ = obj(m)
    cone = _Cone(cls, m, q)
    scale = 1.0 / max(mu, 1e-300)
    try:
        cand = cone.solve(lambda y: scale * obj.value(cone.unpermute(y)),
                          lambda y: scale * obj(cone.unpermute(y))[1][cone.order])
    except (EigenSolverError, NoPositiveEigenvalue):
        # SLSQP probes points outside the closure, where the weight may have
        # no positive eigenvalue
        return None
    if cand is None or obj.value(cand) > mu:
        return None
    return cand


def _hessian(obj: _Objective, m: np.ndarray) -> np.ndarray:
    """Central differences of the exact gradient, one cell at a time."""
    n = m.size
    eps = 1e-5 * max(np.abs(m).max(), 1e-300)
    H = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = eps
        H[:, i] = (obj(m + e)[1] - obj(m - e)[1]) / (2 * eps)
    return (H + H.T) / 2


def _newton_polish(obj: _Objective, cls: RearrangementClass, m: np.ndarray, gap: float):
    """Newton step on the active constraints of the order cone of ``m``.

    Close to the optimum ``mu1`` varies below its own rounding error, so a
    solver driven by ``mu1`` values stalls while the duality gap is still
    far above tolerance.  The gradient is still accurate there, and a
    Newton step with a difference Hessian uses only gradients.  The step is
    kept if it is feasible and lowers the gap without raising ``mu1``
    beyond rounding.
    """
    mu, q, _ = obj(m)
    cone = _Cone(cls, m, q)
    try:
        H = _hessian(obj, m)[np.ix_(cone.order, cone.order)]
    except (EigenSolverError, NoPositiveEigenvalue):
        return None
    cand = cone.newton_step(H, q[cone.order])
    if not cone.feasible(cand):
        return None
    try:
        if obj.value(cand) > mu * (1 + MU_ROUNDING) or _fw_gap(obj, cls, cand) >= gap:
            return None
    except (EigenSolverError, NoPositiveEigenvalue):
        return None
    return cand


def _value_and_gap(obj: _Objective, cls: RearrangementClass, m: np.ndarray) -> tuple[float, float]:
    return obj.value(m), _fw_gap(obj, cls, m)


def _fw_gap(obj: _Objective, cls: RearrangementClass, m: np.ndarray) -> float:
    q = obj(m)[1]
    return float((m - hl_min_pairing(cls, q).values) @ q)


def _slope_root(obj: _Objective, m: np.ndarray, d: np.ndarray) -> float:
    """Exact line search on ``[0, 1]`` from directional derivatives alone.

    ``t -> q(m + t d) @ d`` is increasing by convexity and negative at 0
    (minus the gap).  Its root stays accurate when ``mu1`` along the segment
    varies below rounding, which is where golden section goes blind.
    """
    def slope(t):
        return float(obj(m + t * d)[1] @ d)

    if slope(1.0) <= 0:
        return 1.0
    return brentq(slope, 0.0, 1.0, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)


def maximize_lambda1(
    cls: RearrangementClass,
    grid: Grid,
    tol: float = 1e-10,
    max_iter: int = 500,
    initial: Weight | None = None,
    line_search_tol: float = 1e-8,
    warmup: int = 20,
    polish: bool = True,
    problem: WeightedEigenproblem | None = None,
) -> OptResult:
    """Minimize ``mu1`` over the weak* closure of the class.

    Every iteration computes the gradient ``q`` (cell integrals of ``u**2``),
    the oracle vertex ``s = hl_min_pairing(cls, q)`` and the duality gap
    ``(m - s) @ q``, which bounds ``mu1(m) - min mu1`` by convexity.  The
    first ``warmup`` iterations are plain conditional-gradient steps with
    golden-section line search (the vertex ``t = 1`` is also tried); when
    that finds no decrease, the step goes to the root of the directional
    derivative instead.
    Afterwards each iteration first polishes the iterate over the closure
    restricted to its own order cone (a convex problem with linear
    constraints, solved by SLSQP on ``mu1``), follows with a Newton step on
    the active constraints of that cone (at most ``NEWTON_LIMIT`` cells)
    and then takes a conditional-gradient step.  Every accepted
    iterate is feasible and ``mu1`` never increases by more than rounding
    (relative ``MU_ROUNDING``).

    If the iterate does not change for ``STALL_ROUNDS`` rounds while the gap
    is still above ``tol`` the run ends early with status ``ITER_LIMIT`` and
    ``extra["stalled"]``: the gradient no longer resolves further progress.
    This happens when ``u`` is nearly flat on a set of cells, where
    redistributing the weight changes ``mu1`` only below rounding.

    A converged iterate is finally snapped onto the face of its order cone
    that it nearly lies on (see ``_snap_to_face``), so that runs from
    different starts agree where ``mu1`` alone cannot tell them apart.

    With a nonpositive total the minimum is 0, attained by the constant
    mean; the result then carries status ``NO_MAXIMIZER``.
    """
    _check_sizes(cls, grid)
    if cls.integral <= 0:
        mean = cls.mean_weight()
        return OptResult(mean, 0.0, [], Status.NO_MAXIMIZER, in_class=class_contains(cls, mean))

    problem = _problem(grid, problem)
    obj = _Objective(problem)
    m = (initial if initial is not None else cls.ascending()).values.astype(float)
    if not closure_contains(cls, Weight(m, cls.element_measure), tol=1e-12):
        raise RearrangementError("initial weight is outside the closure of the class")

    trace: list[TraceRow] = []
    status = Status.ITER_LIMIT
    polished = newton = frozen = 0
    stalled = False
    previous = m.copy()
    for it in range(max_iter):
        if polish and it >= warmup:
            cand = _order_polish(obj, cls, m)
            if cand is not None:
                m = cand
                polished += 1
            gap = _fw_gap(obj, cls, m)
            if gap >= tol and m.size <= NEWTON_LIMIT:
                cand = _newton_polish(obj, cls, m, gap)
                if cand is not None:
                    m = cand
                    newton += 1
        mu, q, _ = obj(m)
        s = hl_min_pairing(cls, q).values
        gap = float((m - s) @ q)
        trace.append(TraceRow(it, mu, gap))
        if gap < tol:
            status = Status.CONVERGED
            cand = _snap_to_face(obj, cls, m, tol)
            if cand is not None:
                m = cand
                trace.append(TraceRow(it + 1, *_value_and_gap(obj, cls, cand)))
            break
        d = s - m
        t = golden_section(lambda t: obj.value(m + t * d), 0.0, 1.0, line_search_tol)
        # golden section never lands on the vertex itself
        best = min((m + t * d, s), key=obj.value)
        if obj.value(best) < mu:
            m = best
        else:
            cand = m + _slope_root(obj, m, d) * d
            if obj.value(cand) <= mu * (1 + MU_ROUNDING) and _fw_gap(obj, cls, cand) < gap:
                m = cand
        # an unchanged iterate stays unchanged: nothing left to resolve at this precision
        frozen = frozen + 1 if np.array_equal(m, previous) else 0
        previous = m.copy()
        if frozen >= STALL_ROUNDS:
            stalled = True
            break

    final = Weight(m, cls.element_measure)
    pair = problem.solve(m)
    mu = pair.mu1
    result = OptResult(
        final_weight=final,
        final_mu1=mu,
        trace=trace,
        status=status,
        in_class=class_contains(cls, final, tol=1e-9),
        eigenpair=pair,
        polish_steps=polished,
    )
    result.extra.update(evaluations=obj.evaluations, newton_steps=newton, stalled=stalled)
    if grid.bc_kind == DIRICHLET:
        result.gamma, result.analytic = truncation_rearrangement(cls)
    return result


# --------------------------------------------------------------------------
# probes


@dataclass(frozen=True)
class SweepRow:
    stripes: int
    mu1: float

    @property
    def lambda1(self) -> float:
        return 1.0 / self.mu1 if self.mu1 > 0 else float("inf")


def fragmentation_sweep(
    cls: RearrangementClass,
    stripe_counts,
    grid: Grid,
    problem: WeightedEigenproblem | None = None,
) -> tuple[list[SweepRow], float]:
    """``mu1`` of increasingly fragmented class members, plus ``mu1`` of the mean.

    Only meaningful when the total is nonpositive: then ``mu1`` can be driven
    to 0 along the class while the constant mean attains 0 in the closure.
    """
    _check_sizes(cls, grid)
    if cls.integral > 0:
        raise RegimeError("positive total: the closure minimizer is unique and positive; use maximize_lambda1")
    if cls.generator_values[0] <= 0:
        raise RegimeError("no generator value is positive")
    problem = _problem(grid, problem)
    rows = [
        SweepRow(int(k), problem.mu1(checkerboard_rearrangement(cls, int(k), grid.shape).values))
        for k in stripe_counts
    ]
    return rows, problem.mu1(cls.mean_weight().values)


@dataclass(frozen=True)
class ComonotoneReport:
    holds: bool
    violations: list[tuple[int, int]]


def comonotone_check(weight, q, direction: str = "increasing", atol: float = 0.0) -> ComonotoneReport:
    """Pairs ``(i, j)`` where ``m`` fails to be a monotone function of ``q``.

    Increasing: ``(q_i - q_j) * (m_i - m_j) >= 0`` for all pairs; decreasing
    flips the sign.  ``atol`` tolerates products down to ``-atol``.
    """
    m = np.asarray(getattr(weight, "values", weight), dtype=float)
    q = np.asarray(q, dtype=float)
    if m.shape != q.shape:
        raise ValueError("weight and q differ in length")
    sign = {"increasing": 1.0, "decreasing": -1.0}[direction]
    prod = sign * (q[:, None] - q[None, :]) * (m[:, None] - m[None, :])
    i, j = np.nonzero(np.triu(prod < -atol, k=1))
    bad = list(zip(i.tolist(), j.tolist()))
    return ComonotoneReport(not bad, bad)


@dataclass(frozen=True)
class ConvexityReport:
    t_values: tuple[float, ...]
    max_violation: float
    strictness_margin: float | None
    passed: bool


def convexity_probe(m, q, t_grid, grid: Grid, problem: WeightedEigenproblem | None = None,
                    atol: float = 1e-10) -> ConvexityReport:
    """Check ``mu1(t m + (1-t) q) <= t mu1(m) + (1-t) mu1(q)`` along ``t_grid``.

    ``mu1`` is extended by 0 where the weight has no positive part.  The
    strictness margin is the gap at ``t = 1/2`` and is reported only for
    linearly independent endpoints with positive ``mu1``.
    """
    problem = _problem(grid, problem)
    m = np.asarray(getattr(m, "values", m), dtype=float)
    q = np.asarray(getattr(q, "values", q), dtype=float)
    fm, fq = problem.mu1(m), problem.mu1(q)
    worst = 0.0
    ts = tuple(float(t) for t in t_grid)
    for t in ts:
        worst = max(worst, problem.mu1(t * m + (1 - t) * q) - (t * fm + (1 - t) * fq))
    margin = None
    if fm > 0 and fq > 0 and np.linalg.matrix_rank(np.vstack([m, q]), tol=1e-12) == 2:
        margin = 0.5 * (fm + fq) - problem.mu1(0.5 * (m + q))
    return ConvexityReport(ts, worst, margin, worst <= atol)


def persistence_threshold(pair: EigenPair | None) -> float:
    """Critical diffusion rate ``d* = 1 / lambda1 = mu1``.

    The logistic model persists for ``d < d*``.  ``None`` (no positive
    eigenvalue) gives 0: extinction for every diffusion rate.
    """
    return 0.0 if pair is None else pair.mu1


def brute_force_extremes(cls: RearrangementClass, grid: Grid, problem: WeightedEigenproblem | None = None):
    """Exhaustive ``(max mu1, argmax, min mu1, argmin)`` over all distinct class members."""
    if cls.element_count > 9:
        raise ValueError("exhaustive search limited to 9 cells")
    problem = _problem(grid, problem)
    best = (-np.inf, None)
    worst = (np.inf, None)
    for perm in set(itertools.permutations(cls.generator_values.tolist())):
        v = np.array(perm)
        mu = problem.mu1(v)
        if mu > best[0]:
            best = (mu, v)
        if mu < worst[0]:
            worst = (mu, v)
    return best[0], best[1], worst[0], worst[1]
