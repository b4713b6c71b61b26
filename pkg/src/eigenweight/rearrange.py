"""Rearrangements of piecewise-constant weights on equal-measure cells.

With equal cell measures the class of rearrangements of a weight is the set
of permutations of its cell values, and the weak* closure of the class is the
set of weights majorized by it.  Everything here is exact combinatorics on
sorted values; nothing is perturbed arithmetically.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class RearrangementError(ValueError):
    pass


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Weight:
    """One value per cell; all cells have measure ``element_measure``."""

    values: np.ndarray
    element_measure: float

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 1 or values.size == 0:
            raise RearrangementError("weight values must be a nonempty 1D sequence")
        if not np.all(np.isfinite(values)):
            raise RearrangementError("weight values must be finite")
        if not self.element_measure > 0:
            raise RearrangementError("element_measure must be positive")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "element_measure", float(self.element_measure))

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Weight):
            return NotImplemented
        return self.element_measure == other.element_measure and np.array_equal(self.values, other.values)

    @property
    def volume(self) -> float:
        return self.element_measure * self.values.size

    @property
    def integral(self) -> float:
        return self.element_measure * float(np.sum(self.values))

    def with_values(self, values) -> "Weight":
        return Weight(values, self.element_measure)


@dataclass(frozen=True, eq=False)
class StepRearrangement:
    """Decreasing right-continuous step function on ``(0, |Omega|)``.

    ``levels[i]`` is taken on ``[breakpoints[i-1], breakpoints[i])`` with an
    implicit leading breakpoint at 0.
    """

    breakpoints: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        b, lv = _frozen(self.breakpoints), _frozen(self.levels)
        if b.shape != lv.shape or b.ndim != 1 or b.size == 0:
            raise RearrangementError("breakpoints and levels must be equal-length 1D sequences")
        if b[0] <= 0 or np.any(np.diff(b) <= 0):
            raise RearrangementError("breakpoints must be positive and strictly increasing")
        if np.any(np.diff(lv) > 0):
            raise RearrangementError("levels must be weakly decreasing")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "levels", lv)

    @property
    def volume(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints, prepend=0.0)

    def __call__(self, s):
        idx = np.searchsorted(self.breakpoints, s, side="right")
        return self.levels[np.minimum(idx, self.levels.size - 1)]

    def integral_up_to(self, t):
        """Cumulative integral over ``(0, t)``; piecewise linear in ``t``."""
        knots = np.concatenate([[0.0], self.breakpoints])
        cum = np.concatenate([[0.0], np.cumsum(self.widths * self.levels)])
        return np.interp(t, knots, cum)

    def l1_distance(self, other: "StepRearrangement") -> float:
        if not np.isclose(self.volume, other.volume, rtol=1e-12, atol=0):
            raise RearrangementError("step functions live on different intervals")
        knots = np.union1d(self.breakpoints, other.breakpoints)
        knots = knots[knots <= min(self.volume, other.volume)]
        left = np.concatenate([[0.0], knots[:-1]])
        return float(np.sum(np.abs(self(left) - other(left)) * (knots - left)))


def distribution_function(w: Weight, t):
    """Measure of the superlevel set ``{w > t}``."""
    t = np.asarray(t, dtype=float)
    return w.element_measure * np.sum(w.values[..., None] > t[None, ...] if t.ndim else w.values > t, axis=0)


def _merge_levels(sorted_desc: np.ndarray, element_measure: float) -> StepRearrangement:
    n = sorted_desc.size
    change = np.flatnonzero(np.diff(sorted_desc) != 0)
    ends = np.concatenate([change + 1, [n]])
    return StepRearrangement(ends * element_measure, sorted_desc[ends - 1])


def decreasing_rearrangement(w: Weight) -> StepRearrangement:
    return _merge_levels(np.sort(w.values)[::-1], w.element_measure)


def _check_compatible(f: Weight, g: Weight):
    if len(f) != len(g) or f.element_measure != g.element_measure:
        raise RearrangementError("weights live on different grids")


def majorizes(f: Weight, g: Weight, tol: float = 0.0) -> bool:
    """True iff ``g`` is majorized by ``f``.

    Partial integrals of the decreasing rearrangements are piecewise linear
    between cell breakpoints, so comparing them at the breakpoints is exact.
    ``tol`` is an absolute slack on the integrals for approximate weights.
    """
    _check_compatible(f, g)
    cf = np.cumsum(np.sort(f.values)[::-1]) * f.element_measure
    cg = np.cumsum(np.sort(g.values)[::-1]) * g.element_measure
    slack = tol + 4 * np.finfo(float).eps * np.cumsum(np.sort(np.abs(f.values))[::-1])[-1] * f.element_measure
    return bool(np.all(cg <= cf + slack) and abs(cg[-1] - cf[-1]) <= slack)


@dataclass(frozen=True, eq=False)
class RearrangementClass:
    """All permutations of a generator's cell values."""

    generator_values: np.ndarray
    element_measure: float

    def __post_init__(self):
        values = np.sort(np.asarray(self.generator_values, dtype=float))[::-1]
        object.__setattr__(self, "generator_values", _frozen(values))
        object.__setattr__(self, "element_measure", float(self.element_measure))

    @classmethod
    def of(cls, m0: Weight) -> "RearrangementClass":
        return cls(m0.values, m0.element_measure)

    @property
    def element_count(self) -> int:
        return self.generator_values.size

    @property
    def volume(self) -> float:
        return self.element_measure * self.element_count

    @property
    def integral(self) -> float:
        return self.element_measure * float(np.sum(self.generator_values))

    @property
    def mean(self) -> float:
        return float(np.mean(self.generator_values))

    def generator(self) -> Weight:
        """The sorted-descending member."""
        return Weight(self.generator_values, self.element_measure)

    def ascending(self) -> Weight:
        return Weight(self.generator_values[::-1], self.element_measure)

    def mean_weight(self) -> Weight:
        return Weight(np.full(self.element_count, self.mean), self.element_measure)


def _check_class(cls: RearrangementClass, w: Weight):
    if len(w) != cls.element_count or w.element_measure != cls.element_measure:
        raise RearrangementError("weight and class live on different grids")


def class_contains(cls: RearrangementClass, w: Weight, tol: float = 0.0) -> bool:
    _check_class(cls, w)
    diff = np.abs(np.sort(w.values)[::-1] - cls.generator_values)
    return bool(np.all(diff <= tol))


def closure_contains(cls: RearrangementClass, w: Weight, tol: float = 0.0) -> bool:
    _check_class(cls, w)
    return majorizes(cls.generator(), w, tol)


def _pairing_order(cls: RearrangementClass, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (cls.element_count,):
        raise RearrangementError(f"expected {cls.element_count} cell values, got {q.size}")
    if np.any(q < 0):
        raise RearrangementError("pairing weights must be nonnegative")
    # descending q, ties by ascending cell index
    return np.argsort(-q, kind="stable")


def hl_max_pairing(cls: RearrangementClass, q) -> Weight:
    """Member of the class maximizing ``sum(m * q)``: largest values on largest ``q``."""
    order = _pairing_order(cls, q)
    values = np.empty(cls.element_count)
    values[order] = cls.generator_values
    return Weight(values, cls.element_measure)


def hl_min_pairing(cls: RearrangementClass, q) -> Weight:
    """Member of the class minimizing ``sum(m * q)``: smallest values on largest ``q``."""
    order = _pairing_order(cls, q)
    values = np.empty(cls.element_count)
    values[order] = cls.generator_values[::-1]
    return Weight(values, cls.element_measure)


def truncation_rearrangement(cls: RearrangementClass) -> tuple[float, StepRearrangement]:
    """Cut the decreasing rearrangement where its tail integral vanishes.

    Returns ``gamma`` and the step function equal to the decreasing
    rearrangement on ``(0, gamma)`` and to 0 afterwards.  For nonnegative
    generators the rearrangement is returned unchanged with ``gamma`` the
    measure of the positivity set.
    """
    v = cls.generator_values
    h = cls.element_measure
    total = h * float(np.sum(v))
    if total <= 0:
        raise RearrangementError(
            "integral of the generator is not positive: the principal eigenvalue is unbounded "
            "over the class and the closure minimizer is the constant mean"
        )
    star = _merge_levels(v, h)
    if v[-1] >= 0:
        return h * float(np.count_nonzero(v > 0)), star

    # head integral H(s) = int_0^s m0*; the tail vanishes where H(s) = total
    # inside the last step with a positive level
    head = np.cumsum(v) * h
    k = int(np.flatnonzero(head >= total)[0])
    before = head[k - 1] if k > 0 else 0.0
    gamma = (k + 1) * h if head[k] == total else k * h + (total - before) / v[k]

    inner = star.breakpoints < gamma
    bps = [*star.breakpoints[inner], gamma, star.volume]
    lvls = [*star.levels[inner], star.levels[np.count_nonzero(inner)], 0.0]
    return float(gamma), StepRearrangement(bps, lvls)


def checkerboard_rearrangement(cls: RearrangementClass, stripes: int, shape=None) -> Weight:
    """Interleave the upper and lower halves of the sorted values in stripes.

    The first axis is cut into ``2 * stripes`` equal bands; bands alternate
    between the upper half and the lower half of the descending values, each
    consumed in order.  ``stripes=1`` gives the values sorted descending along
    the first axis.  ``shape`` is the cell grid shape (x first); 1D by default.
    """
    shape = (cls.element_count,) if shape is None else tuple(shape)
    if int(np.prod(shape)) != cls.element_count:
        raise RearrangementError("shape does not match the class size")
    nx = shape[0]
    rows = cls.element_count // nx
    if stripes < 1 or nx % (2 * stripes):
        raise RearrangementError(f"{2 * stripes} bands do not divide {nx} cells along the first axis")
    width = nx // (2 * stripes)
    half = cls.element_count // 2
    upper, lower = iter(cls.generator_values[:half]), iter(cls.generator_values[half:])
    grid = np.empty((rows, nx))  # row-major: y outer, x inner
    for band in range(2 * stripes):
        source = upper if band % 2 == 0 else lower
        cols = slice(band * width, (band + 1) * width)
        for x in range(cols.start, cols.stop):
            for y in range(rows):
                grid[y, x] = next(source)
    return Weight(grid.ravel(), cls.element_measure)
