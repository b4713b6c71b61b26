"""Flat ``key = value`` run configuration.

One key per line, ``#`` starts a comment, lists are comma separated::

    domain = 0, 1
    elements = 64
    bc = dirichlet
    weight_two_valued = 2, 0.5, -1
    task = maximize
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mesh import DIRICHLET, ROBIN, BoundaryCondition, Grid, build_grid

TASKS = ("solve", "minimize", "maximize", "sweep", "probe", "validate")
WEIGHT_KEYS = ("weight", "weight_two_valued", "weight_file")
KEYS = (
    "domain", "elements", "bc", "sigma", *WEIGHT_KEYS,
    "task", "tol", "max_iter", "seed", "output_dir", "stripes",
)


class ConfigError(ValueError):
    pass


class RegimeMismatch(ConfigError):
    """The task is not posed for the configured weight."""


@dataclass(frozen=True)
class WeightSpec:
    kind: str  # "values" | "two_valued" | "file"
    data: tuple

    def values(self, n_elements: int) -> np.ndarray:
        if self.kind == "values":
            v = np.asarray(self.data, dtype=float)
            if v.size == 1:
                return np.full(n_elements, v[0])
            if v.size != n_elements:
                raise ConfigError(f"weight has {v.size} values but the grid has {n_elements} cells")
            return v
        if self.kind == "two_valued":
            hi, frac, lo = self.data
            count = frac * n_elements
            k = int(round(count))
            if abs(count - k) > 1e-9 or not 0 <= k <= n_elements:
                raise ConfigError(f"fraction {frac} of {n_elements} cells is not a whole number of cells")
            return np.r_[np.full(k, hi), np.full(n_elements - k, lo)]
        from .artifacts import read_weight_csv

        v = read_weight_csv(self.data[0])
        if v.size != n_elements:
            raise ConfigError(f"{self.data[0]} has {v.size} values but the grid has {n_elements} cells")
        return v


@dataclass(frozen=True)
class RunConfig:
    domain: tuple
    elements: tuple[int, ...]
    bc: BoundaryCondition
    weight_spec: WeightSpec
    task: str
    tol: float = 1e-10
    max_iter: int = 500
    seed: int = 0
    output_dir: str = "eigenweight-out"
    stripes: tuple[int, ...] = (2, 4, 8, 16)

    def grid(self) -> Grid:
        elements = self.elements[0] if len(self.elements) == 1 else self.elements
        return build_grid(self.domain, elements, self.bc)

    def weight_values(self, grid: Grid | None = None) -> np.ndarray:
        grid = grid if grid is not None else self.grid()
        return self.weight_spec.values(grid.n_elements)


def _floats(key, raw):
    try:
        return tuple(float(x) for x in raw.split(","))
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {raw!r}") from None


def _ints(key, raw):
    try:
        return tuple(int(x) for x in raw.split(","))
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated integers, got {raw!r}") from None


def _scalar(key, raw, kind):
    vals = _ints(key, raw) if kind is int else _floats(key, raw)
    if len(vals) != 1:
        raise ConfigError(f"{key}: expected a single value, got {raw!r}")
    return vals[0]


def _lines(text):
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not raw:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        entries[key] = raw
    return entries


def parse_config(text: str, base_dir=None, overrides: dict | None = None) -> RunConfig:
    """Parse and validate a configuration, including its task regime.

    ``overrides`` replaces raw values (strings) before validation, e.g. the
    task chosen on the command line.  Relative ``weight_file`` paths are
    resolved against ``base_dir``.
    """
    entries = _lines(text)
    for key, raw in (overrides or {}).items():
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}")
        entries[key] = str(raw)

    for key in ("domain", "elements", "bc", "task"):
        if key not in entries:
            raise ConfigError(f"missing required key {key!r}")

    domain = _floats("domain", entries["domain"])
    if len(domain) == 2:
        domain_t = domain
    elif len(domain) == 4:
        domain_t = ((domain[0], domain[1]), (domain[2], domain[3]))
    else:
        raise ConfigError("domain: expected 'a, b' or 'x0, x1, y0, y1'")
    elements = _ints("elements", entries["elements"])
    if len(elements) not in (1, len(domain) // 2):
        raise ConfigError("elements: one count, or one per axis")

    kind = entries["bc"].lower()
    if kind == DIRICHLET:
        if "sigma" in entries:
            raise ConfigError("sigma: only meaningful with bc = robin")
        bc = BoundaryCondition.dirichlet()
    elif kind == ROBIN:
        if "sigma" not in entries:
            raise ConfigError("missing required key 'sigma' for bc = robin")
        sigma = _floats("sigma", entries["sigma"])
        bc = BoundaryCondition.robin(sigma[0] if len(sigma) == 1 else sigma)
    else:
        raise ConfigError(f"bc: expected 'dirichlet' or 'robin', got {entries['bc']!r}")

    task = entries["task"].lower()
    if task not in TASKS:
        raise ConfigError(f"task: expected one of {', '.join(TASKS)}, got {entries['task']!r}")

    given = [k for k in WEIGHT_KEYS if k in entries]
    if len(given) != 1:
        raise ConfigError(f"exactly one of {', '.join(WEIGHT_KEYS)} is required, got {len(given)}")
    wkey = given[0]
    if wkey == "weight":
        spec = WeightSpec("values", _floats(wkey, entries[wkey]))
    elif wkey == "weight_two_valued":
        vals = _floats(wkey, entries[wkey])
        if len(vals) != 3 or not 0 <= vals[1] <= 1:
            raise ConfigError("weight_two_valued: expected 'high, fraction, low' with 0 <= fraction <= 1")
        spec = WeightSpec("two_valued", vals)
    else:
        path = Path(entries[wkey])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        spec = WeightSpec("file", (str(path),))

    extra = {}
    if "tol" in entries:
        extra["tol"] = _scalar("tol", entries["tol"], float)
        if not extra["tol"] > 0:
            raise ConfigError("tol must be positive")
    if "max_iter" in entries:
        extra["max_iter"] = _scalar("max_iter", entries["max_iter"], int)
        if extra["max_iter"] < 1:
            raise ConfigError("max_iter must be at least 1")
    if "seed" in entries:
        extra["seed"] = _scalar("seed", entries["seed"], int)
    if "output_dir" in entries:
        extra["output_dir"] = entries["output_dir"]
    if "stripes" in entries:
        extra["stripes"] = _ints("stripes", entries["stripes"])
        if min(extra["stripes"]) < 1:
            raise ConfigError("stripes must be positive")

    cfg = RunConfig(domain_t, elements, bc, spec, task, **extra)
    try:
        grid = cfg.grid()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    check_regime(cfg.task, cfg.weight_values(grid), grid.element_measure)
    if cfg.task == "sweep":
        nx = grid.shape[0]
        bad = [k for k in cfg.stripes if nx % (2 * k)]
        if bad:
            raise ConfigError(f"stripes {bad}: 2 * stripes must divide the {nx} cells along the first axis")
    return cfg


def check_regime(task: str, values: np.ndarray, element_measure: float):
    total = element_measure * float(np.sum(values))
    positive = bool(np.any(values > 0))
    if task == "maximize" and total <= 0:
        raise RegimeMismatch(
            f"maximize needs a weight with positive integral (got {total:.6g}): otherwise "
            "sup lambda1 over the class is +infinity and no maximizer exists; use task = sweep"
        )
    if task == "sweep":
        if total > 0:
            raise RegimeMismatch(
                f"sweep needs a weight with nonpositive integral (got {total:.6g}); use task = maximize"
            )
        if not positive:
            raise RegimeMismatch("sweep needs some positive weight values")
    if task == "minimize" and not positive:
        raise RegimeMismatch("minimize needs some positive weight values: no principal eigenvalue exists")
