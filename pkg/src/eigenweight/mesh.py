"""Uniform meshes and P1 assembly of the stiffness and weighted-mass forms.

Intervals are split into equal segments; rectangles into equal axis-aligned
cells, each cut into two triangles along the lower-left to upper-right
diagonal.  The cell (not the triangle) carries one weight value.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp

DIRICHLET = "dirichlet"
ROBIN = "robin"


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryFace:
    face_id: int
    nodes: tuple[int, ...]
    measure: float
    sigma: float | None


@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet, or Robin with ``sigma`` given as a constant or one value per face."""

    kind: str
    sigma: float | Sequence[float] | None = None

    @classmethod
    def dirichlet(cls) -> "BoundaryCondition":
        return cls(DIRICHLET)

    @classmethod
    def robin(cls, sigma) -> "BoundaryCondition":
        return cls(ROBIN, sigma)


@dataclass(frozen=True, eq=False)
class Grid:
    dimension: int
    extents: tuple[tuple[float, float], ...]
    shape: tuple[int, ...]
    element_measure: float
    boundary_faces: tuple[BoundaryFace, ...]
    bc_kind: str

    @property
    def n_elements(self) -> int:
        return int(np.prod(self.shape))

    @property
    def volume(self) -> float:
        return float(np.prod([hi - lo for lo, hi in self.extents]))

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / n for (lo, hi), n in zip(self.extents, self.shape))

    @property
    def node_shape(self) -> tuple[int, ...]:
        return tuple(n + 1 for n in self.shape)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.node_shape))

    @cached_property
    def nodes(self) -> np.ndarray:
        """Node coordinates, shape (n_nodes, dimension); x varies fastest."""
        axes = [np.linspace(lo, hi, n + 1) for (lo, hi), n in zip(self.extents, self.shape)]
        if self.dimension == 1:
            return axes[0][:, None]
        y, x = np.meshgrid(axes[1], axes[0], indexing="ij")
        return np.column_stack([x.ravel(), y.ravel()])

    @cached_property
    def simplices(self) -> np.ndarray:
        """P1 simplices as node index rows, shape (n_simplices, dimension + 1)."""
        if self.dimension == 1:
            n = self.shape[0]
            return np.column_stack([np.arange(n), np.arange(1, n + 1)])
        nx, ny = self.shape
        i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
        i, j = i.ravel(), j.ravel()
        a = j * (nx + 1) + i
        b = a + 1
        c = a + nx + 2
        d = a + nx + 1
        tris = np.empty((2 * nx * ny, 3), dtype=int)
        tris[0::2] = np.column_stack([a, b, c])
        tris[1::2] = np.column_stack([a, c, d])
        return tris

    @cached_property
    def simplex_cell(self) -> np.ndarray:
        """Owning cell index of every simplex."""
        if self.dimension == 1:
            return np.arange(self.shape[0])
        return np.repeat(np.arange(self.n_elements), 2)

    @cached_property
    def boundary_nodes(self) -> np.ndarray:
        return np.unique(np.concatenate([f.nodes for f in self.boundary_faces]))

    @cached_property
    def free_nodes(self) -> np.ndarray:
        if self.bc_kind == DIRICHLET:
            return np.setdiff1d(np.arange(self.n_nodes), self.boundary_nodes)
        return np.arange(self.n_nodes)

    @cached_property
    def cell_centers(self) -> np.ndarray:
        axes = [lo + h * (np.arange(n) + 0.5) for (lo, _), h, n in zip(self.extents, self.spacing, self.shape)]
        if self.dimension == 1:
            return axes[0][:, None]
        yc, xc = np.meshgrid(axes[1], axes[0], indexing="ij")
        return np.column_stack([xc.ravel(), yc.ravel()])

    def expand(self, u_free: np.ndarray) -> np.ndarray:
        """Embed free-node values into a full nodal vector (zeros elsewhere)."""
        u = np.zeros(self.n_nodes)
        u[self.free_nodes] = u_free
        return u


def _faces_1d(lo, hi, n):
    return [(0, (0,), 1.0), (1, (n,), 1.0)]


def _faces_2d(shape, spacing):
    nx, ny = shape
    hx, hy = spacing
    stride = nx + 1
    faces = []
    for i in range(nx):  # bottom, x increasing
        faces.append(((i, i + 1), hx))
    for j in range(ny):  # right, y increasing
        faces.append(((j * stride + nx, (j + 1) * stride + nx), hy))
    for i in range(nx):  # top, x increasing
        faces.append(((ny * stride + i, ny * stride + i + 1), hx))
    for j in range(ny):  # left, y increasing
        faces.append(((j * stride, (j + 1) * stride), hy))
    return [(k, nodes, h) for k, (nodes, h) in enumerate(faces)]


def build_grid(domain, elements_per_axis, bc: BoundaryCondition) -> Grid:
    """Build a uniform grid.

    ``domain`` is ``(a, b)`` for an interval or ``((x0, x1), (y0, y1))`` for a
    rectangle.  ``elements_per_axis`` is an int or one int per axis.  Robin
    faces are ordered bottom, right, top, left (each in increasing coordinate)
    in 2D and left, right in 1D.
    """
    domain = np.asarray(domain, dtype=float)
    if domain.ndim == 1:
        domain = domain[None, :]
    if domain.ndim != 2 or domain.shape[1] != 2 or domain.shape[0] not in (1, 2):
        raise GridError("domain must be (a, b) or ((x0, x1), (y0, y1))")
    dim = domain.shape[0]
    extents = tuple((float(lo), float(hi)) for lo, hi in domain)
    for lo, hi in extents:
        if not hi > lo:
            raise GridError(f"degenerate extent ({lo}, {hi})")

    shape = np.broadcast_to(np.asarray(elements_per_axis, dtype=int), (dim,))
    if np.any(shape < 1):
        raise GridError("elements_per_axis must be positive")
    shape = tuple(int(n) for n in shape)

    kind = bc.kind.lower()
    if kind == DIRICHLET and min(shape) < 2:
        raise GridError("Dirichlet grid needs at least 2 elements per axis (no free nodes otherwise)")

    spacing = tuple((hi - lo) / n for (lo, hi), n in zip(extents, shape))
    raw = _faces_1d(*extents[0], shape[0]) if dim == 1 else _faces_2d(shape, spacing)

    if kind == DIRICHLET:
        sigmas = [None] * len(raw)
    elif kind == ROBIN:
        if bc.sigma is None:
            raise GridError("Robin condition requires sigma")
        sigmas = np.broadcast_to(np.asarray(bc.sigma, dtype=float), (len(raw),)) \
            if np.ndim(bc.sigma) == 0 else np.asarray(bc.sigma, dtype=float)
        if sigmas.shape != (len(raw),):
            raise GridError(f"expected {len(raw)} sigma values, got {sigmas.size}")
        if np.any(sigmas < 0) or not np.all(np.isfinite(sigmas)):
            raise GridError("sigma must be finite and nonnegative")
        if not np.any(sigmas > 0):
            raise GridError("sigma identically zero is the Neumann problem: Neumann excluded")
        sigmas = [float(s) for s in sigmas]
    else:
        raise GridError(f"unknown boundary condition {bc.kind!r}")

    faces = tuple(BoundaryFace(fid, nodes, float(meas), s) for (fid, nodes, meas), s in zip(raw, sigmas))
    return Grid(
        dimension=dim,
        extents=extents,
        shape=shape,
        element_measure=float(np.prod(spacing)),
        boundary_faces=faces,
        bc_kind=kind,
    )


def _simplex_geometry(grid: Grid):
    """Per-simplex measures and barycentric gradients, shape (ns,), (ns, d+1, d)."""
    pts = grid.nodes[grid.simplices]
    if grid.dimension == 1:
        h = pts[:, 1, 0] - pts[:, 0, 0]
        grads = np.stack([-1.0 / h, 1.0 / h], axis=1)[:, :, None]
        return h, grads
    e1 = pts[:, 1] - pts[:, 0]
    e2 = pts[:, 2] - pts[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    area = 0.5 * np.abs(det)
    grads = np.empty((len(pts), 3, 2))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        grads[:, i, 0] = (pts[:, j, 1] - pts[:, k, 1]) / det
        grads[:, i, 1] = (pts[:, k, 0] - pts[:, j, 0]) / det
    return area, grads


def _local_mass(dim: int) -> np.ndarray:
    # exact P1 mass on a simplex of unit measure
    return (np.ones((dim + 1, dim + 1)) + np.eye(dim + 1)) / ((dim + 1) * (dim + 2))


def _scatter(grid: Grid, local: np.ndarray, size: int) -> sp.csr_matrix:
    s = grid.simplices
    k = s.shape[1]
    rows = np.repeat(s, k, axis=1).ravel()
    cols = np.tile(s, (1, k)).ravel()
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(size, size)).tocsr()


def _restrict(grid: Grid, A: sp.spmatrix) -> sp.csr_matrix:
    free = grid.free_nodes
    return A[free][:, free].tocsr()


@dataclass(frozen=True, eq=False)
class StiffnessForm:
    matrix: sp.csr_matrix
    n_nodes: int
    free_nodes: np.ndarray


@dataclass(frozen=True, eq=False)
class WeightedMassForm:
    matrix: sp.csr_matrix
    weight: np.ndarray


def assemble_stiffness(grid: Grid) -> StiffnessForm:
    """Gradient pairing plus, for Robin, the boundary term with exact edge quadrature."""
    meas, grads = _simplex_geometry(grid)
    local = meas[:, None, None] * np.einsum("eid,ejd->eij", grads, grads)
    K = _scatter(grid, local, grid.n_nodes)
    if grid.bc_kind == ROBIN:
        rows, cols, vals = [], [], []
        for face in grid.boundary_faces:
            if len(face.nodes) == 1:
                (a,) = face.nodes
                rows.append(a), cols.append(a), vals.append(face.sigma * face.measure)
                continue
            a, b = face.nodes
            w = face.sigma * face.measure / 6.0
            rows += [a, a, b, b]
            cols += [a, b, a, b]
            vals += [2 * w, w, w, 2 * w]
        K = K + sp.coo_matrix((vals, (rows, cols)), shape=K.shape).tocsr()
    return StiffnessForm(_restrict(grid, K), grid.n_nodes, grid.free_nodes)


def _weight_values(grid: Grid, weight) -> np.ndarray:
    values = np.asarray(getattr(weight, "values", weight), dtype=float)
    if values.shape != (grid.n_elements,):
        raise GridError(f"weight has {values.size} values, grid has {grid.n_elements} elements")
    return values


def assemble_weighted_mass(grid: Grid, weight) -> WeightedMassForm:
    """Exact P1 pairing of ``m f phi`` with ``m`` constant on each cell."""
    m = _weight_values(grid, weight)
    meas, _ = _simplex_geometry(grid)
    coeff = meas * m[grid.simplex_cell]
    local = coeff[:, None, None] * _local_mass(grid.dimension)[None]
    M = _scatter(grid, local, grid.n_nodes)
    return WeightedMassForm(_restrict(grid, M), m)


def element_square_integrals(grid: Grid, u) -> np.ndarray:
    """Exact integral of ``u**2`` over each cell for nodal P1 values ``u`` (all nodes)."""
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.n_nodes,):
        raise GridError(f"expected {grid.n_nodes} nodal values, got {u.size}")
    meas, _ = _simplex_geometry(grid)
    vals = u[grid.simplices]
    sq = np.sum(vals**2, axis=1)
    cross = (np.sum(vals, axis=1) ** 2 - sq) / 2.0
    per_simplex = meas * (sq + cross) / ((grid.dimension + 1) * (grid.dimension + 2) / 2)
    return np.bincount(grid.simplex_cell, weights=per_simplex, minlength=grid.n_elements)
