"""Principal eigenpair of the weighted pencil ``K u = lambda M_m u``.

Everything is phrased through ``mu = 1 / lambda``, the eigenvalues of the
K-symmetric operator ``K^{-1} M_m``.  For sign-changing weights that operator
has a positive and a negative branch and either one may dominate in modulus,
so the solvers never rely on the eigenvalue of largest modulus.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import (
    Grid,
    StiffnessForm,
    WeightedMassForm,
    assemble_stiffness,
    assemble_weighted_mass,
    element_square_integrals,
)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 5000
DENSE_LIMIT = 500
ORACLE_LIMIT = 1000
# entries this far below zero, relative to the peak, are rounding noise on an
# exponentially small tail rather than a sign change
POSITIVITY_NOISE = 1e-10


class NoPositiveEigenvalue(Exception):
    """The weight has no positive part, so there is no principal eigenvalue."""


class EigenSolverError(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class EigenPair:
    mu1: float
    u: np.ndarray  # all nodes; zero on Dirichlet boundary nodes
    u_free: np.ndarray
    residual: float

    @property
    def lambda1(self) -> float:
        return 1.0 / self.mu1


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    positive: np.ndarray  # mu_1 >= mu_2 >= ... > 0
    negative: np.ndarray  # mu_{-1} <= mu_{-2} <= ... < 0
    n_zero: int

    @property
    def n_positive(self) -> int:
        return self.positive.size

    @property
    def n_negative(self) -> int:
        return self.negative.size

    @property
    def lambdas(self) -> np.ndarray:
        return 1.0 / self.positive


def _matrix(a):
    return getattr(a, "matrix", a)


def _weight_of(mass):
    return getattr(mass, "weight", None)


def _check_spd(K):
    if sp.issparse(K):
        Kd = K
        asym = abs(K - K.T).max() if K.nnz else 0.0
    else:
        Kd = np.asarray(K)
        asym = np.abs(Kd - Kd.T).max()
    if asym > 1e-12 * max(abs(Kd).max(), 1.0):
        raise EigenSolverError("stiffness matrix is not symmetric")


def _finish(Kd, Md, mu, v, require_positive=True):
    v = np.asarray(v, dtype=float).ravel()
    if v.sum() < 0:
        v = -v
    v = v / np.sqrt(v @ (Kd @ v))
    Ku = Kd @ v
    residual = float(np.linalg.norm(Md @ v - mu * Ku) / np.linalg.norm(Ku))
    if require_positive and (v.min() < -POSITIVITY_NOISE * v.max() or v.max() <= 0):
        raise EigenSolverError("principal eigenvector is not positive at every free node", residual)
    return v, residual


def principal_eigenpair(
    stiffness: StiffnessForm,
    mass: WeightedMassForm,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    dense: bool | None = None,
    require_positive: bool = True,
) -> EigenPair:
    """Largest eigenvalue ``mu1`` of ``K^{-1} M_m`` and its positive eigenvector.

    The eigenvector is normalized to unit K-norm, so ``u @ M_m @ u == mu1``.
    Problems with at most ``DENSE_LIMIT`` free nodes are solved densely;
    larger ones by Lanczos on the K-inner-product (ARPACK generalized mode
    with a sparse LU of K), asking for the top end first and for both ends
    when that does not converge.  Eigenvector entries below zero by at most
    ``POSITIVITY_NOISE`` times the peak are rounding noise on an
    exponentially small tail; anything more negative is reported as a
    failure, never clamped.  ``require_positive=False`` skips that test and
    returns the top eigenpair as is: ``mu1`` and its gradient stay well
    defined (the top eigenvalue is convex in the weight) even where a coarse
    mesh loses positivity.

    Raises ``NoPositiveEigenvalue`` when the weight is nowhere positive, or
    when the computed top of the spectrum is not above ``tol``.
    """
    weight = _weight_of(mass)
    if weight is not None and np.max(weight) <= 0:
        raise NoPositiveEigenvalue("weight is nowhere positive: no positive eigenvalue")

    K, M = _matrix(stiffness), _matrix(mass)
    if K.shape != M.shape or K.shape[0] != K.shape[1]:
        raise EigenSolverError("stiffness and mass shapes differ")
    _check_spd(K)
    n = K.shape[0]
    if dense is None:
        dense = n <= DENSE_LIMIT
    if dense:
        Kd = K.toarray() if sp.issparse(K) else np.asarray(K, dtype=float)
        Md = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
        try:
            w, V = la.eigh(Md, Kd, subset_by_index=[n - 1, n - 1])
        except la.LinAlgError as exc:
            raise EigenSolverError(f"stiffness matrix is not positive definite: {exc}") from exc
        mu, v = w[-1], V[:, -1]
    else:
        Ks, Ms = sp.csc_matrix(K), sp.csr_matrix(M)
        lu = spla.splu(Ks)
        Kinv = spla.LinearOperator(Ks.shape, matvec=lu.solve, dtype=float)
        k = min(6, n - 1)
        # the top end alone is fast unless a dominant negative branch swamps it;
        # asking for both ends handles that case but stalls on clustered small eigenvalues
        for which in ("LA", "BE"):
            try:
                w, V = spla.eigsh(Ms, k=k, M=Ks, Minv=Kinv, which=which, tol=tol * 1e-2, maxiter=max_iter)
                break
            except spla.ArpackNoConvergence:
                continue
        else:
            raise EigenSolverError(f"Lanczos did not converge in {max_iter} iterations")
        top = int(np.argmax(w))
        mu, v = w[top], V[:, top]
        Kd, Md = Ks, Ms

    mu = float(mu)
    if mu <= tol:
        raise NoPositiveEigenvalue(
            f"top of the computed spectrum is {mu:.3e} <= tol although the weight has a positive part; "
            "the mesh may be too coarse to resolve the positive branch"
        )
    v, residual = _finish(Kd, Md, mu, v, require_positive)
    if residual > max(tol, 1e-8):
        raise EigenSolverError(f"eigen-residual {residual:.3e} exceeds tolerance", residual)
    free = stiffness.free_nodes if isinstance(stiffness, StiffnessForm) else np.arange(n)
    n_nodes = stiffness.n_nodes if isinstance(stiffness, StiffnessForm) else n
    u = np.zeros(n_nodes)
    u[free] = v
    return EigenPair(mu, u, v, residual)


def rayleigh_quotient(f, stiffness, mass) -> float:
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        raise ValueError("Rayleigh quotient of the zero vector")
    K, M = _matrix(stiffness), _matrix(mass)
    return float(f @ (M @ f)) / float(f @ (K @ f))


def dense_spectrum_oracle(stiffness, mass, zero_tol: float = 1e-12) -> SpectrumReport:
    """All eigenvalues of ``K^{-1} M_m`` by Cholesky reduction to a symmetric matrix.

    Eigenvalues with modulus below ``zero_tol`` times the spectral radius are
    counted as zero (cells with vanishing weight produce a numerically
    null block).
    """
    K, M = _matrix(stiffness), _matrix(mass)
    n = K.shape[0]
    if n > ORACLE_LIMIT:
        raise ValueError(f"dense oracle limited to {ORACLE_LIMIT} unknowns, got {n}")
    Kd = K.toarray() if sp.issparse(K) else np.asarray(K, dtype=float)
    Md = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
    L = la.cholesky(Kd, lower=True)
    C = la.solve_triangular(L, la.solve_triangular(L, Md, lower=True).T, lower=True)
    w = la.eigvalsh((C + C.T) / 2)
    cut = zero_tol * max(np.abs(w).max(), np.finfo(float).tiny)
    return SpectrumReport(
        positive=np.sort(w[w > cut])[::-1],
        negative=np.sort(w[w < -cut]),
        n_zero=int(np.count_nonzero(np.abs(w) <= cut)),
    )


def gateaux_derivative(grid: Grid, eigenpair: EigenPair) -> np.ndarray:
    """Per-cell integrals of ``u**2``: the gradient of ``mu1`` with respect to cell values."""
    return element_square_integrals(grid, eigenpair.u)


class WeightedEigenproblem:
    """Grid plus its stiffness form, for repeated solves with varying weights."""

    def __init__(self, grid: Grid, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
        self.grid = grid
        self.stiffness = assemble_stiffness(grid)
        self.tol = tol
        self.max_iter = max_iter

    def mass(self, weight) -> WeightedMassForm:
        return assemble_weighted_mass(self.grid, weight)

    def solve(self, weight, require_positive: bool = True) -> EigenPair:
        return principal_eigenpair(self.stiffness, self.mass(weight), self.tol, self.max_iter,
                                   require_positive=require_positive)

    def mu1(self, weight) -> float:
        """``mu1`` extended by 0 to weights with no positive part."""
        try:
            return self.solve(weight).mu1
        except NoPositiveEigenvalue:
            return 0.0

    def gradient(self, pair: EigenPair) -> np.ndarray:
        return gateaux_derivative(self.grid, pair)

    def spectrum(self, weight) -> SpectrumReport:
        return dense_spectrum_oracle(self.stiffness, self.mass(weight))


@dataclass(frozen=True)
class HomogeneityReport:
    alpha: float
    mu1: float
    mu1_scaled: float
    abs_error: float
    rel_error: float
    passed: bool


def homogeneity_check(grid: Grid, weight, alpha: float, rtol: float = 1e-12) -> HomogeneityReport:
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    problem = WeightedEigenproblem(grid)
    m = np.asarray(getattr(weight, "values", weight), dtype=float)
    base = problem.solve(m).mu1
    scaled = problem.solve(alpha * m).mu1
    err = abs(scaled - alpha * base)
    rel = err / (alpha * base)
    return HomogeneityReport(alpha, base, scaled, err, rel, rel <= rtol)
