"""Principal eigenvalue of -div grad u = lambda m u, optimized over rearrangements of m."""
from .eigen import (
    EigenPair,
    EigenSolverError,
    NoPositiveEigenvalue,
    SpectrumReport,
    WeightedEigenproblem,
    dense_spectrum_oracle,
    gateaux_derivative,
    homogeneity_check,
    principal_eigenpair,
    rayleigh_quotient,
)
from .mesh import (
    BoundaryCondition,
    Grid,
    GridError,
    assemble_stiffness,
    assemble_weighted_mass,
    build_grid,
    element_square_integrals,
)
from .optimize import (
    OptResult,
    RegimeError,
    Status,
    brute_force_extremes,
    comonotone_check,
    convexity_probe,
    fragmentation_sweep,
    maximize_lambda1,
    minimize_lambda1,
    persistence_threshold,
)
from .rearrange import (
    RearrangementClass,
    RearrangementError,
    StepRearrangement,
    Weight,
    checkerboard_rearrangement,
    class_contains,
    closure_contains,
    decreasing_rearrangement,
    distribution_function,
    hl_max_pairing,
    hl_min_pairing,
    majorizes,
    truncation_rearrangement,
)

__all__ = [
    "EigenPair",
    "EigenSolverError",
    "NoPositiveEigenvalue",
    "SpectrumReport",
    "WeightedEigenproblem",
    "dense_spectrum_oracle",
    "gateaux_derivative",
    "homogeneity_check",
    "principal_eigenpair",
    "rayleigh_quotient",
    "BoundaryCondition",
    "Grid",
    "GridError",
    "assemble_stiffness",
    "assemble_weighted_mass",
    "build_grid",
    "element_square_integrals",
    "OptResult",
    "RegimeError",
    "Status",
    "brute_force_extremes",
    "comonotone_check",
    "convexity_probe",
    "fragmentation_sweep",
    "maximize_lambda1",
    "minimize_lambda1",
    "persistence_threshold",
    "RearrangementClass",
    "RearrangementError",
    "StepRearrangement",
    "Weight",
    "checkerboard_rearrangement",
    "class_contains",
    "closure_contains",
    "decreasing_rearrangement",
    "distribution_function",
    "hl_max_pairing",
    "hl_min_pairing",
    "majorizes",
    "truncation_rearrangement",
]

__version__ = "0.1.0"
