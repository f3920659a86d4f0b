"""Stability analysis for singular M-matrices under rank-one perturbation.

The central object is B = rho(H) I - H + v w^T for a nonnegative H and
update vectors v, w. The package builds the singular M-matrix A =
rho(H) I - H with its Perron structure, classifies B spectrally, checks
the sufficient stability and D-stability criteria, enumerates principal
minors, traces the homotopy A + t v w^T across the imaginary axis, and
integrates the eigenvector flow whose equilibria are the eigenpairs
of H.
"""

from .errors import (
    DomainError,
    EigenConvergenceError,
    FlowDivergenceError,
    HypothesisNotMet,
    MMStabError,
    NotGeometricallySimple,
    ParseError,
    SingularShiftError,
    SizeError,
    TheoryViolationError,
)
from .flow import (
    FlowState,
    Trajectory,
    completion_basis,
    equilibrium_stability_equivalence,
    integrate,
    linearization,
    reduced_stability_matrix,
    rhs,
)
from .homotopy import (
    Crossing,
    HomotopyTrace,
    crossing_bounds,
    imaginary_decomposition_residual,
    large_t_probe,
    small_t_stability,
    trace,
)
from .linalg import Spectrum, shifted_solve, spectral_radius_nonneg, spectrum
from .mmatrix import (
    SingularMMatrix,
    build,
    comparison_matrix,
    is_h_matrix_positive_diagonal,
    is_irreducible,
)
from .perturbation import (
    RankOneSystem,
    assemble,
    secular_residual,
    sherman_morrison_resolvent,
)
from .pmatrix import (
    Classification,
    MinorReport,
    principal_minors,
    verify_p0_theorem,
    verify_p_theorem,
)
from .problemfile import ProblemFile, counterexample_problem, emit, parse, parse_string
from .stability import (
    StabilityReport,
    Verdict,
    check_criteria,
    classify,
    corollary_clauses,
    d_stability_probe,
    eigenvector_perturbation_spectrum,
    lyapunov_diagonal_search,
    normal_case_check,
)

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "Crossing",
    "DomainError",
    "EigenConvergenceError",
    "FlowDivergenceError",
    "FlowState",
    "HomotopyTrace",
    "HypothesisNotMet",
    "MMStabError",
    "MinorReport",
    "NotGeometricallySimple",
    "ParseError",
    "ProblemFile",
    "RankOneSystem",
    "SingularMMatrix",
    "SingularShiftError",
    "SizeError",
    "Spectrum",
    "StabilityReport",
    "TheoryViolationError",
    "Trajectory",
    "Verdict",
    "assemble",
    "build",
    "check_criteria",
    "classify",
    "comparison_matrix",
    "completion_basis",
    "corollary_clauses",
    "counterexample_problem",
    "crossing_bounds",
    "d_stability_probe",
    "eigenvector_perturbation_spectrum",
    "emit",
    "equilibrium_stability_equivalence",
    "imaginary_decomposition_residual",
    "integrate",
    "is_h_matrix_positive_diagonal",
    "is_irreducible",
    "large_t_probe",
    "linearization",
    "lyapunov_diagonal_search",
    "normal_case_check",
    "parse",
    "parse_string",
    "principal_minors",
    "reduced_stability_matrix",
    "rhs",
    "secular_residual",
    "shifted_solve",
    "sherman_morrison_resolvent",
    "small_t_stability",
    "spectral_radius_nonneg",
    "spectrum",
    "trace",
    "verify_p0_theorem",
    "verify_p_theorem",
]
