"""Hypergeometric smoothing bounds for symmetric bounded indistinguishability.

Library layout:

* :mod:`hahnsmooth.hahn` -- discrete orthogonal polynomial tables, norms,
  smoothing eigenvalues and the damping exponent;
* :mod:`hahnsmooth.smoothing` -- the hypergeometric subsampling operator and
  its adjoint on weight distributions;
* :mod:`hahnsmooth.approximation` -- basis expansions and low-degree
  surrogate tests with their norm guarantees;
* :mod:`hahnsmooth.distributions` -- symmetric distributions, marginal
  distances, the advantage bound and its cutoff scan;
* :mod:`hahnsmooth.simplex` / :mod:`hahnsmooth.oracle` -- exact rational LP
  machinery computing the true maximal advantage at small n;
* :mod:`hahnsmooth.cli` -- the ``hahnsmooth`` command line.
"""

from .approximation import (
    HahnExpansion,
    Surrogate,
    build_surrogate,
    hahn_expand,
    remainder_norm_sq,
    remainder_profile,
)
from .distributions import (
    BoundParams,
    BoundReport,
    SymmetricDistribution,
    advantage_bound,
    best_cutoff,
    brute_force_marginal_distance,
    is_indistinguishable,
    make_parity_pair,
    marginal_distance,
)
from .hahn import (
    DampingSpectrum,
    HahnTable,
    damping_exponent,
    falling_factorial,
    get_table,
    hahn_norm,
    hahn_norm_sum,
    hahn_q,
    rising_factorial,
    smoothing_eigenvalue,
    smoothing_eigenvalue_sq,
)
from .numerics import FLOAT, RATIONAL, ParameterError, SignedLog
from .oracle import (
    OracleResult,
    SandwichReport,
    SoundnessViolation,
    max_advantage_exact,
    max_advantage_heuristic,
    sandwich_report,
    verify_witness,
)
from .simplex import LinearProgram, SimplexResult, SimplexSolver, solve_lp
from .smoothing import (
    SmoothingMatrix,
    apply_smoothing,
    factorial_moment,
    get_kernel,
    intertwining_residual,
    project_weights,
)

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "BoundReport",
    "DampingSpectrum",
    "FLOAT",
    "HahnExpansion",
    "HahnTable",
    "LinearProgram",
    "OracleResult",
    "ParameterError",
    "RATIONAL",
    "SandwichReport",
    "SignedLog",
    "SimplexResult",
    "SimplexSolver",
    "SmoothingMatrix",
    "SoundnessViolation",
    "Surrogate",
    "SymmetricDistribution",
    "advantage_bound",
    "apply_smoothing",
    "best_cutoff",
    "brute_force_marginal_distance",
    "build_surrogate",
    "damping_exponent",
    "falling_factorial",
    "factorial_moment",
    "get_kernel",
    "get_table",
    "hahn_expand",
    "hahn_norm",
    "hahn_norm_sum",
    "hahn_q",
    "is_indistinguishable",
    "make_parity_pair",
    "marginal_distance",
    "max_advantage_exact",
    "max_advantage_heuristic",
    "project_weights",
    "remainder_norm_sq",
    "remainder_profile",
    "rising_factorial",
    "sandwich_report",
    "smoothing_eigenvalue",
    "smoothing_eigenvalue_sq",
    "solve_lp",
    "verify_witness",
]
