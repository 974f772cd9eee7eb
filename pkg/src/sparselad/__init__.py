"""sparselad: outlier-robust sparse recovery for least absolute deviations.

Hard-thresholding-pursuit solvers with quantile-truncated adaptive step
sizes, reference baselines, a step-size feasibility calculator, seeded
problem generation, and a reproducible benchmark harness (CLI: sparselad).
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .core import hard_threshold, matvec, residual, restrict_to_support, sign_vector, transpose_matvec
from .metrics import TrialOutcome, rel_err, snr_db, success_rate
from .probgen import ProblemSpec, RecoveryProblem, generate, trial_seed
from .quantile import TruncationResult, empirical_quantile, truncated_l1
from .ripdiag import RicEstimate, estimate_ric1
from .solvers import (SolverConfig, SolverResult, solve_aiht, solve_fhtp1,
                      solve_gfhtp1, solve_psgd)
from .stepsize import (FeasibilityParams, MuInterval, adaptive_step,
                       feasible_mu_range, max_p_grid, normal_inverse_cdf)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND", "__version__",
    "matvec", "transpose_matvec", "residual", "sign_vector", "hard_threshold",
    "restrict_to_support",
    "empirical_quantile", "truncated_l1", "TruncationResult",
    "normal_inverse_cdf", "adaptive_step", "feasible_mu_range", "max_p_grid",
    "MuInterval", "FeasibilityParams",
    "SolverConfig", "SolverResult", "solve_fhtp1", "solve_gfhtp1", "solve_aiht",
    "solve_psgd",
    "ProblemSpec", "RecoveryProblem", "generate", "trial_seed",
    "rel_err", "snr_db", "success_rate", "TrialOutcome",
    "estimate_ric1", "RicEstimate",
]
