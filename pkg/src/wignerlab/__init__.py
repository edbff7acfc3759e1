"""wignerlab: joint moments of polynomial functionals of stationary
semicircular sequences, their limit processes, and matrix simulators.
"""

__version__ = "0.1.0"

from .errors import AccuracyError, DomainError, SizeError, WignerlabError
from .poly import TchebExpansion, decompose, hermite_h, reconstruct, tcheb_u
from .combinat import (ContractionVector, NCStructure, catalan,
                       enumerate_contractions, enumerate_nc, is_noncrossing)
from .freecalc import (cumulants_from_moments, free_moments_from_cumulants,
                       semicircle_density, semicircle_moment,
                       wick_joint_moment)
from .covariance import (Const, CovarianceModel, Delta, Geometric, Log,
                         PowerLaw, PowerOfLog, Table, parse_model,
                         parse_slowly_varying, toeplitz_cov)
from .moments import (MC, CLTVariance, MomentResult, NCLTConstants, Quadrature,
                      clt_variance, diagonal_mass, exact_joint_moment,
                      karamata_ratio, limit_joint_moment, nclt_constants)
from .kernels import (DiscretizedOperator, KernelSpec, TraceCumulants,
                      discretize_operator, free_cumulants_trace, kernel_eval,
                      kernel_l2_norm_sq, ncfbm_cov,
                      rosenblatt_moments_via_cumulants)
from .sim import (SimRow, asymptotic_freeness_check, estimate_poly_moment,
                  estimate_trace_moments, sample_correlated_family,
                  sample_matrix_bm, simulate_limits, trace_state)

__all__ = [
    "AccuracyError", "DomainError", "SizeError", "WignerlabError",
    "TchebExpansion", "decompose", "hermite_h", "reconstruct", "tcheb_u",
    "ContractionVector", "NCStructure", "catalan", "enumerate_contractions",
    "enumerate_nc", "is_noncrossing",
    "cumulants_from_moments", "free_moments_from_cumulants",
    "semicircle_density", "semicircle_moment", "wick_joint_moment",
    "Const", "CovarianceModel", "Delta", "Geometric", "Log", "PowerLaw",
    "PowerOfLog", "Table", "parse_model", "parse_slowly_varying",
    "toeplitz_cov",
    "MC", "CLTVariance", "MomentResult", "NCLTConstants", "Quadrature",
    "clt_variance", "diagonal_mass", "exact_joint_moment", "karamata_ratio",
    "limit_joint_moment", "nclt_constants",
    "DiscretizedOperator", "KernelSpec", "TraceCumulants",
    "discretize_operator", "free_cumulants_trace", "kernel_eval",
    "kernel_l2_norm_sq", "ncfbm_cov", "rosenblatt_moments_via_cumulants",
    "SimRow", "asymptotic_freeness_check", "estimate_poly_moment",
    "estimate_trace_moments", "sample_correlated_family", "sample_matrix_bm",
    "simulate_limits", "trace_state",
]
