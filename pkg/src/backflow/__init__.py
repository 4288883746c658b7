"""Dissipative quantum backflow in closed form.

Damped one- and two-Gaussian wave-packet dynamics (friction-only and
friction-plus-temperature), probability-backflow metrics, and the
flux-operator eigenvalue problem on the positive momentum half-line.
"""

from .analysis import (
    BackflowInterval,
    TimeSeries,
    backflow_intervals,
    beta,
    beta_prime,
    negative_part,
)
from .ck import (
    CkState,
    CrossTermCoeffs,
    ck_state,
    cross_term_coeffs,
    current_origin_ck,
    prob_left_ck,
    prob_negative_momentum,
    psi_ck,
)
from .cl import (
    ClCrossTerm,
    cl_cross_coeffs,
    cl_width,
    current_origin_cl,
    prob_left_cl,
    rho_diag_cl,
    rho_pair_diag,
)
from .errors import (
    ClippedIntervalWarning,
    ConfigError,
    ConvergenceError,
    ProbabilityRangeError,
    SaturationWarning,
    SpuriousEigenvalueWarning,
)
from .fluxeigen import (
    KernelSpec,
    KernelSpectrum,
    QuadratureSpec,
    kernel_matrix,
    kernel_value,
    max_backflow,
    nystrom_spectrum,
    quadrature_nodes,
    xi,
)
from .linalg import CORE_BACKEND, jacobi_eigenvalues
from .params import (
    Environment,
    GaussianComponent,
    GaussianSuperposition,
    PhysicalConstants,
)
from .special import erfc_complex, faddeeva, thermal_width_factor, uptau

__version__ = "0.1.0"

__all__ = [
    "BackflowInterval",
    "CkState",
    "ClCrossTerm",
    "ClippedIntervalWarning",
    "ConfigError",
    "ConvergenceError",
    "CORE_BACKEND",
    "CrossTermCoeffs",
    "Environment",
    "GaussianComponent",
    "GaussianSuperposition",
    "KernelSpec",
    "KernelSpectrum",
    "PhysicalConstants",
    "ProbabilityRangeError",
    "QuadratureSpec",
    "SaturationWarning",
    "SpuriousEigenvalueWarning",
    "TimeSeries",
    "backflow_intervals",
    "beta",
    "beta_prime",
    "ck_state",
    "cl_cross_coeffs",
    "cl_width",
    "cross_term_coeffs",
    "current_origin_ck",
    "current_origin_cl",
    "erfc_complex",
    "faddeeva",
    "jacobi_eigenvalues",
    "kernel_matrix",
    "kernel_value",
    "max_backflow",
    "negative_part",
    "nystrom_spectrum",
    "prob_left_ck",
    "prob_left_cl",
    "prob_negative_momentum",
    "psi_ck",
    "quadrature_nodes",
    "rho_diag_cl",
    "rho_pair_diag",
    "thermal_width_factor",
    "uptau",
    "xi",
    "__version__",
]
