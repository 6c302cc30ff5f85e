"""Complex special functions used by the closed-form TBA solutions."""
from ._common import BranchError, EvalResult, Method, PoleError, PrecisionWarning
from .bessel import aik, aik_pair, aik_prime, airy_ai, airy_ai_prime, bessel_k
from .gamma import gamma, gamma_real
from .hyper import hyp0f2
from .su3phi import (
    CollocationError,
    Su3Phi,
    su3_phi_build,
    su3_phi_collocate,
    su3_phi_eval,
)

__all__ = [
    "BranchError",
    "CollocationError",
    "EvalResult",
    "Method",
    "PoleError",
    "PrecisionWarning",
    "Su3Phi",
    "aik",
    "aik_pair",
    "aik_prime",
    "airy_ai",
    "airy_ai_prime",
    "bessel_k",
    "gamma",
    "gamma_real",
    "hyp0f2",
    "su3_phi_build",
    "su3_phi_collocate",
    "su3_phi_eval",
]
