"""Monte Carlo quadrature on the unit sphere with determinantal point
processes: the spherical (Bergman) ensemble, a Legendre projection DPP on
the square, randomised spiral points and i.i.d. uniform nodes."""

from .bergman import BergmanKernel
from .estimators import Estimate, Integrand, builtin_integrand, estimate, exact_integral_oracle
from .exprparse import parse_integrand
from .samplers import (
    METHODS,
    WeightedSample,
    draw,
    sample_iid_uniform,
    sample_jacobi_dpp,
    sample_spherical,
    sample_spiral,
)
from .study import ExperimentConfig, fit_loglog_slope, run_variance_study

__version__ = "0.1.0"

__all__ = [
    "BergmanKernel",
    "Estimate",
    "ExperimentConfig",
    "Integrand",
    "METHODS",
    "WeightedSample",
    "builtin_integrand",
    "draw",
    "estimate",
    "exact_integral_oracle",
    "fit_loglog_slope",
    "parse_integrand",
    "run_variance_study",
    "sample_iid_uniform",
    "sample_jacobi_dpp",
    "sample_spherical",
    "sample_spiral",
]
