"""Exact fusion algebras and fusion modules, truncated left-action operators,
and numerical amenability verdicts with certified non-amenability."""

__version__ = "0.1.0"

from .algebra import FusionAlgebra, ValidationReport, make_fusion_algebra, pf_dimension, validate_axioms
from .elements import ModuleElement, RingElement
from .module import FusionModule, make_fusion_module, regular_module, validate_module
from .spectral import (
    ActionWindow,
    AffineWeights,
    AmenabilityReport,
    ProbabilityMeasure,
    TableWeights,
    TruncatedOperator,
    Verdict,
    amenability_test,
    build_gamma,
    build_gamma_mu,
    certify_upper_bound,
    enumerate_ball,
    kesten_norm_check,
    mu_from_positive_element,
    norm_lower_bound,
)

__all__ = [
    "ActionWindow",
    "AffineWeights",
    "AmenabilityReport",
    "FusionAlgebra",
    "FusionModule",
    "ModuleElement",
    "ProbabilityMeasure",
    "RingElement",
    "TableWeights",
    "TruncatedOperator",
    "ValidationReport",
    "Verdict",
    "amenability_test",
    "build_gamma",
    "build_gamma_mu",
    "certify_upper_bound",
    "enumerate_ball",
    "kesten_norm_check",
    "make_fusion_algebra",
    "make_fusion_module",
    "mu_from_positive_element",
    "norm_lower_bound",
    "pf_dimension",
    "regular_module",
    "validate_axioms",
    "validate_module",
]
