"""Python access to the yns spectral lab core."""

from ._core import (
    Coefficients,
    Error,
    __version__,
    analyze_mode,
    besov_norm,
    coefficients,
    decay_exponent,
    lp_chi,
    lp_phi,
    max_growth,
    propagator,
    run_document,
)

__all__ = [
    "Coefficients",
    "Error",
    "__version__",
    "analyze_mode",
    "besov_norm",
    "coefficients",
    "decay_exponent",
    "lp_chi",
    "lp_phi",
    "max_growth",
    "propagator",
    "run_document",
]
