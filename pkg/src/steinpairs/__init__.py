"""Stein characterizations, Stein-equation solutions and uniform bounds for
densities with ``(s g)' = tau g`` on ``(0, inf)``, with the generalized
inverse Gaussian and Kummer families built in."""

__version__ = "0.1.0"

from .distributions import (  # noqa: E402
    GigParams,
    KummerParams,
    SampleBatch,
    SteinPair,
    gig_log_density,
    gig_stein_pair,
    kummer_log_density,
    kummer_stein_pair,
    make_stein_pair,
    sample,
    stein_pair,
    tau_zero,
)
from .errors import (  # noqa: E402
    ConvergenceError,
    DomainError,
    NumericalError,
    ParameterError,
    PreconditionError,
    RootBracketError,
    SteinError,
)

__all__ = [
    "__version__",
    "GigParams",
    "KummerParams",
    "SampleBatch",
    "SteinPair",
    "gig_log_density",
    "gig_stein_pair",
    "kummer_log_density",
    "kummer_stein_pair",
    "make_stein_pair",
    "sample",
    "stein_pair",
    "tau_zero",
    "ConvergenceError",
    "DomainError",
    "NumericalError",
    "ParameterError",
    "PreconditionError",
    "RootBracketError",
    "SteinError",
]
