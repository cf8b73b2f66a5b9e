from .priors import (
    GridDensity,
    PriorDensity,
    PriorKind,
    as_prior,
    delta_prior,
    make_ignorance_prior,
    prior_from_density,
    prior_from_fisher_curve,
)
from .symmetry import (
    SymmetryFunction,
    arcsine_symmetry,
    hyperbolic_symmetry,
    identity_symmetry,
    lifetime_geometric_symmetry,
    log_symmetry,
    symmetry_from_prior,
)
from .transforms import ParameterTransform, verify_prior_invariance
from .loss import hyperbolic_loss, log_loss, loss_from_prior
from .fisher import classical_fisher, fisher_curve, kl_divergence

__all__ = [
    "GridDensity",
    "ParameterTransform",
    "PriorDensity",
    "PriorKind",
    "SymmetryFunction",
    "arcsine_symmetry",
    "as_prior",
    "classical_fisher",
    "delta_prior",
    "fisher_curve",
    "hyperbolic_loss",
    "hyperbolic_symmetry",
    "identity_symmetry",
    "kl_divergence",
    "lifetime_geometric_symmetry",
    "log_loss",
    "log_symmetry",
    "loss_from_prior",
    "make_ignorance_prior",
    "prior_from_density",
    "prior_from_fisher_curve",
    "symmetry_from_prior",
    "verify_prior_invariance",
]
