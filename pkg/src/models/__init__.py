from .frameworks import Framework, FrameworkName
from .rate import ExponentialRateModel, RateEstimate, estimate_rate, rate_closed_form, rate_grid
from .coherence import (
    CoherenceEstimate,
    CoherenceLikelihood,
    CoherenceModel,
    coherence_frameworks,
    coherence_grid,
    coherence_likelihood,
    coherence_quantifier,
    theta_for_zeta,
)
from .lifetime import (
    LifetimeLikelihood,
    LifetimeModel,
    geometric_symmetry_numeric,
    lifetime_fisher,
    lifetime_frameworks,
    lifetime_grid,
    lifetime_likelihood,
    lifetime_state,
    lifetime_states,
)
from .simulate import ShotBatch, simulate_shots
from .metrics import coverage, nsr, nsr_percent

__all__ = [
    "CoherenceEstimate",
    "CoherenceLikelihood",
    "CoherenceModel",
    "ExponentialRateModel",
    "Framework",
    "FrameworkName",
    "LifetimeLikelihood",
    "LifetimeModel",
    "RateEstimate",
    "ShotBatch",
    "coherence_frameworks",
    "coherence_grid",
    "coherence_likelihood",
    "coherence_quantifier",
    "coverage",
    "estimate_rate",
    "geometric_symmetry_numeric",
    "lifetime_fisher",
    "lifetime_frameworks",
    "lifetime_grid",
    "lifetime_likelihood",
    "lifetime_state",
    "lifetime_states",
    "nsr",
    "nsr_percent",
    "rate_closed_form",
    "rate_grid",
    "simulate_shots",
    "theta_for_zeta",
]
