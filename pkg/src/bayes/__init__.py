from .likelihood import DiscreteLikelihood, LikelihoodModel, OutcomeSpace
from .posterior import PosteriorState, bayes_update, bayes_update_many
from .estimator import EstimateReport, FMoments, f_moments, optimal_estimate, prior_f_moments
from .evidence import evidence, log_evidence

__all__ = [
    "DiscreteLikelihood",
    "EstimateReport",
    "FMoments",
    "LikelihoodModel",
    "OutcomeSpace",
    "PosteriorState",
    "bayes_update",
    "bayes_update_many",
    "evidence",
    "f_moments",
    "log_evidence",
    "optimal_estimate",
    "prior_f_moments",
]
