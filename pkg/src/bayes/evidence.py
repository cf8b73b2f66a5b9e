from __future__ import annotations

from typing import Any, Sequence

import numpy as np

from src.bayes.likelihood import LikelihoodModel
from src.bayes.posterior import PosteriorState, bayes_update_many
from src.middleware.errors import ContradictionError
from src.priors.priors import PriorDensity


def log_evidence(prior: PriorDensity, model: LikelihoodModel, outcomes: Sequence[Any], controls: Any = None) -> float:
    """log of the integral of p(theta) * prod_i p(x_i | theta, y_i)."""
    state = bayes_update_many(PosteriorState.from_prior(prior), model, outcomes, controls)
    return state.log_evidence


def evidence(prior: PriorDensity, model: LikelihoodModel, outcomes: Sequence[Any], controls: Any = None) -> float:
    value = float(np.exp(log_evidence(prior, model, outcomes, controls)))
    if value <= 0:
        raise ContradictionError(f"evidence of {len(outcomes)} outcome(s) underflows to zero")
    return value
