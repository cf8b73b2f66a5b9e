from __future__ import annotations

import logging
from typing import Any, Optional

import numpy as np

from src.bayes.likelihood import LikelihoodModel
from src.config.settings import FISHER_PROBABILITY_FLOOR
from src.middleware.errors import DomainError
from src.numerics.quadrature import Grid1D

logger = logging.getLogger(__name__)


def fisher_step(theta: float, theta_scale: float) -> float:
    return 1e-5 * max(abs(theta), theta_scale)


def classical_fisher(
    likelihood: LikelihoodModel,
    theta: float,
    control: Any = None,
    step: Optional[float] = None,
) -> float:
    """Sum over outcomes of (dp/dtheta)^2 / p, with a central-difference derivative."""
    h = step if step is not None else fisher_step(theta, likelihood.theta_scale)
    space = likelihood.outcome_space(theta, control)
    p = likelihood.evaluate(space.values, theta, control)
    plus = likelihood.evaluate(space.values, theta + h, control)
    minus = likelihood.evaluate(space.values, theta - h, control)
    dp = (plus - minus) / (2.0 * h)

    floored = (p < FISHER_PROBABILITY_FLOOR) & (np.abs(dp) > 0)
    if np.any(floored):
        logger.warning(
            "Fisher information at theta=%g: %d outcome(s) below probability floor %g regularized",
            theta,
            int(floored.sum()),
            FISHER_PROBABILITY_FLOOR,
        )
    safe_p = np.maximum(p, FISHER_PROBABILITY_FLOOR)
    terms = np.where((p <= 0) & ~floored, 0.0, dp**2 / safe_p)
    return max(float(np.dot(space.weights, terms)), 0.0)


def fisher_curve(likelihood: LikelihoodModel, grid: Grid1D, control: Any = None) -> np.ndarray:
    """Classical Fisher information at every grid node."""
    return np.array([classical_fisher(likelihood, float(theta), control) for theta in grid.nodes])


def kl_divergence(likelihood: LikelihoodModel, theta1: float, theta2: float, control: Any = None) -> float:
    """KL(p_theta1 || p_theta2) on the outcome space of theta1."""
    space = likelihood.outcome_space(theta1, control)
    p = likelihood.evaluate(space.values, theta1, control)
    q = likelihood.evaluate(space.values, theta2, control)
    support = p > 0
    if np.any(q[support] <= 0):
        raise DomainError(f"p(.|{theta2}) vanishes where p(.|{theta1}) does not; divergence is infinite")
    return float(np.dot(space.weights[support], p[support] * np.log(p[support] / q[support])))
