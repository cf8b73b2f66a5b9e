from __future__ import annotations

import logging
from typing import Any, NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy import stats

from src.bayes.estimator import EstimateReport, optimal_estimate
from src.bayes.likelihood import LikelihoodModel, OutcomeSpace
from src.bayes.posterior import PosteriorState, bayes_update_many
from src.middleware.errors import DomainError
from src.numerics.quadrature import Grid1D, log_grid
from src.numerics.random import RandomStream
from src.numerics.special import digamma, trigamma
from src.priors.priors import make_ignorance_prior
from src.priors.symmetry import log_symmetry

logger = logging.getLogger(__name__)

OUTCOME_NODES = 4096
OUTCOME_TAIL = 50.0
TAIL_PROBABILITY = 1e-12
DEFAULT_TRUNCATION = 1e9


class ExponentialRateModel(LikelihoodModel):
    """Waiting time t before a state change: p(t | theta) = theta exp(-theta t)."""

    def probability(self, outcome: Any, theta: ArrayLike, control: Any = None) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return theta * np.exp(-theta * float(outcome))

    def evaluate(self, outcomes: np.ndarray, theta: float, control: Any = None) -> np.ndarray:
        outcomes = np.asarray(outcomes, dtype=float)
        return theta * np.exp(-theta * outcomes)

    def outcome_space(self, theta: float, control: Any = None) -> OutcomeSpace:
        if theta <= 0:
            raise DomainError(f"rate must be positive, got {theta}")
        grid = log_grid(1e-10 / theta, OUTCOME_TAIL / theta, OUTCOME_NODES)
        return OutcomeSpace(grid.nodes, grid.weights, False)

    def sample(self, theta: float, control: Any, rng: RandomStream, size: int) -> np.ndarray:
        if theta <= 0:
            raise DomainError(f"rate must be positive, got {theta}")
        return np.asarray(rng.exponential(theta, size), dtype=float)


def rate_closed_form(t_bar: float, mu: int, theta_u: float = 1.0) -> EstimateReport:
    """Scale-invariant rate estimate from mu waiting times with mean t_bar."""
    if t_bar <= 0 or mu < 1 or theta_u <= 0:
        raise DomainError(f"need t_bar > 0, mu >= 1, theta_u > 0; got ({t_bar}, {mu}, {theta_u})")
    estimate = float(np.exp(digamma(mu)) / (mu * t_bar))
    loss = float(trigamma(mu))
    return EstimateReport(
        estimate=estimate,
        error=estimate * float(np.sqrt(loss)),
        empirical_loss=loss,
        f_mean=float(digamma(mu) - np.log(mu * t_bar * theta_u)),
    )


def rate_grid(t_bar: float, mu: int, nodes: int, truncation: float = DEFAULT_TRUNCATION) -> Grid1D:
    """Log grid covering the posterior of the rate given mu waiting times.

    The lower end never goes below 1/(truncation * t_bar); both ends also stop
    where the Gamma(mu, mu t_bar) posterior tail drops below 1e-12.
    """
    if t_bar <= 0 or mu < 1:
        raise DomainError(f"need t_bar > 0 and mu >= 1, got ({t_bar}, {mu})")
    lower_q = stats.gamma.ppf(TAIL_PROBABILITY, mu, scale=1.0 / mu)
    upper_q = stats.gamma.isf(TAIL_PROBABILITY, mu, scale=1.0 / mu)
    return log_grid(max(1.0 / truncation, lower_q) / t_bar, upper_q / t_bar, nodes)


class RateEstimate(NamedTuple):
    report: EstimateReport
    closed_form: EstimateReport
    truncation_sensitivity: float


def _grid_estimate(times: np.ndarray, nodes: int, truncation: float, theta_u: float) -> EstimateReport:
    grid = rate_grid(float(times.mean()), len(times), nodes, truncation)
    prior = make_ignorance_prior("jeffreys_scale", grid)
    posterior = bayes_update_many(PosteriorState.from_prior(prior), ExponentialRateModel(), times)
    return optimal_estimate(posterior, log_symmetry(grid, theta_u=theta_u))


def estimate_rate(
    times: Sequence[float], nodes: int = 1024, truncation: float = DEFAULT_TRUNCATION, theta_u: float = 1.0
) -> RateEstimate:
    """Grid pipeline next to the closed form, with a truncation doubling check."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0 or np.any(times <= 0):
        raise DomainError("waiting times must be a nonempty list of positive values")
    report = _grid_estimate(times, nodes, truncation, theta_u)
    widened = _grid_estimate(times, nodes, truncation**2, theta_u)
    sensitivity = abs(widened.estimate - report.estimate) / report.estimate
    if sensitivity > 1e-4:
        logger.warning("rate estimate moves by %.2e when the grid truncation is squared", sensitivity)
    return RateEstimate(
        report=report,
        closed_form=rate_closed_form(float(times.mean()), len(times), theta_u),
        truncation_sensitivity=sensitivity,
    )
