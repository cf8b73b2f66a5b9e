from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from src.bayes.estimator import EstimateReport, optimal_estimate
from src.bayes.posterior import PosteriorState, bayes_update
from src.middleware.errors import ConfigError
from src.numerics.random import RandomStream
from src.priors.priors import PriorDensity
from src.priors.symmetry import SymmetryFunction
from src.quantum.model import BornLikelihood, QuantumModel
from src.quantum.strategy import StrategyReport, optimal_strategy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdaptiveStep:
    shot: int
    control: Any
    outcome: int
    outcome_estimate: float
    gain_G: float
    report: EstimateReport


def _best_strategy(
    model: QuantumModel, posterior: PosteriorState, f: SymmetryFunction, candidates: Sequence[Any]
) -> StrategyReport:
    best = None
    for control in candidates:
        strategy = optimal_strategy(model, posterior, f, control)
        # strict comparison keeps the first candidate on ties
        if best is None or strategy.gain_G > best.gain_G:
            best = strategy
    return best


def adaptive_loop(
    model: QuantumModel,
    initial_prior: PriorDensity,
    f: SymmetryFunction,
    control_candidates: Sequence[Any],
    true_theta: float,
    shots: int,
    rng: RandomStream,
) -> list[AdaptiveStep]:
    """Shot-by-shot protocol: maximize the precision gain, measure, update.

    f stays fixed for the whole trajectory. Outcomes are drawn from the Born
    rule at ``true_theta`` for the chosen POVM.
    """
    candidates = list(control_candidates)
    if not candidates:
        raise ConfigError("adaptive protocol needs at least one control candidate")
    if shots < 1:
        raise ConfigError(f"adaptive protocol needs at least one shot, got {shots}")

    posterior = PosteriorState.from_prior(initial_prior)
    trajectory: list[AdaptiveStep] = []
    for shot in range(1, shots + 1):
        strategy = _best_strategy(model, posterior, f, candidates)
        likelihood = BornLikelihood(model, strategy.povm)
        probabilities = likelihood.evaluate(np.arange(len(strategy.povm)), true_theta, strategy.control)
        outcome = rng.choice(probabilities)
        posterior = bayes_update(posterior, likelihood, outcome, strategy.control)
        report = optimal_estimate(posterior, f)
        trajectory.append(
            AdaptiveStep(
                shot=shot,
                control=strategy.control,
                outcome=outcome,
                outcome_estimate=float(strategy.estimates_per_outcome[outcome]),
                gain_G=strategy.gain_G,
                report=report,
            )
        )
        logger.debug("shot %d: control=%s outcome=%d estimate=%.6g", shot, strategy.control, outcome, report.estimate)
    return trajectory
