from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Any, Sequence

import numpy as np
from numpy.typing import NDArray

from src.middleware.errors import ContradictionError, DomainError, ModelError
from src.numerics.quadrature import Grid1D, integrate_grid
from src.bayes.likelihood import LikelihoodModel
from src.priors.priors import PriorDensity

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PosteriorState:
    """Normalized posterior on a grid after ``shot_count`` updates.

    ``log_evidence`` accumulates log p(x_1..x_n | y_1..y_n) under the initial prior.
    """

    grid: Grid1D
    density: NDArray[np.float64]
    shot_count: int = 0
    log_evidence: float = 0.0

    def __post_init__(self) -> None:
        density = np.asarray(self.density, dtype=float)
        density.setflags(write=False)
        object.__setattr__(self, "density", density)

    @classmethod
    def from_prior(cls, prior: PriorDensity) -> "PosteriorState":
        return cls(grid=prior.grid, density=prior.density)

    def mean(self) -> float:
        return integrate_grid(self.density * self.grid.nodes, self.grid)


def _likelihood_on_grid(model: LikelihoodModel, outcome: Any, grid: Grid1D, control: Any) -> np.ndarray:
    values = np.asarray(model.probability(outcome, grid.nodes, control), dtype=float)
    if values.shape != grid.nodes.shape:
        raise ModelError(f"{type(model).__name__} returned shape {values.shape} for {len(grid)} hypotheses")
    if np.any(values < 0) or np.any(~np.isfinite(values)):
        raise ModelError(f"{type(model).__name__} produced an invalid probability for outcome {outcome!r}")
    return values


def bayes_update(
    state: PosteriorState, model: LikelihoodModel, outcome: Any, control: Any = None
) -> PosteriorState:
    """One Bayes step: multiply by p(outcome | theta, control) and renormalize."""
    unnormalized = state.density * _likelihood_on_grid(model, outcome, state.grid, control)
    z = integrate_grid(unnormalized, state.grid)
    if not z > 0:
        raise ContradictionError(
            f"outcome {outcome!r} (control {control!r}) has zero probability on the whole grid "
            f"after {state.shot_count} shot(s)"
        )
    return replace(
        state,
        density=unnormalized / z,
        shot_count=state.shot_count + 1,
        log_evidence=state.log_evidence + float(np.log(z)),
    )


def _broadcast_controls(outcomes: Sequence[Any], controls: Any) -> list[Any]:
    if controls is None or np.ndim(controls) == 0:
        return [controls] * len(outcomes)
    controls = list(controls)
    if len(controls) != len(outcomes):
        raise DomainError(f"{len(outcomes)} outcomes but {len(controls)} controls")
    return controls


def bayes_update_many(
    state: PosteriorState, model: LikelihoodModel, outcomes: Sequence[Any], controls: Any = None
) -> PosteriorState:
    """Joint update with the product likelihood, accumulated in the log domain."""
    outcomes = list(outcomes)
    if not outcomes:
        return state
    log_post = np.zeros(len(state.grid))
    with np.errstate(divide="ignore"):
        for outcome, control in zip(outcomes, _broadcast_controls(outcomes, controls)):
            log_post += np.log(_likelihood_on_grid(model, outcome, state.grid, control))
        log_prior = np.log(state.density)
    log_post += log_prior
    peak = np.max(log_post)
    if not np.isfinite(peak):
        raise ContradictionError(f"{len(outcomes)} outcomes have zero joint probability on the whole grid")
    weights = np.exp(log_post - peak)
    z = integrate_grid(weights, state.grid)
    return replace(
        state,
        density=weights / z,
        shot_count=state.shot_count + len(outcomes),
        log_evidence=state.log_evidence + peak + float(np.log(z)),
    )
