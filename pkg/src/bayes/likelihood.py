from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.config.settings import NORMALIZATION_ATOL
from src.middleware.errors import DomainError, ModelError
from src.numerics.random import RandomStream


@dataclass(frozen=True)
class OutcomeSpace:
    """Outcome values with summation weights (ones for discrete spaces, quadrature weights otherwise)."""

    values: NDArray[Any]
    weights: NDArray[np.float64]
    discrete: bool


class LikelihoodModel(ABC):
    """p(x | theta, y) over a discrete or gridded continuous outcome space."""

    theta_scale: float = 1.0

    @abstractmethod
    def probability(self, outcome: Any, theta: ArrayLike, control: Any = None) -> np.ndarray:
        """Probability (or density) of one outcome, vectorized over theta."""

    @abstractmethod
    def outcome_space(self, theta: float, control: Any = None) -> OutcomeSpace:
        ...

    def evaluate(self, outcomes: np.ndarray, theta: float, control: Any = None) -> np.ndarray:
        """p(x | theta, y) for many outcomes at a single theta."""
        return np.array([float(self.probability(x, theta, control)) for x in outcomes])

    def table(self, theta: float, control: Any = None) -> np.ndarray:
        """p(x | theta, y) over every point of the outcome space."""
        return self.evaluate(self.outcome_space(theta, control).values, theta, control)

    def check_normalization(self, theta: float, control: Any = None) -> float:
        space = self.outcome_space(theta, control)
        values = self.table(theta, control)
        if np.any(values < 0):
            raise ModelError(f"{type(self).__name__}: negative probability at theta={theta}")
        total = float(np.dot(space.weights, values))
        if abs(total - 1.0) > NORMALIZATION_ATOL:
            raise ModelError(
                f"{type(self).__name__}: probabilities sum to {total:.12g} at theta={theta}, control={control}"
            )
        return total

    def sample(self, theta: float, control: Any, rng: RandomStream, size: int) -> np.ndarray:
        space = self.outcome_space(theta, control)
        if not space.discrete:
            raise NotImplementedError(f"{type(self).__name__} must implement sampling of continuous outcomes")
        probabilities = self.table(theta, control)
        self.check_normalization(theta, control)
        indices = rng.generator.choice(len(probabilities), size=size, p=probabilities / probabilities.sum())
        return space.values[indices]


class DiscreteLikelihood(LikelihoodModel):
    """Finite outcome set with a user-supplied p(x | theta, y)."""

    def __init__(
        self,
        outcomes: Sequence[Hashable],
        fn: Callable[[Any, np.ndarray, Any], ArrayLike],
        theta_scale: float = 1.0,
    ) -> None:
        if len(outcomes) == 0:
            raise DomainError("a discrete likelihood needs at least one outcome")
        self._outcomes = np.asarray(list(outcomes))
        self._fn = fn
        self.theta_scale = theta_scale

    def probability(self, outcome: Any, theta: ArrayLike, control: Any = None) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return np.broadcast_to(np.asarray(self._fn(outcome, theta, control), dtype=float), theta.shape).copy()

    def outcome_space(self, theta: float, control: Any = None) -> OutcomeSpace:
        return OutcomeSpace(self._outcomes, np.ones(len(self._outcomes)), True)
