from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.middleware.errors import DomainError
from src.priors.priors import PriorDensity


class ParameterTransform(BaseModel):
    """One-parameter family of reparametrizations theta -> tau_gamma(theta)."""

    model_config = ConfigDict(frozen=True)

    family: str = Field(..., pattern="^(scale|translation|mobius)$", description="Transformation family")
    gamma: float = Field(..., description="Free constant of the family")

    @model_validator(mode="after")
    def _check_gamma(self) -> "ParameterTransform":
        if not np.isfinite(self.gamma):
            raise ValueError("gamma must be finite")
        if self.family in ("scale", "mobius") and self.gamma <= 0:
            raise ValueError(f"{self.family} transform needs gamma > 0")
        return self

    def __call__(self, theta: ArrayLike) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.family == "scale":
            return self.gamma * theta
        if self.family == "translation":
            return theta + self.gamma
        return self.gamma * theta / (1.0 - theta + self.gamma * theta)

    def derivative(self, theta: ArrayLike) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.family == "scale":
            return np.full_like(theta, self.gamma)
        if self.family == "translation":
            return np.ones_like(theta)
        return self.gamma / (1.0 - theta + self.gamma * theta) ** 2


def verify_prior_invariance(prior: PriorDensity, transform: ParameterTransform) -> float:
    """Max |p(tau(theta)) |tau'(theta)| - p(theta)| over grid nodes mapped inside the range.

    Compared on the unnormalized form and reported relative to the largest
    density value on the overlap.
    """
    theta = prior.grid.nodes
    mapped = transform(theta)
    overlap = prior.grid.contains(mapped)
    if not np.any(overlap):
        raise DomainError(f"{transform.family}(gamma={transform.gamma}) maps the grid outside itself")
    base = prior.unnormalized(theta[overlap])
    pulled = prior.unnormalized(mapped[overlap]) * np.abs(transform.derivative(theta[overlap]))
    return float(np.max(np.abs(pulled - base)) / np.max(np.abs(base)))
