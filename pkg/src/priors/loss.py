from __future__ import annotations

from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from src.middleware.errors import DomainError
from src.priors.priors import PriorDensity


def loss_from_prior(
    prior: PriorDensity,
    theta_est: float,
    theta: float,
    *,
    k: float = 2.0,
    A: Optional[float] = None,
) -> float:
    """|A * integral of the prior between theta and theta_est|^k.

    k and A are keyword-only. A defaults to the prior's normalization constant,
    which turns the k = 2 case into the quadratic loss of the canonical
    symmetry function.
    """
    if not k > 0:
        raise DomainError(f"loss exponent must be positive, got {k}")
    scale = prior.normalization if A is None else float(A)
    if not scale > 0:
        raise DomainError(f"loss units constant must be positive, got {scale}")
    points = np.array([theta_est, theta], dtype=float)
    if not np.all(prior.grid.contains(points)):
        raise DomainError(f"({theta_est}, {theta}) not inside [{prior.grid.lower}, {prior.grid.upper}]")
    if theta_est == theta:
        return 0.0
    cumulative = prior.grid.cumulative(prior.density)
    c_est, c_true = prior.grid.interpolate(cumulative, points)
    return float(abs(scale * (c_est - c_true)) ** k)


def log_loss(theta_est: ArrayLike, theta: ArrayLike) -> np.ndarray:
    """log^2(theta_est / theta)."""
    return np.log(np.asarray(theta_est, dtype=float) / np.asarray(theta, dtype=float)) ** 2


def hyperbolic_loss(theta_est: ArrayLike, theta: ArrayLike) -> np.ndarray:
    """4 arctanh^2((est - theta) / (est + theta - 2 est theta))."""
    est = np.asarray(theta_est, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return 4.0 * np.arctanh((est - theta) / (est + theta - 2.0 * est * theta)) ** 2
