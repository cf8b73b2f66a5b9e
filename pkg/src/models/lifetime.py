from __future__ import annotations

import logging
from typing import Any, Optional

import numpy as np
from numpy.typing import ArrayLike

from src.bayes.likelihood import LikelihoodModel, OutcomeSpace
from src.middleware.errors import DomainError
from src.models.frameworks import Framework
from src.numerics.linalg import ComplexMatrix
from src.numerics.quadrature import Grid1D, log_grid
from src.priors.priors import make_ignorance_prior, prior_from_fisher_curve
from src.priors.symmetry import SymmetryFunction, lifetime_geometric_symmetry, log_symmetry, symmetry_from_prior
from src.quantum.model import QuantumModel

logger = logging.getLogger(__name__)


def _check(theta: np.ndarray, t: float, eta: float) -> None:
    if np.any(theta <= 0):
        raise DomainError(f"lifetime must be positive, got {theta}")
    if t <= 0:
        raise DomainError(f"probe time must be positive, got {t}")
    if not 0 <= eta <= 1:
        raise DomainError(f"excited-state weight eta must lie in [0, 1], got {eta}")


def lifetime_states(theta: ArrayLike, t: float, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Decayed superposition sqrt(1-eta)|g> + sqrt(eta)|e> after time t, and d/dtheta.

    Basis order is (g, e). Returns arrays of shape (n, 2, 2).
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    _check(theta, t, eta)
    survival = np.exp(-t / theta)
    dsurvival = survival * t / theta**2
    coherence = np.sqrt(eta * (1.0 - eta))

    rho = np.empty((len(theta), 2, 2), dtype=np.complex128)
    rho[:, 0, 0] = 1.0 - eta * survival
    rho[:, 1, 1] = eta * survival
    rho[:, 0, 1] = rho[:, 1, 0] = coherence * np.sqrt(survival)

    drho = np.empty_like(rho)
    drho[:, 0, 0] = -eta * dsurvival
    drho[:, 1, 1] = eta * dsurvival
    drho[:, 0, 1] = drho[:, 1, 0] = coherence * np.sqrt(survival) * t / (2.0 * theta**2)
    return rho, drho


def lifetime_state(theta: float, t: float, eta: float) -> tuple[ComplexMatrix, ComplexMatrix]:
    rho, drho = lifetime_states(theta, t, eta)
    return rho[0], drho[0]


def lifetime_fisher(theta: ArrayLike, t: float, eta: float = 1.0) -> np.ndarray:
    """Closed-form quantum Fisher information of the decayed probe."""
    theta = np.asarray(theta, dtype=float)
    _check(np.atleast_1d(theta), t, eta)
    q = np.exp(-t / theta)
    return eta * t**2 * q * (1.0 + (eta - 1.0) * q) / (theta**4 * -np.expm1(-t / theta))


class LifetimeModel(QuantumModel):
    """Two-level atom probed after a time t; the control, when given, overrides t."""

    dim = 2
    control_name = "probe_time"

    def __init__(self, eta: float = 1.0, t: float = 1.0) -> None:
        _check(np.array([1.0]), t, eta)
        self.eta = eta
        self.t = t
        self.theta_scale = t

    def _time(self, control: Any) -> float:
        return self.t if control is None else float(control)

    def states(self, thetas: ArrayLike, control: Any = None) -> np.ndarray:
        return lifetime_states(thetas, self._time(control), self.eta)[0]

    def state(self, theta: float, control: Any = None) -> ComplexMatrix:
        return self.states([theta], control)[0]

    def dstate(self, theta: float, control: Any = None) -> ComplexMatrix:
        return lifetime_states(theta, self._time(control), self.eta)[1][0]


def lifetime_likelihood(s: int, theta: ArrayLike, t: float, eta: float = 1.0) -> np.ndarray:
    """Energy-basis outcome (0 ground, 1 excited) for an initially excited atom."""
    if eta != 1.0:
        raise DomainError("the energy-basis likelihood only describes eta = 1; use the Born rule otherwise")
    if s not in (0, 1):
        raise DomainError(f"outcome must be 0 or 1, got {s}")
    theta = np.asarray(theta, dtype=float)
    _check(np.atleast_1d(theta), t, eta)
    survival = np.exp(-t / theta)
    return survival if s == 1 else -np.expm1(-t / theta)


class LifetimeLikelihood(LikelihoodModel):
    """Energy-basis measurement after a probe time (control) with default t."""

    def __init__(self, t: float = 1.0) -> None:
        self.t = t
        self.theta_scale = t

    def probability(self, outcome: Any, theta: ArrayLike, control: Any = None) -> np.ndarray:
        return lifetime_likelihood(int(outcome), theta, self.t if control is None else float(control))

    def outcome_space(self, theta: float, control: Any = None) -> OutcomeSpace:
        return OutcomeSpace(np.array([0, 1]), np.ones(2), True)


def lifetime_grid(b: float, t: float, nodes: int) -> Grid1D:
    """Hypotheses theta in (t/b, t b)."""
    if not b > 1:
        raise DomainError(f"prior width b must exceed 1, got {b}")
    return log_grid(t / b, t * b, nodes)


def geometric_symmetry_numeric(grid: Grid1D, t: float, eta: float) -> SymmetryFunction:
    """Antiderivative of sqrt(I) for arbitrary eta, by cumulative quadrature.

    Decreasing in theta like the eta = 1 closed form, anchored to 0 at the upper end.
    """
    prior = prior_from_fisher_curve(lifetime_fisher(grid.nodes, t, eta), grid)
    return symmetry_from_prior(prior, c1=-prior.normalization, c2=0.0, theta_u=grid.upper)


def lifetime_frameworks(grid: Grid1D, t: float = 1.0, eta: Optional[float] = None) -> dict[str, Framework]:
    """Scale estimation and the geometric framework for the probe preparation eta.

    eta = None uses the closed-form eta = 1 geometry; any other eta takes the
    numerical path.
    """
    transformation = Framework("transformation", make_ignorance_prior("jeffreys_scale", grid), log_symmetry(grid, theta_u=t))
    geometric_eta = 1.0 if eta is None else eta
    prior_g = prior_from_fisher_curve(lifetime_fisher(grid.nodes, t, geometric_eta), grid)
    if eta is None:
        f_g = lifetime_geometric_symmetry(grid, t)
    else:
        logger.info("building the geometric symmetry function numerically for eta=%g", eta)
        f_g = geometric_symmetry_numeric(grid, t, eta)
    return {"transformation": transformation, "geometry": Framework("geometry", prior_g, f_g)}
