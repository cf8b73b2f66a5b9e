from __future__ import annotations

import logging
from typing import Any, NamedTuple

import numpy as np
from numpy.typing import ArrayLike

from src.bayes.estimator import EstimateReport
from src.bayes.likelihood import LikelihoodModel, OutcomeSpace
from src.middleware.errors import DomainError
from src.numerics.linalg import ComplexMatrix
from src.numerics.quadrature import Grid1D, logit_grid
from src.models.frameworks import Framework
from src.priors.priors import make_ignorance_prior, prior_from_fisher_curve
from src.priors.symmetry import arcsine_symmetry, hyperbolic_symmetry
from src.quantum.lyapunov import qfi_curve
from src.quantum.model import QuantumModel

logger = logging.getLogger(__name__)

DEFAULT_NOISE = 0.1


def _check_theta(theta: np.ndarray) -> None:
    if np.any((theta < 0) | (theta > 1)):
        raise DomainError(f"coherence parameter must lie in [0, 1], got {theta}")


class CoherenceModel(QuantumModel):
    """Qubit sqrt(1-theta)|0> + sqrt(theta)|1> after a depolarizing channel of strength lam."""

    dim = 2
    control_name = "none"

    def __init__(self, lam: float = DEFAULT_NOISE) -> None:
        if not 0 <= lam <= 1:
            raise DomainError(f"depolarizing strength must lie in [0, 1], got {lam}")
        self.lam = lam

    def states(self, thetas: ArrayLike, control: Any = None) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(thetas, dtype=float))
        _check_theta(theta)
        keep = 1.0 - self.lam
        off = keep * np.sqrt(theta * (1.0 - theta))
        out = np.empty((len(theta), 2, 2), dtype=np.complex128)
        out[:, 0, 0] = keep * (1.0 - theta) + self.lam / 2.0
        out[:, 1, 1] = keep * theta + self.lam / 2.0
        out[:, 0, 1] = off
        out[:, 1, 0] = off
        return out

    def state(self, theta: float, control: Any = None) -> ComplexMatrix:
        return self.states([theta], control)[0]

    def dstate(self, theta: float, control: Any = None) -> ComplexMatrix:
        if not 0 < theta < 1:
            raise DomainError(f"d rho / d theta is singular at theta = {theta}")
        keep = 1.0 - self.lam
        off = keep * (1.0 - 2.0 * theta) / (2.0 * np.sqrt(theta * (1.0 - theta)))
        return np.array([[-keep, off], [off, keep]], dtype=np.complex128)


def coherence_likelihood(s: int, theta: ArrayLike, lam: float = DEFAULT_NOISE) -> np.ndarray:
    """Computational-basis outcome: p(1 | theta) = (1 - lam) theta + lam / 2."""
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0) | (theta > 1)):
        raise DomainError(f"coherence parameter must lie in [0, 1], got {theta}")
    if s not in (0, 1):
        raise DomainError(f"outcome must be 0 or 1, got {s}")
    excited = (1.0 - lam) * theta + lam / 2.0
    return excited if s == 1 else 1.0 - excited


class CoherenceLikelihood(LikelihoodModel):
    def __init__(self, lam: float = DEFAULT_NOISE) -> None:
        self.lam = lam

    def probability(self, outcome: Any, theta: ArrayLike, control: Any = None) -> np.ndarray:
        return coherence_likelihood(int(outcome), theta, self.lam)

    def outcome_space(self, theta: float, control: Any = None) -> OutcomeSpace:
        return OutcomeSpace(np.array([0, 1]), np.ones(2), True)


class CoherenceEstimate(NamedTuple):
    zeta: float
    dzeta: float
    singular: bool


def coherence_quantifier(report: EstimateReport, lam: float = DEFAULT_NOISE) -> CoherenceEstimate:
    """l1-norm coherence of the estimated state with a linearly propagated error bar."""
    theta = report.estimate
    if not 0 <= theta <= 1:
        raise DomainError(f"estimate {theta} outside [0, 1]")
    keep = 1.0 - lam
    root = np.sqrt(theta * (1.0 - theta))
    if root == 0:
        return CoherenceEstimate(0.0, float("inf"), True)
    zeta = 2.0 * keep * root
    dzeta = keep * abs(1.0 - 2.0 * theta) / root * report.error
    return CoherenceEstimate(float(zeta), float(dzeta), False)


def theta_for_zeta(zeta: float, lam: float = DEFAULT_NOISE, upper_root: bool = True) -> float:
    """Invert zeta = 2 (1 - lam) sqrt(theta (1 - theta)); the map is two-to-one."""
    peak = 1.0 - lam
    if not 0 <= zeta <= peak:
        raise DomainError(f"coherence {zeta} outside [0, {peak}]")
    half_gap = 0.5 * np.sqrt(1.0 - (zeta / peak) ** 2)
    return float(0.5 + half_gap if upper_root else 0.5 - half_gap)


def coherence_grid(a: float, nodes: int) -> Grid1D:
    if not 0.5 < a < 1:
        raise DomainError(f"prior width a must lie in (1/2, 1), got {a}")
    return logit_grid(1.0 - a, a, nodes)


def coherence_frameworks(grid: Grid1D, lam: float = DEFAULT_NOISE) -> dict[str, Framework]:
    """Weight estimation (Mobius-invariant prior) and the QFI-based geometric prior."""
    geometric = prior_from_fisher_curve(qfi_curve(CoherenceModel(lam), grid.nodes), grid)
    return {
        "transformation": Framework("transformation", make_ignorance_prior("weight", grid), hyperbolic_symmetry(grid)),
        "geometry": Framework("geometry", geometric, arcsine_symmetry(grid)),
    }
