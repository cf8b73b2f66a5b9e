from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from src.bayes.estimator import prior_f_moments
from src.config.settings import POVM_MERGE_ATOL
from src.numerics.linalg import HermitianOperator, OperatorLike, as_matrix, eigh
from src.priors.priors import GridDensity
from src.priors.symmetry import SymmetryFunction
from src.quantum.lyapunov import solve_lyapunov
from src.quantum.model import Povm, QuantumModel
from src.quantum.moments import state_moment

logger = logging.getLogger(__name__)

TRACE_SKIP_ATOL = 1e-14


@dataclass(frozen=True, eq=False)
class StrategyReport:
    """Optimal single-shot measurement and estimator for one control setting."""

    S_operator: HermitianOperator
    povm: Povm
    estimates_per_outcome: NDArray[np.float64]
    out_of_range: NDArray[np.bool_]
    gain_G: float
    min_loss: float
    intrinsic_gain: float
    prior_f_mean: float
    prior_f_second: float
    rho0: HermitianOperator
    rho1: HermitianOperator
    control: Any = None

    @property
    def prior_loss(self) -> float:
        """Optimal loss before measuring: prior variance of f."""
        return max(self.prior_f_second - self.prior_f_mean**2, 0.0)


def _merge_spectrum(values: np.ndarray, vectors: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    elements, labels = [], []
    start = 0
    while start < len(values):
        stop = start + 1
        while stop < len(values) and values[stop] - values[stop - 1] < POVM_MERGE_ATOL:
            stop += 1
        block = vectors[:, start:stop]
        elements.append(block @ block.conj().T)
        labels.append(float(np.mean(values[start:stop])))
        start = stop
    return elements, np.array(labels)


def optimal_strategy(
    model: QuantumModel, prior: GridDensity, f: SymmetryFunction, control: Any = None
) -> StrategyReport:
    """Project onto the eigenstates of S and map each eigenvalue through f^-1."""
    rho0 = state_moment(model, prior, f, 0, control)
    rho1 = state_moment(model, prior, f, 1, control)
    S = solve_lyapunov(rho0, rho1)
    system = eigh(S)
    elements, labels = _merge_spectrum(system.values, system.vectors)
    povm = Povm(tuple(HermitianOperator(e) for e in elements), labels)

    inversions = [f.inverse(float(s)) for s in labels]
    estimates = np.array([inv.value for inv in inversions])
    out_of_range = np.array([inv.clamped for inv in inversions])
    if np.any(out_of_range):
        logger.warning(
            "%d POVM outcome(s) have f-labels outside the tabulated range; estimates clamped",
            int(out_of_range.sum()),
        )

    s = S.entries
    rho0_m = rho0.entries
    gain = float(np.trace(rho0_m @ s @ s).real)
    moments = prior_f_moments(prior, f)
    min_loss = max(moments.second - gain, 0.0)
    prior_variance = moments.variance
    spread = gain - float(np.trace(rho0_m @ s).real) ** 2
    intrinsic = float(np.clip(spread / prior_variance, 0.0, 1.0)) if prior_variance > 0 else 0.0

    return StrategyReport(
        S_operator=S,
        povm=povm,
        estimates_per_outcome=estimates,
        out_of_range=out_of_range,
        gain_G=gain,
        min_loss=min_loss,
        intrinsic_gain=intrinsic,
        prior_f_mean=moments.mean,
        prior_f_second=moments.second,
        rho0=rho0,
        rho1=rho1,
        control=control,
    )


def consistency_check(report: StrategyReport, rho0: OperatorLike, rho1: OperatorLike) -> float:
    """Max over outcomes of |s - Tr(P rho1) / Tr(P rho0)|."""
    rho0_m = as_matrix(rho0)
    rho1_m = as_matrix(rho1)
    worst = 0.0
    for label, element in zip(report.povm.labels, report.povm.elements):
        weight = float(np.trace(element.entries @ rho0_m).real)
        if weight < TRACE_SKIP_ATOL:
            logger.debug("outcome with label %.6g has no prior weight; skipped", label)
            continue
        ratio = float(np.trace(element.entries @ rho1_m).real) / weight
        worst = max(worst, abs(label - ratio))
    return worst
