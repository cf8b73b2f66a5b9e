from __future__ import annotations

import logging
from typing import Any

import numpy as np

from src.config.settings import (
    LYAPUNOV_RESIDUAL_ATOL,
    LYAPUNOV_RHS_ATOL,
    LYAPUNOV_SINGULAR_SUM,
)
from src.middleware.errors import LyapunovInconsistencyError, NumericalError
from src.numerics.linalg import HermitianOperator, OperatorLike, as_matrix, eigh
from src.quantum.model import QuantumModel

logger = logging.getLogger(__name__)

RANK_ATOL = 1e-10


def _symmetric_solve(rho: OperatorLike, rhs: OperatorLike, what: str) -> HermitianOperator:
    """X with X rho + rho X = 2 rhs, solved in the eigenbasis of rho.

    Components where lambda_i + lambda_j vanishes are set to zero provided the
    right-hand side has no weight there.
    """
    rho_m = as_matrix(rho)
    rhs_m = as_matrix(rhs)
    if rho_m.shape != rhs_m.shape:
        raise LyapunovInconsistencyError(f"{what}: operators of shape {rho_m.shape} and {rhs_m.shape}")
    system = eigh(rho_m)
    v = system.vectors
    r = v.conj().T @ rhs_m @ v
    sums = system.values[:, None] + system.values[None, :]
    singular = np.abs(sums) < LYAPUNOV_SINGULAR_SUM
    if np.any(singular & (np.abs(r) > LYAPUNOV_RHS_ATOL)):
        i, j = (int(k) for k in np.argwhere(singular & (np.abs(r) > LYAPUNOV_RHS_ATOL))[0])
        raise LyapunovInconsistencyError(
            f"{what}: right-hand side component ({i}, {j}) = {r[i, j]:.3e} sits on the kernel of rho"
        )
    x_eig = np.where(singular, 0.0, 2.0 * r / np.where(singular, 1.0, sums))
    x = v @ x_eig @ v.conj().T
    x = 0.5 * (x + x.conj().T)
    residual = np.linalg.norm(x @ rho_m + rho_m @ x - 2.0 * rhs_m)
    if residual > LYAPUNOV_RESIDUAL_ATOL * max(1.0, np.linalg.norm(rhs_m)):
        raise NumericalError(f"{what}: residual {residual:.3e} exceeds {LYAPUNOV_RESIDUAL_ATOL:g}")
    return HermitianOperator(x)


def solve_lyapunov(rho0: OperatorLike, rho1: OperatorLike) -> HermitianOperator:
    """S with S rho0 + rho0 S = 2 rho1."""
    return _symmetric_solve(rho0, rho1, "Lyapunov")


def sld(rho: OperatorLike, drho: OperatorLike) -> HermitianOperator:
    """Symmetric logarithmic derivative L with (L rho + rho L) / 2 = d rho."""
    return _symmetric_solve(rho, drho, "SLD")


def _rank(rho: np.ndarray) -> int:
    return int(np.sum(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)) > RANK_ATOL))


def qfi(model: QuantumModel, theta: float, control: Any = None) -> float:
    """Quantum Fisher information Tr(rho L^2)."""
    rho = model.state(theta, control)
    h = 1e-4 * max(abs(theta), model.theta_scale)
    ranks = {_rank(model.state(t, control)) for t in (theta - h, theta, theta + h)}
    if len(ranks) > 1:
        logger.warning(
            "state rank changes near theta=%g (ranks %s); QFI may not match the Bures metric",
            theta,
            sorted(ranks),
        )
    L = sld(rho, model.dstate(theta, control)).entries
    return max(float(np.trace(rho @ L @ L).real), 0.0)


def qfi_curve(model: QuantumModel, thetas: np.ndarray, control: Any = None) -> np.ndarray:
    return np.array([qfi(model, float(theta), control) for theta in thetas])
