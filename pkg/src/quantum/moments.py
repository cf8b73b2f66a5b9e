from __future__ import annotations

from typing import Any

import numpy as np

from src.middleware.errors import DomainError, GridMismatchError
from src.numerics.linalg import HermitianOperator
from src.priors.priors import GridDensity
from src.priors.symmetry import SymmetryFunction
from src.quantum.model import QuantumModel


def state_moment(
    model: QuantumModel,
    prior: GridDensity,
    f: SymmetryFunction,
    k: int,
    control: Any = None,
) -> HermitianOperator:
    """rho_{y,k}: quadrature of p(theta) f(theta)^k rho_y(theta) over the grid."""
    if k not in (0, 1, 2):
        raise DomainError(f"state moments are defined for k in {{0, 1, 2}}, got {k}")
    if not prior.grid.same_as(f.grid):
        raise GridMismatchError("prior and symmetry function live on different grids")
    coefficients = prior.grid.weights * prior.density * f.f_values**k
    support = coefficients != 0
    states = model.states(prior.grid.nodes[support], control)
    return HermitianOperator(np.einsum("n,nij->ij", coefficients[support], states))
