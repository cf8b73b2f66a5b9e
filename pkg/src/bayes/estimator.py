from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.middleware.errors import GridMismatchError
from src.numerics.quadrature import integrate_grid
from src.priors.priors import GridDensity
from src.priors.symmetry import SymmetryFunction

logger = logging.getLogger(__name__)


class EstimateReport(BaseModel):
    """Optimal estimate under the quadratic loss of a symmetry function."""

    model_config = ConfigDict(frozen=True)

    estimate: float = Field(..., description="f^-1 of the posterior mean of f")
    error: float = Field(..., ge=0, description="sqrt(empirical loss) / |f'(estimate)|")
    empirical_loss: float = Field(..., ge=0, description="Posterior variance of f")
    f_mean: float = Field(..., description="Posterior mean of f")
    clamped: bool = Field(False, description="f_mean fell outside the tabulated f range")


class FMoments(NamedTuple):
    mean: float
    second: float

    @property
    def variance(self) -> float:
        return max(self.second - self.mean**2, 0.0)


def _check_grids(state: GridDensity, f: SymmetryFunction) -> None:
    if not state.grid.same_as(f.grid):
        raise GridMismatchError(
            f"density on {len(state.grid)} {state.grid.spacing} nodes, "
            f"symmetry function on {len(f.grid)} {f.grid.spacing} nodes"
        )


def f_moments(state: GridDensity, f: SymmetryFunction) -> FMoments:
    """First and second moments of f under a tabulated density."""
    _check_grids(state, f)
    return FMoments(
        mean=integrate_grid(state.density * f.f_values, state.grid),
        second=integrate_grid(state.density * f.f_values**2, state.grid),
    )


def prior_f_moments(prior: GridDensity, f: SymmetryFunction) -> FMoments:
    """Prior moments of f; the variance is the optimal loss before any measurement."""
    return f_moments(prior, f)


def optimal_estimate(state: GridDensity, f: SymmetryFunction) -> EstimateReport:
    moments = f_moments(state, f)
    inversion = f.inverse(moments.mean)
    if inversion.clamped:
        logger.warning(
            "posterior mean of f = %.6g outside tabulated range [%.6g, %.6g]; estimate clamped to %g",
            moments.mean,
            *f.f_range,
            inversion.value,
        )
    slope = float(np.abs(f.derivative(inversion.value)))
    loss = moments.variance
    return EstimateReport(
        estimate=inversion.value,
        error=float(np.sqrt(loss) / slope),
        empirical_loss=loss,
        f_mean=moments.mean,
        clamped=inversion.clamped,
    )
