from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Protocol

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.config.settings import NORMALIZATION_ATOL
from src.middleware.errors import DomainError, GridMismatchError
from src.numerics.quadrature import Grid1D, integrate_grid

logger = logging.getLogger(__name__)

PriorKind = Literal["flat", "jeffreys_scale", "weight", "geometric", "custom"]


class GridDensity(Protocol):
    """Anything carrying a normalized density tabulated on a grid (priors and posteriors)."""

    grid: Grid1D
    density: NDArray[np.float64]


def _flat(theta: np.ndarray) -> np.ndarray:
    return np.ones_like(theta)


def _jeffreys_scale(theta: np.ndarray) -> np.ndarray:
    return 1.0 / theta


def _weight(theta: np.ndarray) -> np.ndarray:
    return 1.0 / (theta * (1.0 - theta))


# closed-form unnormalized ignorance densities
_CANONICAL: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "flat": _flat,
    "jeffreys_scale": _jeffreys_scale,
    "weight": _weight,
}


@dataclass(frozen=True, eq=False)
class PriorDensity:
    """Normalized prior tabulated on a grid.

    ``normalization`` is the integral Z of the unnormalized form over the grid
    range, so ``density * normalization`` recovers the canonical shape
    (1, 1/theta, 1/[theta(1-theta)], sqrt(I), ...).
    """

    grid: Grid1D
    density: NDArray[np.float64]
    kind: PriorKind
    normalization: float = 1.0

    def __post_init__(self) -> None:
        density = np.asarray(self.density, dtype=float)
        if density.shape != self.grid.nodes.shape:
            raise GridMismatchError(
                f"density of length {density.shape[0]} on a grid of {len(self.grid)} nodes"
            )
        if np.any(~np.isfinite(density)) or np.any(density < 0):
            raise DomainError(f"{self.kind} prior density must be finite and nonnegative")
        mass = integrate_grid(density, self.grid)
        if abs(mass - 1.0) > NORMALIZATION_ATOL:
            raise DomainError(f"{self.kind} prior integrates to {mass:.12g}, expected 1")
        density.setflags(write=False)
        object.__setattr__(self, "density", density)

    def unnormalized(self, theta: ArrayLike) -> np.ndarray:
        """Canonical unnormalized density at arbitrary theta (NaN off-grid for tabulated kinds)."""
        theta = np.asarray(theta, dtype=float)
        if self.kind in _CANONICAL:
            with np.errstate(divide="ignore", invalid="ignore"):
                return _CANONICAL[self.kind](theta)
        return self.grid.interpolate(self.density * self.normalization, theta)

    def __call__(self, theta: ArrayLike) -> np.ndarray:
        return self.unnormalized(theta) / self.normalization


def _check_domain(kind: str, grid: Grid1D) -> None:
    if kind in ("jeffreys_scale", "weight") and grid.lower <= 0:
        raise DomainError(f"{kind} prior needs theta > 0, grid starts at {grid.lower}")
    if kind == "weight" and not grid.upper < 1.0:
        raise DomainError(
            f"weight prior needs theta < 1, grid ends at {grid.upper} (indistinguishable from 1)"
        )


def _normalized(unnormalized: np.ndarray, grid: Grid1D, kind: PriorKind) -> PriorDensity:
    z = integrate_grid(unnormalized, grid)
    if not np.isfinite(z) or z <= 0:
        raise DomainError(f"{kind} prior cannot be normalized over [{grid.lower}, {grid.upper}]")
    return PriorDensity(grid=grid, density=unnormalized / z, kind=kind, normalization=z)


def make_ignorance_prior(kind: PriorKind, grid: Grid1D) -> PriorDensity:
    """Flat, scale-invariant (1/theta) or Mobius-invariant (1/[theta(1-theta)]) prior."""
    if kind not in _CANONICAL:
        raise DomainError(f"no closed-form ignorance prior of kind {kind!r}")
    _check_domain(kind, grid)
    return _normalized(_CANONICAL[kind](grid.nodes), grid, kind)


def prior_from_fisher_curve(fisher_values: ArrayLike, grid: Grid1D) -> PriorDensity:
    """Jeffreys' general rule: density proportional to sqrt(I(theta))."""
    values = np.asarray(fisher_values, dtype=float)
    if values.shape != grid.nodes.shape:
        raise GridMismatchError(f"Fisher curve of length {values.shape} on {len(grid)} nodes")
    if np.any(values < 0) or np.any(~np.isfinite(values)):
        raise DomainError("Fisher information must be finite and nonnegative")
    if not np.any(values > 0):
        raise DomainError("Fisher curve vanishes everywhere: no sensitivity to the parameter")
    return _normalized(np.sqrt(values), grid, "geometric")


def prior_from_density(values: ArrayLike, grid: Grid1D, kind: PriorKind = "custom") -> PriorDensity:
    """Normalize an arbitrary nonnegative table into a prior."""
    values = np.asarray(values, dtype=float)
    if values.shape != grid.nodes.shape:
        raise GridMismatchError(f"density of length {values.shape} on {len(grid)} nodes")
    if np.any(values < 0):
        raise DomainError("density must be nonnegative")
    return _normalized(values, grid, kind)


def delta_prior(grid: Grid1D, theta0: float) -> PriorDensity:
    """All mass on the grid node nearest theta0."""
    index = int(np.argmin(np.abs(grid.nodes - theta0)))
    values = np.zeros(len(grid))
    values[index] = 1.0 / grid.weights[index]
    return PriorDensity(grid=grid, density=values, kind="custom", normalization=1.0)


def as_prior(state: GridDensity, kind: Optional[PriorKind] = None) -> PriorDensity:
    """View a posterior as the prior of the next stage."""
    if isinstance(state, PriorDensity):
        return state
    return PriorDensity(grid=state.grid, density=np.array(state.density), kind=kind or "custom")
