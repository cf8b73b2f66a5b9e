from __future__ import annotations

from typing import Any, Callable, NamedTuple

import numpy as np
from numpy.typing import ArrayLike

from src.middleware.errors import ConfigError, GridMismatchError
from src.priors.priors import PriorDensity
from src.priors.symmetry import SymmetryFunction
from src.quantum.model import QuantumModel
from src.quantum.strategy import optimal_strategy

TIE_RTOL = 1e-12


class ProbeOptimum(NamedTuple):
    eta_star: float
    gain_curve: np.ndarray


def optimize_probe(
    model_family: Callable[[float], QuantumModel],
    prior: PriorDensity,
    f: SymmetryFunction,
    eta_grid: ArrayLike,
    control: Any = None,
) -> ProbeOptimum:
    """Precision gain as a function of the probe parameter; argmax with ties toward larger eta.

    One prior and one f serve every eta, so both must be built without
    reference to the probe. A geometric pair built for one particular eta is
    accepted but ties the whole curve to that eta. Anything other than a single
    SymmetryFunction on the prior's grid is rejected.
    """
    if not isinstance(f, SymmetryFunction):
        raise ConfigError(
            "probe optimization needs one fixed symmetry function; an eta-dependent f would change "
            "the loss (and the prior it encodes) with the very parameter being optimized"
        )
    if not f.grid.same_as(prior.grid):
        raise GridMismatchError("prior and symmetry function live on different grids")
    etas = np.asarray(eta_grid, dtype=float)
    if etas.ndim != 1 or len(etas) == 0:
        raise ConfigError("eta grid must be a nonempty 1-D list")
    gains = np.array([optimal_strategy(model_family(float(eta)), prior, f, control).gain_G for eta in etas])
    best = gains.max()
    ties = np.flatnonzero(gains >= best - TIE_RTOL * max(abs(best), 1.0))
    return ProbeOptimum(eta_star=float(etas[ties].max()), gain_curve=gains)
