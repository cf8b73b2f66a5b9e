from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from src.middleware.errors import DomainError


def _positive(x: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} requires x > 0 (poles at non-positive integers), got {x!r}")
    return arr


def digamma(x: ArrayLike):
    """psi^(0)(x) for x > 0."""
    result = special.psi(_positive(x, "digamma"))
    return float(result) if np.ndim(result) == 0 else result


def trigamma(x: ArrayLike):
    """psi^(1)(x) for x > 0; strictly positive."""
    result = special.polygamma(1, _positive(x, "trigamma"))
    return float(result) if np.ndim(result) == 0 else result
