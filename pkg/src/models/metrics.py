from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from src.middleware.errors import DomainError


def nsr(estimates: ArrayLike) -> float:
    """Noise-to-signal ratio var/mean^2 with population (1/m) variance."""
    values = np.asarray(estimates, dtype=float)
    if values.size == 0:
        raise DomainError("NSR of an empty sample is undefined")
    mean = values.mean()
    if mean == 0:
        raise DomainError("NSR is undefined for a zero-mean sample")
    return float(max(np.mean(values**2) - mean**2, 0.0) / mean**2)


def nsr_percent(estimates: ArrayLike) -> float:
    return 100.0 * nsr(estimates)


def coverage(estimates: ArrayLike, errors: ArrayLike, truth: float, k: float = 3.0) -> float:
    """Fraction of runs whose k-sigma interval contains the true value."""
    estimates = np.asarray(estimates, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return float(np.mean(np.abs(estimates - truth) <= k * errors))
