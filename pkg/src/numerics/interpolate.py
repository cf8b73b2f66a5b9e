from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike
from scipy.interpolate import PchipInterpolator

from src.middleware.errors import GridMismatchError, NonMonotoneError


class Inversion(NamedTuple):
    value: float
    clamped: bool


def invert_monotone(table_x: ArrayLike, table_y: ArrayLike, y: float) -> Inversion:
    """Solve f(x) = y for a tabulated strictly monotone f.

    Uses a shape-preserving cubic through (table_y, table_x). When y lies outside
    the tabulated range the nearest end of table_x is returned with clamped=True.
    """
    xs = np.asarray(table_x, dtype=float)
    ys = np.asarray(table_y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or len(xs) < 2:
        raise GridMismatchError(f"tables of shape {xs.shape} and {ys.shape} cannot be paired")
    steps = np.diff(ys)
    if np.all(steps < 0):
        xs, ys = xs[::-1], ys[::-1]
    elif not np.all(steps > 0):
        bad = int(np.flatnonzero((steps == 0) | (np.sign(steps) != np.sign(steps[0])))[0])
        raise NonMonotoneError(f"table_y is not strictly monotone near index {bad}")

    if y <= ys[0]:
        return Inversion(float(xs[0]), bool(y < ys[0]))
    if y >= ys[-1]:
        return Inversion(float(xs[-1]), bool(y > ys[-1]))
    return Inversion(float(PchipInterpolator(ys, xs)(y)), False)
