from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import cumulative_simpson
from scipy.interpolate import PchipInterpolator
from scipy.special import expit, logit

from src.middleware.errors import DomainError, GridMismatchError

SpacingKind = Literal["linear", "logarithmic", "logit"]

MIN_NODES = 16


def simpson_weights(n: int, h: float) -> NDArray[np.float64]:
    """Composite Simpson weights on n equispaced nodes.

    An odd number of intervals is closed with Simpson's 3/8 rule on the last
    three, so the rule stays exact for cubics for every n >= 4.
    """
    if n < 4:
        raise DomainError(f"Simpson quadrature needs at least 4 nodes, got {n}")
    intervals = n - 1
    w = np.zeros(n)
    simpson_end = intervals if intervals % 2 == 0 else intervals - 3
    if simpson_end > 0:
        w[0:simpson_end + 1:2] += 2.0
        w[1:simpson_end:2] += 4.0
        w[0] -= 1.0
        w[simpson_end] -= 1.0
        w *= h / 3.0
    if simpson_end != intervals:
        w[simpson_end:] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    return w


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Quadrature nodes and weights over a hypothesis range.

    Nodes are equispaced in a coordinate u: u = theta (linear), u = log theta
    (logarithmic) or u = log(theta / (1 - theta)) (logit). Weights already
    include the Jacobian dtheta/du.
    """

    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    spacing: SpacingKind
    u: NDArray[np.float64]

    def __post_init__(self) -> None:
        if len(self.nodes) != len(self.weights) or len(self.nodes) < MIN_NODES:
            raise DomainError(
                f"grid needs matching nodes/weights with at least {MIN_NODES} entries"
            )
        if np.any(np.diff(self.nodes) <= 0):
            raise DomainError("grid nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise DomainError("grid weights must be positive")
        for arr in (self.nodes, self.weights, self.u):
            arr.setflags(write=False)

    @classmethod
    def build(cls, lower: float, upper: float, n: int, spacing: SpacingKind = "linear") -> "Grid1D":
        if not lower < upper:
            raise DomainError(f"empty range [{lower}, {upper}]")
        if n < MIN_NODES:
            raise DomainError(f"grid needs at least {MIN_NODES} nodes, got {n}")
        if spacing == "linear":
            u = np.linspace(lower, upper, n)
            nodes = u.copy()
            jac = np.ones(n)
        elif spacing == "logarithmic":
            if lower <= 0:
                raise DomainError(f"logarithmic grid needs lower > 0, got {lower}")
            u = np.linspace(np.log(lower), np.log(upper), n)
            nodes = np.exp(u)
            nodes[0], nodes[-1] = lower, upper
            jac = nodes
        elif spacing == "logit":
            if lower <= 0 or upper >= 1:
                raise DomainError(f"logit grid needs 0 < lower < upper < 1, got [{lower}, {upper}]")
            u = np.linspace(logit(lower), logit(upper), n)
            nodes = expit(u)
            nodes[0], nodes[-1] = lower, upper
            jac = nodes * (1.0 - nodes)
        else:
            raise DomainError(f"unknown spacing kind {spacing!r}")
        if np.any(np.diff(nodes) <= 0):
            raise DomainError(
                f"range [{lower}, {upper}] is not resolvable with {n} {spacing} nodes"
            )
        weights = simpson_weights(n, u[1] - u[0]) * jac
        return cls(nodes=nodes, weights=weights, spacing=spacing, u=u)

    @property
    def lower(self) -> float:
        return float(self.nodes[0])

    @property
    def upper(self) -> float:
        return float(self.nodes[-1])

    def __len__(self) -> int:
        return len(self.nodes)

    def to_u(self, theta: ArrayLike) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.spacing == "logarithmic":
            return np.log(theta)
        if self.spacing == "logit":
            return logit(theta)
        return theta

    def jacobian(self) -> NDArray[np.float64]:
        """dtheta/du at the nodes."""
        if self.spacing == "logarithmic":
            return self.nodes
        if self.spacing == "logit":
            return self.nodes * (1.0 - self.nodes)
        return np.ones_like(self.nodes)

    def contains(self, theta: ArrayLike) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return (theta >= self.lower) & (theta <= self.upper)

    def same_as(self, other: "Grid1D") -> bool:
        return self is other or (
            len(self) == len(other)
            and self.spacing == other.spacing
            and np.allclose(self.nodes, other.nodes, rtol=1e-13, atol=0.0)
        )

    def interpolate(self, table: ArrayLike, theta: ArrayLike) -> np.ndarray:
        """Monotone-preserving interpolation of a nodal table, carried out in u."""
        table = np.asarray(table, dtype=float)
        if table.shape != self.nodes.shape:
            raise GridMismatchError(f"table of length {table.shape} on a grid of {len(self)} nodes")
        return PchipInterpolator(self.u, table, extrapolate=False)(self.to_u(theta))

    def cumulative(self, values: ArrayLike) -> NDArray[np.float64]:
        """Running integral from the lower end to every node."""
        values = _check_length(values, self)
        return cumulative_simpson(values * self.jacobian(), x=self.u, initial=0.0)


def _check_length(values: ArrayLike, grid: Grid1D) -> NDArray[np.float64]:
    values = np.asarray(values, dtype=float)
    if values.shape != grid.nodes.shape:
        raise GridMismatchError(
            f"{values.shape[0] if values.ndim else 'scalar'} values supplied for a grid of {len(grid)} nodes"
        )
    return values


def linear_grid(lower: float, upper: float, n: int) -> Grid1D:
    return Grid1D.build(lower, upper, n, "linear")


def log_grid(lower: float, upper: float, n: int) -> Grid1D:
    return Grid1D.build(lower, upper, n, "logarithmic")


def logit_grid(lower: float, upper: float, n: int) -> Grid1D:
    return Grid1D.build(lower, upper, n, "logit")


def integrate_grid(values: ArrayLike, grid: Grid1D) -> float:
    """Quadrature sum over the grid: sum_i w_i v_i."""
    return float(np.dot(grid.weights, _check_length(values, grid)))
