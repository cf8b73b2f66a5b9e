from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import expit

from src.middleware.errors import DomainError, GridMismatchError, NonMonotoneError
from src.numerics.interpolate import Inversion, invert_monotone
from src.numerics.quadrature import Grid1D
from src.priors.priors import PriorDensity

ScalarMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ClosedForm:
    f: ScalarMap
    df: ScalarMap
    inverse: ScalarMap


@dataclass(frozen=True, eq=False)
class SymmetryFunction:
    """Strictly monotone map f turning the parameter into a location parameter.

    Tabulated on ``grid``; canonical families also carry a closed form that is
    used for off-node evaluation and inversion.
    """

    grid: Grid1D
    f_values: NDArray[np.float64]
    df_values: NDArray[np.float64]
    c1: float = 1.0
    c2: float = 0.0
    theta_u: float = 1.0
    name: str = "custom"
    closed_form: Optional[ClosedForm] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        f = np.asarray(self.f_values, dtype=float)
        df = np.asarray(self.df_values, dtype=float)
        if f.shape != self.grid.nodes.shape or df.shape != f.shape:
            raise GridMismatchError(f"symmetry function tables do not match a {len(self.grid)}-node grid")
        steps = np.diff(f)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise NonMonotoneError(f"{self.name}: f is not strictly monotone on the grid")
        if not (np.all(df > 0) or np.all(df < 0)):
            raise NonMonotoneError(f"{self.name}: f' vanishes or changes sign on the grid")
        for arr in (f, df):
            arr.setflags(write=False)
        object.__setattr__(self, "f_values", f)
        object.__setattr__(self, "df_values", df)

    @property
    def increasing(self) -> bool:
        return bool(self.f_values[-1] > self.f_values[0])

    @property
    def f_range(self) -> tuple[float, float]:
        return float(self.f_values.min()), float(self.f_values.max())

    def __call__(self, theta: ArrayLike) -> np.ndarray:
        if self.closed_form is not None:
            return self.closed_form.f(np.asarray(theta, dtype=float))
        return self.grid.interpolate(self.f_values, theta)

    def derivative(self, theta: ArrayLike) -> np.ndarray:
        if self.closed_form is not None:
            return self.closed_form.df(np.asarray(theta, dtype=float))
        return self.grid.interpolate(self.df_values, theta)

    def inverse(self, y: float) -> Inversion:
        """f^-1(y), clamped to the grid range with a flag when y leaves the tabulated f range."""
        lo, hi = self.f_range
        if self.closed_form is not None and lo <= y <= hi:
            theta = float(self.closed_form.inverse(np.asarray(y, dtype=float)))
            return Inversion(min(max(theta, self.grid.lower), self.grid.upper), False)
        return invert_monotone(self.grid.nodes, self.f_values, y)

    def on_grid(self, grid: Grid1D) -> "SymmetryFunction":
        """Re-tabulate on another grid (closed-form families only)."""
        if self.closed_form is None:
            raise GridMismatchError(f"{self.name}: tabulated symmetry function cannot move grids")
        return _tabulate(grid, self.closed_form, self.c1, self.c2, self.theta_u, self.name)


def _tabulate(grid: Grid1D, form: ClosedForm, c1: float, c2: float, theta_u: float, name: str) -> SymmetryFunction:
    return SymmetryFunction(
        grid=grid,
        f_values=form.f(grid.nodes),
        df_values=form.df(grid.nodes),
        c1=c1,
        c2=c2,
        theta_u=theta_u,
        name=name,
        closed_form=form,
    )


def symmetry_from_prior(
    prior: PriorDensity, c1: float, c2: float = 0.0, theta_u: Optional[float] = None
) -> SymmetryFunction:
    """f(theta) = c1 * integral of the prior from theta_u to theta, plus c2.

    theta_u defaults to the lower end of the grid. Passing c1 = prior.normalization
    reproduces the canonical (unnormalized) antiderivative.
    """
    if c1 == 0 or not np.isfinite(c1):
        raise DomainError("c1 must be finite and nonzero")
    density = prior.density
    if np.any(density <= 1e-14 * density.max()):
        raise NonMonotoneError(
            f"{prior.kind} prior vanishes on part of the grid; f would be locally flat"
        )
    cumulative = prior.grid.cumulative(density)
    anchor = prior.grid.lower if theta_u is None else float(theta_u)
    if not prior.grid.contains(anchor):
        raise DomainError(f"theta_u = {anchor} outside the grid range")
    offset = 0.0 if theta_u is None else float(prior.grid.interpolate(cumulative, anchor))
    return SymmetryFunction(
        grid=prior.grid,
        f_values=c1 * (cumulative - offset) + c2,
        df_values=c1 * density,
        c1=c1,
        c2=c2,
        theta_u=anchor,
        name=f"{prior.kind}-antiderivative",
    )


def identity_symmetry(grid: Grid1D) -> SymmetryFunction:
    form = ClosedForm(f=lambda x: x.copy(), df=np.ones_like, inverse=lambda y: y)
    return _tabulate(grid, form, 1.0, 0.0, 1.0, "identity")


def log_symmetry(grid: Grid1D, c1: float = 1.0, c2: float = 0.0, theta_u: float = 1.0) -> SymmetryFunction:
    """c1 log(theta/theta_u) + c2, the scale-estimation symmetry function."""
    if theta_u <= 0 or c1 == 0:
        raise DomainError("log symmetry needs theta_u > 0 and c1 != 0")
    form = ClosedForm(
        f=lambda x: c1 * np.log(x / theta_u) + c2,
        df=lambda x: c1 / x,
        inverse=lambda y: theta_u * np.exp((y - c2) / c1),
    )
    return _tabulate(grid, form, c1, c2, theta_u, "log")


def hyperbolic_symmetry(grid: Grid1D, c1: float = 2.0, c2: float = 0.0) -> SymmetryFunction:
    """c1 arctanh(2 theta - 1) + c2, the weight-estimation symmetry function."""
    if c1 == 0:
        raise DomainError("c1 must be nonzero")
    form = ClosedForm(
        f=lambda x: c1 * np.arctanh(2.0 * x - 1.0) + c2,
        df=lambda x: c1 / (2.0 * x * (1.0 - x)),
        inverse=lambda y: expit(2.0 * (y - c2) / c1),
    )
    return _tabulate(grid, form, c1, c2, 0.5, "hyperbolic")


def arcsine_symmetry(grid: Grid1D, c1: float = 2.0, c2: float = 0.0) -> SymmetryFunction:
    """c1 arctan(sqrt(theta/(1-theta))) + c2, geometry of a Bernoulli-type qubit family."""
    if c1 == 0:
        raise DomainError("c1 must be nonzero")
    form = ClosedForm(
        f=lambda x: c1 * np.arctan(np.sqrt(x / (1.0 - x))) + c2,
        df=lambda x: c1 / (2.0 * np.sqrt(x * (1.0 - x))),
        inverse=lambda y: np.sin((y - c2) / c1) ** 2,
    )
    return _tabulate(grid, form, c1, c2, 0.0, "arcsine")


def lifetime_geometric_symmetry(
    grid: Grid1D, t: float = 1.0, c1: float = 2.0, c2: float = 0.0
) -> SymmetryFunction:
    """c1 arctan(sqrt(exp(t/theta) - 1)) + c2, decreasing in theta.

    Antiderivative of sqrt(I) for an excited two-level atom probed after time t.
    """
    if t <= 0 or c1 == 0:
        raise DomainError("lifetime symmetry needs t > 0 and c1 != 0")

    def f(x: np.ndarray) -> np.ndarray:
        return c1 * np.arctan(np.sqrt(np.expm1(t / x))) + c2

    def df(x: np.ndarray) -> np.ndarray:
        return -c1 * (t / x**2) / (2.0 * np.sqrt(np.expm1(t / x)))

    def inverse(y: np.ndarray) -> np.ndarray:
        return -t / (2.0 * np.log(np.cos((y - c2) / c1)))

    return _tabulate(grid, ClosedForm(f, df, inverse), c1, c2, t, "lifetime-geometric")
