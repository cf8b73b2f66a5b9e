from .interpolate import Inversion, invert_monotone
from .linalg import (
    EigenSystem,
    HermitianOperator,
    OperatorLike,
    as_matrix,
    check_hermitian,
    eigh,
    random_density_matrix,
    random_hermitian,
)
from .quadrature import Grid1D, integrate_grid, linear_grid, log_grid, logit_grid, simpson_weights
from .random import RandomStream
from .special import digamma, trigamma

__all__ = [
    "EigenSystem",
    "Grid1D",
    "HermitianOperator",
    "Inversion",
    "OperatorLike",
    "RandomStream",
    "as_matrix",
    "check_hermitian",
    "digamma",
    "eigh",
    "integrate_grid",
    "invert_monotone",
    "linear_grid",
    "log_grid",
    "logit_grid",
    "random_density_matrix",
    "random_hermitian",
    "simpson_weights",
    "trigamma",
]
