from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.config.settings import EIGEN_CLUSTER_GAP, HERMITIAN_ATOL
from src.middleware.errors import NonHermitianError

MAX_DIM = 64

ComplexMatrix = NDArray[np.complex128]


def _as_square(entries: ArrayLike) -> ComplexMatrix:
    matrix = np.array(entries, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NonHermitianError(f"expected a square matrix, got shape {matrix.shape}")
    if not 1 <= matrix.shape[0] <= MAX_DIM:
        raise NonHermitianError(f"dimension {matrix.shape[0]} outside [1, {MAX_DIM}]")
    return matrix


def check_hermitian(matrix: ComplexMatrix, atol: float = HERMITIAN_ATOL) -> None:
    """Raise NonHermitianError naming the worst entry if matrix != matrix^dagger."""
    deviation = np.abs(matrix - matrix.conj().T)
    worst = np.unravel_index(int(np.argmax(deviation)), deviation.shape)
    if deviation[worst] > atol:
        i, j = (int(k) for k in worst)
        raise NonHermitianError(
            f"entry ({i}, {j}) = {matrix[i, j]} differs from conj of ({j}, {i}) = "
            f"{matrix[j, i]} by {deviation[worst]:.3e} (tolerance {atol:g})"
        )


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Small dense Hermitian matrix: states, POVM elements, Lyapunov and SLD solutions."""

    entries: ComplexMatrix

    def __post_init__(self) -> None:
        matrix = _as_square(self.entries)
        check_hermitian(matrix)
        # store the exactly Hermitian part so downstream eigensolvers see symmetric input
        matrix = 0.5 * (matrix + matrix.conj().T)
        matrix.setflags(write=False)
        object.__setattr__(self, "entries", matrix)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def expectation(self, rho: "OperatorLike") -> float:
        """Tr(rho · self)."""
        return float(np.trace(as_matrix(rho) @ self.entries).real)


OperatorLike = Union[HermitianOperator, ArrayLike]


def as_matrix(operator: OperatorLike) -> ComplexMatrix:
    if isinstance(operator, HermitianOperator):
        return operator.entries
    return _as_square(operator)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    values: NDArray[np.float64]
    vectors: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        return (self.vectors * self.values) @ self.vectors.conj().T

    def projector(self, index: int) -> ComplexMatrix:
        v = self.vectors[:, index]
        return np.outer(v, v.conj())


def _fix_phases(vectors: ComplexMatrix) -> ComplexMatrix:
    # make the first largest-magnitude component of each column real and positive
    pivots = np.argmax(np.abs(vectors) - 1e-12 * np.arange(vectors.shape[0])[:, None], axis=0)
    phases = vectors[pivots, np.arange(vectors.shape[1])]
    return vectors * (np.abs(phases) / phases)[None, :]


def _orthonormalize_clusters(values: NDArray[np.float64], vectors: ComplexMatrix) -> ComplexMatrix:
    vectors = vectors.copy()
    start = 0
    n = len(values)
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[stop - 1] < EIGEN_CLUSTER_GAP:
            stop += 1
        if stop - start > 1:
            q, _ = np.linalg.qr(vectors[:, start:stop])
            vectors[:, start:stop] = q
        start = stop
    return vectors


def eigh(operator: OperatorLike) -> EigenSystem:
    """Ascending eigen-decomposition of a Hermitian operator with a deterministic basis."""
    matrix = as_matrix(operator)
    check_hermitian(matrix, atol=HERMITIAN_ATOL)
    matrix = 0.5 * (matrix + matrix.conj().T)
    values, vectors = np.linalg.eigh(matrix)
    vectors = _orthonormalize_clusters(values, vectors)
    vectors = _fix_phases(vectors)
    return EigenSystem(values=values, vectors=vectors)


def random_hermitian(dim: int, generator: np.random.Generator) -> HermitianOperator:
    a = generator.normal(size=(dim, dim)) + 1j * generator.normal(size=(dim, dim))
    return HermitianOperator(0.5 * (a + a.conj().T))


def random_density_matrix(dim: int, generator: np.random.Generator) -> HermitianOperator:
    a = generator.normal(size=(dim, dim)) + 1j * generator.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return HermitianOperator(rho / np.trace(rho).real)
