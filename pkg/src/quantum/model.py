from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.bayes.likelihood import LikelihoodModel, OutcomeSpace
from src.middleware.errors import DomainError, ModelError
from src.numerics.linalg import ComplexMatrix, HermitianOperator, as_matrix, check_hermitian

STATE_TRACE_ATOL = 1e-10
STATE_PSD_ATOL = 1e-12
POVM_ATOL = 1e-10


class QuantumModel(ABC):
    """theta (and a control y) -> density matrix rho_y(theta)."""

    dim: int
    control_name: str = "control"
    theta_scale: float = 1.0

    @abstractmethod
    def state(self, theta: float, control: Any = None) -> ComplexMatrix:
        ...

    def dstate(self, theta: float, control: Any = None) -> ComplexMatrix:
        """d rho / d theta; central difference unless a subclass knows it analytically."""
        h = 1e-6 * max(abs(theta), self.theta_scale)
        return (self.state(theta + h, control) - self.state(theta - h, control)) / (2.0 * h)

    def states(self, thetas: ArrayLike, control: Any = None) -> NDArray[np.complex128]:
        return np.stack([self.state(float(theta), control) for theta in np.asarray(thetas, dtype=float)])

    def check_state(self, theta: float, control: Any = None) -> HermitianOperator:
        rho = np.asarray(self.state(theta, control), dtype=np.complex128)
        check_hermitian(rho)
        trace = np.trace(rho).real
        if abs(trace - 1.0) > STATE_TRACE_ATOL:
            raise ModelError(f"{type(self).__name__}: Tr rho = {trace:.12g} at theta={theta}")
        lowest = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
        if lowest < -STATE_PSD_ATOL:
            raise ModelError(f"{type(self).__name__}: negative eigenvalue {lowest:.3e} at theta={theta}")
        return HermitianOperator(rho)


class FunctionModel(QuantumModel):
    """Quantum model from plain callables."""

    def __init__(
        self,
        dim: int,
        state_fn: Callable[[float, Any], ArrayLike],
        dstate_fn: Optional[Callable[[float, Any], ArrayLike]] = None,
        control_name: str = "control",
        theta_scale: float = 1.0,
    ) -> None:
        self.dim = dim
        self._state_fn = state_fn
        self._dstate_fn = dstate_fn
        self.control_name = control_name
        self.theta_scale = theta_scale

    def state(self, theta: float, control: Any = None) -> ComplexMatrix:
        return np.asarray(self._state_fn(theta, control), dtype=np.complex128)

    def dstate(self, theta: float, control: Any = None) -> ComplexMatrix:
        if self._dstate_fn is None:
            return super().dstate(theta, control)
        return np.asarray(self._dstate_fn(theta, control), dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class Povm:
    """Complete set of positive operators with one label per outcome."""

    elements: tuple[HermitianOperator, ...]
    labels: NDArray[np.float64]

    def __post_init__(self) -> None:
        if len(self.elements) == 0 or len(self.elements) != len(self.labels):
            raise ModelError("a POVM needs one label per element and at least one element")
        dim = self.elements[0].dim
        total = np.zeros((dim, dim), dtype=np.complex128)
        for k, element in enumerate(self.elements):
            lowest = np.linalg.eigvalsh(element.entries)[0]
            if lowest < -POVM_ATOL:
                raise ModelError(f"POVM element {k} has negative eigenvalue {lowest:.3e}")
            total += element.entries
        deviation = np.linalg.norm(total - np.eye(dim))
        if deviation > POVM_ATOL:
            raise ModelError(f"POVM elements sum to identity only within {deviation:.3e}")
        labels = np.asarray(self.labels, dtype=float)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def projective(cls, vectors: ArrayLike, labels: Optional[Sequence[float]] = None) -> "Povm":
        """Rank-one projectors onto the columns of a unitary matrix."""
        vectors = np.asarray(vectors, dtype=np.complex128)
        elements = tuple(HermitianOperator(np.outer(v, v.conj())) for v in vectors.T)
        return cls(elements, np.arange(len(elements), dtype=float) if labels is None else np.asarray(labels))

    @classmethod
    def computational(cls, dim: int) -> "Povm":
        return cls.projective(np.eye(dim))

    def __len__(self) -> int:
        return len(self.elements)

    def probabilities(self, rho: ArrayLike) -> np.ndarray:
        """Born rule Tr[M_k rho] for every element."""
        rho = as_matrix(rho)
        return np.array([np.trace(m.entries @ rho).real for m in self.elements])


class BornLikelihood(LikelihoodModel):
    """Outcome index k with p(k | theta, y) = Tr[M_k rho_y(theta)]."""

    def __init__(self, model: QuantumModel, povm: Povm) -> None:
        if povm.elements[0].dim != model.dim:
            raise DomainError(f"POVM of dimension {povm.elements[0].dim} for a {model.dim}-level model")
        self.model = model
        self.povm = povm
        self.theta_scale = model.theta_scale
        stacked = np.stack([m.entries for m in povm.elements])
        # M_k^T so that sum_ij (M_k)_ji rho_ij = Tr[M_k rho]
        self._elements_t = np.transpose(stacked, (0, 2, 1))

    def probability(self, outcome: Any, theta: ArrayLike, control: Any = None) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        rhos = self.model.states(theta.ravel(), control)
        values = np.einsum("ij,nij->n", self._elements_t[int(outcome)], rhos).real
        return np.clip(values, 0.0, None).reshape(theta.shape)

    def evaluate(self, outcomes: np.ndarray, theta: float, control: Any = None) -> np.ndarray:
        rho = self.model.state(theta, control)
        values = np.einsum("kij,ij->k", self._elements_t, rho).real
        return np.clip(values[np.asarray(outcomes, dtype=int)], 0.0, None)

    def outcome_space(self, theta: float, control: Any = None) -> OutcomeSpace:
        n = len(self.povm)
        return OutcomeSpace(np.arange(n), np.ones(n), True)
