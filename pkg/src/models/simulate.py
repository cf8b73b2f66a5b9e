from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from src.bayes.likelihood import LikelihoodModel
from src.middleware.errors import DomainError
from src.numerics.random import RandomStream
from src.quantum.model import BornLikelihood, Povm, QuantumModel


@dataclass(frozen=True)
class ShotBatch:
    outcomes: NDArray[Any]
    controls: tuple[Any, ...]
    seed: tuple[int, int]
    true_theta: float

    def __post_init__(self) -> None:
        if len(self.outcomes) != len(self.controls):
            raise DomainError(f"{len(self.outcomes)} outcomes but {len(self.controls)} controls")

    def __len__(self) -> int:
        return len(self.outcomes)


def simulate_shots(
    model: Union[LikelihoodModel, QuantumModel],
    true_theta: float,
    mu: int,
    rng: RandomStream,
    controls: Optional[Sequence[Any]] = None,
    povm: Optional[Povm] = None,
) -> ShotBatch:
    """mu i.i.d. outcomes at the true parameter; Born rule when a POVM is supplied."""
    if mu < 1:
        raise DomainError(f"need at least one shot, got {mu}")
    if isinstance(model, QuantumModel):
        if povm is None:
            raise DomainError("a quantum model needs a POVM to produce outcomes")
        likelihood: LikelihoodModel = BornLikelihood(model, povm)
    else:
        likelihood = model

    shot_controls = tuple([None] * mu) if controls is None else tuple(controls)
    if len(shot_controls) != mu:
        raise DomainError(f"{len(shot_controls)} controls for {mu} shots")

    if len(set(map(repr, shot_controls))) == 1:
        outcomes = likelihood.sample(true_theta, shot_controls[0], rng, mu)
    else:
        outcomes = np.concatenate([likelihood.sample(true_theta, c, rng, 1) for c in shot_controls])
    return ShotBatch(
        outcomes=np.asarray(outcomes),
        controls=shot_controls,
        seed=(rng.seed, rng.stream_id),
        true_theta=float(true_theta),
    )
