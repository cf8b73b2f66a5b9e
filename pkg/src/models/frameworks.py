from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from src.priors.priors import PriorDensity
from src.priors.symmetry import SymmetryFunction

FrameworkName = Literal["transformation", "geometry"]


@dataclass(frozen=True, eq=False)
class Framework:
    """A prior together with the symmetry function it defines."""

    name: FrameworkName
    prior: PriorDensity
    f: SymmetryFunction
