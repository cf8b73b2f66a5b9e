from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_U64 = 2**64


@dataclass
class RandomStream:
    """Counter-based random stream identified by (seed, stream_id).

    Each parallel unit of work must own its stream; the generator itself is
    not shared.
    """

    seed: int
    stream_id: int = 0
    _generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (0 <= self.seed < _U64 and 0 <= self.stream_id < _U64):
            raise ValueError(f"seed and stream_id must be unsigned 64-bit, got ({self.seed}, {self.stream_id})")
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self._generator = np.random.Generator(np.random.Philox(sequence))

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def spawn(self, stream_id: int) -> "RandomStream":
        return RandomStream(self.seed, stream_id)

    def uniform(self, size=None):
        return self._generator.random(size)

    def choice(self, probabilities: np.ndarray) -> int:
        """Index drawn from a discrete distribution."""
        cdf = np.cumsum(probabilities)
        return int(min(np.searchsorted(cdf, self._generator.random() * cdf[-1], side="right"), len(cdf) - 1))

    def exponential(self, rate: float, size=None):
        return self._generator.exponential(1.0 / rate, size)
