"""
Seeded random streams

All randomness goes through RngStream so that a seed fixes every sample.
"""

from typing import Dict, List, Optional

import numpy as np

RNG_ALGORITHM = "PCG64"


class RngStream:
    """
    Single-owner random stream built on numpy's PCG64 bit generator

    Replicas for parallel Monte Carlo come from spawn(), which derives
    independent child streams from the same SeedSequence.

    Example:
        >>> a, b = RngStream(7), RngStream(7)
        >>> a.generator.integers(0, 10, 5).tolist() == b.generator.integers(0, 10, 5).tolist()
        True
    """

    def __init__(self, seed: Optional[int] = None, *, _sequence: Optional[np.random.SeedSequence] = None):
        self.seed = seed
        self._sequence = _sequence if _sequence is not None else np.random.SeedSequence(seed)
        self.generator = np.random.Generator(np.random.PCG64(self._sequence))

    def spawn(self, count: int) -> List["RngStream"]:
        """Independent child streams, reproducible from the parent seed"""
        return [RngStream(self.seed, _sequence=child) for child in self._sequence.spawn(count)]

    def random(self, size=None):
        return self.generator.random(size)

    def integers(self, low: int, high: int, size=None):
        return self.generator.integers(low, high, size=size)

    def metadata(self) -> Dict[str, object]:
        """Description stored with every randomized report"""
        return {
            "algorithm": RNG_ALGORITHM,
            "numpy": np.__version__,
            "seed": self.seed,
            "spawn_key": list(self._sequence.spawn_key),
        }


def as_stream(rng) -> RngStream:
    """Accept an RngStream, an integer seed or None"""
    if isinstance(rng, RngStream):
        return rng
    return RngStream(rng)
