"""
Base classes for random arrangements and record backends
"""

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.rng import RngStream, as_stream


class RandomArrangement(ABC):
    """
    Abstract random arrangement: a consistent family of random permutations

    Subclasses draw one underlying stream (bucket allocations, uniform keys)
    and read every prefix off it, so prefix(m) is always the remove-largest
    projection of prefix(n) for m < n.
    """

    def __init__(self, rng: Optional[RngStream] = None):
        """
        Initialize arrangement

        Args:
            rng: Stream driving this arrangement (seed or RngStream)
        """
        self.rng = as_stream(rng)

    @property
    @abstractmethod
    def boundary_param(self) -> BoundaryParam:
        """Boundary parameter of the solution this arrangement realises"""
        pass

    @abstractmethod
    def extend(self, n: int) -> None:
        """Draw the underlying stream through label n"""
        pass

    @abstractmethod
    def prefix(self, m: int) -> Tuple[int, ...]:
        """The permutation of [m] induced on labels 1..m"""
        pass

    @abstractmethod
    def sample_batch(self, n: int, trials: int) -> np.ndarray:
        """Independent permutations of [n], one per row of a (trials, n) array"""
        pass

    @abstractmethod
    def exact_probability(self, perm: Sequence[int]) -> Fraction:
        """Exact probability that the level-n permutation equals perm"""
        pass

    def sample(self, n: int) -> Tuple[int, ...]:
        """Permutation of [n] from this arrangement's stream"""
        self.extend(n)
        return self.prefix(n)

    def prefixes(self, n: int) -> List[Tuple[int, ...]]:
        """All prefixes of length 1..n"""
        self.extend(n)
        return [self.prefix(m) for m in range(1, n + 1)]


class RecordBackend(ABC):
    """Abstract base class for output record stores"""

    @abstractmethod
    def store(self, record: Dict[str, Any]) -> int:
        """Store a record, returning its id"""
        pass

    @abstractmethod
    def retrieve(self, record_id: int) -> Optional[Dict[str, Any]]:
        """Retrieve a record by id"""
        pass

    @abstractmethod
    def query(self, **filters) -> List[Dict[str, Any]]:
        """Records matching command/seed/version filters"""
        pass

    @abstractmethod
    def delete(self, record_id: int) -> bool:
        """Delete a record by id"""
        pass

    @abstractmethod
    def clear(self) -> None:
        """Delete every record"""
        pass

    @abstractmethod
    def list_commands(self) -> List[str]:
        """Distinct command names in the store"""
        pass

    @abstractmethod
    def close(self) -> None:
        """Close the connection"""
        pass

    def count(self, **filters) -> int:
        """Count records matching filters"""
        return len(self.query(**filters))
