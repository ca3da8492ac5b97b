"""
Permutations as labeled standard paths

Inserting n+1 into a permutation pi of [n] with k descents keeps the descent
count in k+1 slots (right after each descent, and at the right end) and raises
it in the other n-k slots (including the left end). Numbering each group of
slots left to right gives the edge labels, which fixes a consistent bijection
between Perm(n) and labeled standard paths of length n.
"""

import itertools
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

from eulerboundary.arrangements.descents import descents, projections, validate_permutation
from eulerboundary.core.errors import PathError
from eulerboundary.core.triangle import TriangleIndex, enumerate_labeled_paths


@dataclass(frozen=True)
class LabeledPath:
    """
    Standard path with edge labels

    Attributes:
        vertices: (1, 0) = v_1, v_2, ..., v_n with v_m on level m
        labels: labels[m-1] numbers the chosen edge among the parallel edges v_m -> v_{m+1}
    """

    vertices: Tuple[TriangleIndex, ...]
    labels: Tuple[int, ...]

    def __post_init__(self):
        if not self.vertices:
            raise PathError("path needs at least one vertex")
        if len(self.labels) != len(self.vertices) - 1:
            raise PathError(f"{len(self.vertices)} vertices need {len(self.vertices) - 1} labels")
        for m, (here, there) in enumerate(zip(self.vertices, self.vertices[1:])):
            if there.n != here.n + 1 or there.k not in (here.k, here.k + 1):
                raise PathError(f"{here} -> {there} is not an edge")
            multiplicity = here.k + 1 if there.k == here.k else here.n - here.k
            label = self.labels[m]
            if not isinstance(label, int) or not 0 <= label < multiplicity:
                raise PathError(f"label {label!r} on {here} -> {there} must lie in 0..{multiplicity - 1}")

    @classmethod
    def from_ks(cls, ks: Sequence[int], labels: Sequence[int]) -> "LabeledPath":
        return cls(tuple(TriangleIndex(m, k) for m, k in enumerate(ks, start=1)), tuple(labels))

    @property
    def start_level(self) -> int:
        return self.vertices[0].n

    @property
    def end_level(self) -> int:
        return self.vertices[-1].n

    @property
    def end(self) -> TriangleIndex:
        return self.vertices[-1]

    def truncate(self) -> "LabeledPath":
        """Drop the last edge"""
        if len(self.vertices) == 1:
            raise PathError("cannot truncate a one-vertex path")
        return LabeledPath(self.vertices[:-1], self.labels[:-1])


def insertion_slots(perm: Sequence[int]) -> Tuple[List[int], List[int]]:
    """
    Slots for inserting n+1, split by effect on the descent count

    Slot i means "after the first i entries". Returns (preserving, increasing),
    each in left-to-right order.
    """
    n = len(perm)
    _, positions = descents(perm)
    preserving = sorted(positions) + [n]
    increasing = [i for i in range(n + 1) if i not in positions and i != n]
    return preserving, increasing


def insert_largest(perm: Sequence[int], slot: int) -> Tuple[int, ...]:
    values = tuple(perm)
    return values[:slot] + (len(values) + 1,) + values[slot:]


def perm_to_path(perm: Sequence[int]) -> LabeledPath:
    """
    Path through (m, D(pi_m)) for the iterated projections pi_m of perm

    Example:
        >>> [str(v) for v in perm_to_path((2, 1, 3)).vertices]
        ['(1,0)', '(2,1)', '(3,1)']
    """
    chain = projections(validate_permutation(perm))
    ks = [descents(p)[0] for p in chain]
    labels = []
    for shorter, longer in zip(chain, chain[1:]):
        slot = longer.index(len(longer))
        preserving, increasing = insertion_slots(shorter)
        group = preserving if slot in preserving else increasing
        labels.append(group.index(slot))
    return LabeledPath.from_ks(ks, labels)


def path_to_perm(path: LabeledPath) -> Tuple[int, ...]:
    """Rebuild the permutation by inserting m+1 at the slot each label selects"""
    if path.vertices[0] != TriangleIndex(1, 0):
        raise PathError(f"path must start at the root, starts at {path.vertices[0]}")
    perm: Tuple[int, ...] = (1,)
    for here, there, label in zip(path.vertices, path.vertices[1:], path.labels):
        preserving, increasing = insertion_slots(perm)
        group = preserving if there.k == here.k else increasing
        perm = insert_largest(perm, group[label])
    return perm


def labeled_paths(n: int, k: int) -> Iterator[LabeledPath]:
    """All labeled standard paths ending at (n, k)"""
    for ks, labels in enumerate_labeled_paths(n, k):
        yield LabeledPath.from_ks(ks, labels)


def preimage_split(perm: Sequence[int]) -> Tuple[int, int]:
    """
    Descent effect of all n+1 insertions of n+1

    Returns:
        (number keeping D(perm), number raising it by one)
    """
    values = validate_permutation(perm)
    k = descents(values)[0]
    same = raised = 0
    for slot in range(len(values) + 1):
        d = descents(insert_largest(values, slot))[0]
        if d == k:
            same += 1
        elif d == k + 1:
            raised += 1
        else:
            raise AssertionError(f"insertion into {values} changed descents by {d - k}")
    return same, raised


def verify_preimage_split(n: int) -> bool:
    """Every pi in Perm(n) with k descents has k+1 count-preserving and n-k count-raising extensions"""
    for perm in itertools.permutations(range(1, n + 1)):
        k = descents(perm)[0]
        if preimage_split(perm) != (k + 1, n - k):
            return False
    return True


def verify_bijection(n: int) -> bool:
    """Round trips in both directions over Perm(n) and over all labeled paths of length n"""
    for perm in itertools.permutations(range(1, n + 1)):
        if path_to_perm(perm_to_path(perm)) != perm:
            return False
    for k in range(n):
        for path in labeled_paths(n, k):
            if perm_to_path(path_to_perm(path)) != path:
                return False
    return True
