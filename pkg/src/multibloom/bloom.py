"""Standard Bloom filter: bitset plus k seeded hashes, with parameter sizing.

Sizing follows the closed forms ``m = -n ln p / ln^2 2`` and ``k = -log2 p``
(m rounded up, k rounded half-up with a floor of 1), and the theoretical
false-positive estimate is ``(1 - e^(-k n / m))^k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .hashing import SeededHashFamily

_LN2_SQUARED = math.log(2.0) ** 2


@dataclass(frozen=True)
class FilterParams:
    """Parameters chosen for a target false-positive probability."""

    m: int
    k: int
    target_fp: float
    capacity: int


def size_for(n: int, p: float) -> FilterParams:
    """Choose (m, k) so a filter holding n labels false-positives around p.

    ``n = 0`` degenerates to a single-bit filter.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"target false-positive rate must be in (0, 1), got {p}")
    if n < 0:
        raise ValueError("expected insertions must be non-negative")
    m = max(1, math.ceil(-n * math.log(p) / _LN2_SQUARED))
    k = max(1, math.floor(-math.log2(p) + 0.5))  # round half-up
    return FilterParams(m=m, k=k, target_fp=p, capacity=n)


def theoretical_fp(m: int, k: int, n: int) -> float:
    """Expected false-positive probability after n insertions."""
    if m < 1 or k < 1:
        raise ValueError("m and k must be at least 1")
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 0.0
    return (1.0 - math.exp(-k * n / m)) ** k


class BloomFilter:
    """Approximate set of labels with false positives but no false negatives.

    There is deliberately no remove operation: clearing shared bits would
    introduce false negatives.  Single writer while filling; safe for
    concurrent lookups once frozen.
    """

    __slots__ = ("m", "family", "bits", "inserted_count")

    def __init__(self, m: int, family=None, k: int = None):
        if m < 1:
            raise ValueError("filter needs at least 1 bit")
        if family is None:
            family = SeededHashFamily(k if k is not None else 1)
        self.m = m
        self.family = family
        self.bits = 0
        self.inserted_count = 0

    @classmethod
    def with_capacity(cls, n: int, p: float, family=None) -> "BloomFilter":
        """Size a fresh filter for n expected labels at target rate p."""
        params = size_for(n, p)
        if family is None:
            family = SeededHashFamily(params.k)
        return cls(params.m, family)

    @property
    def k(self) -> int:
        return self.family.k

    def add(self, label: str):
        self.set_positions(self.family.neighborhood(label, self.m))

    def lookup(self, label: str) -> bool:
        return self.test_positions(self.family.neighborhood(label, self.m))

    def lookup_all(self, labels) -> bool:
        """True iff every label in the (nonempty) collection looks up true."""
        if not labels:
            raise ValueError("lookup_all needs at least one label")
        return all(self.lookup(label) for label in labels)

    def set_positions(self, positions):
        """Set the given bit positions and count one insertion."""
        bits = self.bits
        for pos in positions:
            bits |= 1 << pos
        self.bits = bits
        self.inserted_count += 1

    def test_positions(self, positions) -> bool:
        bits = self.bits
        for pos in positions:
            if not (bits >> pos) & 1:
                return False
        return True

    def expected_fp(self) -> float:
        """Theoretical false-positive probability at the current load."""
        return theoretical_fp(self.m, self.k, self.inserted_count)

    def stored_bits(self) -> int:
        return self.m

    def __repr__(self) -> str:
        return (
            f"BloomFilter(m={self.m}, k={self.k}, n={self.inserted_count})"
        )
