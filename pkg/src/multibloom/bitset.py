"""Fixed-length bitsets, trailing-zero-trimmed rows, and item-set encoding.

Positions are the only external contract: bit ``i`` of a row corresponds to
the item at position ``i`` of an :class:`ItemOrdering`.  Storage is a single
arbitrary-precision integer so whole-row OR/AND are one operation each.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


class UnknownItemError(LookupError):
    """Raised when an item identifier is not part of an ordering."""

    def __init__(self, item, hint=""):
        message = f"unknown item id: {item!r}"
        if hint:
            message = f"{message} ({hint})"
        super().__init__(message)
        self.item = item


class Bitset:
    """Mutable bit string addressed by positions ``0..length-1``.

    Reads and writes outside the addressable range raise ``IndexError``.
    A Bitset under mutation must have a single writer and no concurrent
    readers; once frozen it can be shared freely.
    """

    __slots__ = ("length", "value")

    def __init__(self, length: int, value: int = 0):
        if length < 0:
            raise ValueError("length must be non-negative")
        if value < 0:
            raise ValueError("value must be non-negative")
        if value.bit_length() > length:
            raise ValueError(f"value has bits beyond position {length - 1}")
        self.length = length
        self.value = value

    @classmethod
    def from_positions(cls, length: int, positions: Iterable[int]) -> "Bitset":
        bits = cls(length)
        for pos in positions:
            bits.set(pos)
        return bits

    @classmethod
    def from01(cls, text: str) -> "Bitset":
        """Build from a left-to-right bit string; leftmost char is position 0."""
        bits = cls(len(text))
        for pos, ch in enumerate(text):
            if ch == "1":
                bits.set(pos)
            elif ch != "0":
                raise ValueError(f"bit string may contain only 0/1, got {ch!r}")
        return bits

    def to01(self) -> str:
        return "".join("1" if self.get(i) else "0" for i in range(self.length))

    def _check(self, pos: int):
        if not 0 <= pos < self.length:
            raise IndexError(f"bit position {pos} outside [0, {self.length})")

    def get(self, pos: int) -> int:
        self._check(pos)
        return (self.value >> pos) & 1

    def set(self, pos: int):
        self._check(pos)
        self.value |= 1 << pos

    def or_with(self, other: "Bitset"):
        if other.length != self.length:
            raise ValueError("length mismatch")
        self.value |= other.value

    def and_with(self, other: "Bitset"):
        if other.length != self.length:
            raise ValueError("length mismatch")
        self.value &= other.value

    def popcount(self) -> int:
        return self.value.bit_count()

    def positions(self) -> Iterator[int]:
        """Yield the positions of 1-bits in increasing order."""
        value = self.value
        while value:
            low = value & -value
            yield low.bit_length() - 1
            value ^= low

    def to_bytes(self) -> bytes:
        """Pack 8 bits per byte, lowest position in the least significant bit."""
        return self.value.to_bytes((self.length + 7) // 8, "little")

    @classmethod
    def from_bytes(cls, length: int, payload: bytes) -> "Bitset":
        if len(payload) != (length + 7) // 8:
            raise ValueError("payload size does not match length")
        value = int.from_bytes(payload, "little")
        if value.bit_length() > length:
            raise ValueError("payload has bits beyond the stated length")
        return cls(length, value)

    def copy(self) -> "Bitset":
        return Bitset(self.length, self.value)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bitset):
            return NotImplemented
        return self.length == other.length and self.value == other.value

    __hash__ = None  # mutable

    def __repr__(self) -> str:
        return f"Bitset({self.length}, 0b{self.value:0{max(self.length, 1)}b})"


@dataclass(frozen=True)
class SparseRow:
    """A row of ``logical_length`` bits with the trailing zero run dropped.

    ``stored_length`` is the index of the last 1-bit plus one (0 for an
    all-zero row); reads in ``[stored_length, logical_length)`` return 0.
    """

    logical_length: int
    stored_length: int
    value: int

    def __post_init__(self):
        if not 0 <= self.stored_length <= self.logical_length:
            raise ValueError("stored_length must be within [0, logical_length]")
        if self.value.bit_length() != self.stored_length and not (
            self.value == 0 and self.stored_length == 0
        ):
            raise ValueError("stored payload must end in a 1-bit")

    def get(self, pos: int) -> int:
        if not 0 <= pos < self.logical_length:
            raise IndexError(f"bit position {pos} outside [0, {self.logical_length})")
        return (self.value >> pos) & 1


def sparsify(bits: Bitset) -> SparseRow:
    """Drop exactly the maximal trailing run of zeros."""
    return SparseRow(bits.length, bits.value.bit_length(), bits.value)


def densify(row: SparseRow) -> Bitset:
    return Bitset(row.logical_length, row.value)


class ItemOrdering:
    """A fixed bijection between item identifiers and positions ``[0, N)``.

    Stores both directions so position lookups are O(1) and encoding a set
    of s items is O(s).  Immutable; :meth:`extended` returns a new ordering.
    """

    __slots__ = ("items", "_index")

    def __init__(self, items: Iterable[str]):
        self.items = tuple(items)
        index = {}
        for pos, item in enumerate(self.items):
            if item in index:
                raise ValueError(f"duplicate item id: {item!r}")
            index[item] = pos
        self._index = index

    def position(self, item: str) -> int:
        try:
            return self._index[item]
        except KeyError:
            raise UnknownItemError(item) from None

    def extended(self, item: str) -> "ItemOrdering":
        if item in self._index:
            raise ValueError(f"duplicate item id: {item!r}")
        return ItemOrdering(self.items + (item,))

    def __contains__(self, item) -> bool:
        return item in self._index

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ItemOrdering):
            return NotImplemented
        return self.items == other.items

    def __hash__(self) -> int:
        return hash(self.items)

    def __repr__(self) -> str:
        return f"ItemOrdering({list(self.items)!r})"


def encode(ordering: ItemOrdering, items: Iterable[str]) -> Bitset:
    """Translate an item set into an N-bit row: bit i set iff item i is present."""
    value = 0
    for item in items:
        value |= 1 << ordering.position(item)
    return Bitset(len(ordering), value)


def decode(ordering: ItemOrdering, bits: Bitset) -> set:
    """Translate an N-bit row back into the (unordered) item set it encodes."""
    if bits.length != len(ordering):
        raise ValueError(
            f"bitset length {bits.length} does not match ordering size {len(ordering)}"
        )
    items = ordering.items
    return {items[pos] for pos in bits.positions()}
