"""Seeded hash families producing hash neighborhoods over arbitrary ranges.

The seeded family runs 32-bit MurmurHash3 with integer seeds ``1..k`` and
maps each raw hash into ``[0, size)`` via ``floor(h / 2**32 * size)``, so one
family can serve filters of different lengths.  The fixed-table family lets
test fixtures pin exact neighborhoods that no real hash would produce.
"""

from __future__ import annotations

from typing import Callable, Mapping

_MASK32 = 0xFFFFFFFF
_C1 = 0xCC9E2D51
_C2 = 0x1B873593


def murmur3_32(data: bytes, seed: int = 0) -> int:
    """32-bit MurmurHash3 (x86 variant) of ``data``, returned unsigned."""
    h = seed & _MASK32
    length = len(data)
    body_end = length - (length & 3)

    for i in range(0, body_end, 4):
        k = int.from_bytes(data[i : i + 4], "little")
        k = (k * _C1) & _MASK32
        k = ((k << 15) | (k >> 17)) & _MASK32
        k = (k * _C2) & _MASK32
        h ^= k
        h = ((h << 13) | (h >> 19)) & _MASK32
        h = (h * 5 + 0xE6546B64) & _MASK32

    k = 0
    tail = length & 3
    if tail >= 3:
        k ^= data[body_end + 2] << 16
    if tail >= 2:
        k ^= data[body_end + 1] << 8
    if tail >= 1:
        k ^= data[body_end]
        k = (k * _C1) & _MASK32
        k = ((k << 15) | (k >> 17)) & _MASK32
        k = (k * _C2) & _MASK32
        h ^= k

    h ^= length
    h ^= h >> 16
    h = (h * 0x85EBCA6B) & _MASK32
    h ^= h >> 13
    h = (h * 0xC2B2AE35) & _MASK32
    h ^= h >> 16
    return h


def ranged_index(h32: int, size: int) -> int:
    """Map a 32-bit hash into [0, size) preserving uniformity."""
    return (h32 * size) >> 32


class SeededHashFamily:
    """k deterministic hash functions: MurmurHash3-32 seeded ``1..k``.

    Labels are hashed as UTF-8 bytes.  Immutable and safe for unlimited
    concurrent use.
    """

    kind = "seeded-murmur32"

    __slots__ = ("k", "_seeds")

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("hash family needs k >= 1 functions")
        self.k = k
        self._seeds = tuple(range(1, k + 1))

    def raw32(self, label: str) -> tuple:
        """The k raw 32-bit hashes of a label, before range reduction."""
        data = label.encode("utf-8")
        return tuple(murmur3_32(data, seed) for seed in self._seeds)

    def mapper(self, label: str) -> Callable[[int], list]:
        """Hash once, map into many ranges cheaply.

        Returns a function of ``size`` yielding the (possibly repeating)
        indices of all k functions within ``[0, size)``.
        """
        raws = self.raw32(label)

        def indices(size: int, _raws=raws) -> list:
            return [(h * size) >> 32 for h in _raws]

        return indices

    def neighborhood(self, label: str, size: int) -> frozenset:
        """Distinct indices of all k functions for one label at one range."""
        if size < 1:
            raise ValueError("hash range must be at least 1")
        data = label.encode("utf-8")
        return frozenset(
            (murmur3_32(data, seed) * size) >> 32 for seed in self._seeds
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeededHashFamily):
            return NotImplemented
        return self.k == other.k

    def __hash__(self) -> int:
        return hash((self.kind, self.k))

    def __repr__(self) -> str:
        return f"SeededHashFamily(k={self.k})"


class FixedTableHashFamily:
    """Hash functions backed by an explicit ``(label, function, range) -> index`` table.

    Exists so fixtures can reproduce worked examples exactly; every entry is
    validated to stay inside its range.  Function indices run ``1..k``.
    """

    kind = "fixed-table"

    __slots__ = ("k", "table")

    def __init__(self, k: int, table: Mapping):
        if k < 1:
            raise ValueError("hash family needs k >= 1 functions")
        for (label, func, size), index in table.items():
            if not 1 <= func <= k:
                raise ValueError(f"function index {func} outside 1..{k}")
            if not 0 <= index < size:
                raise ValueError(
                    f"table entry {label!r}/{func}@{size} maps outside [0, {size})"
                )
        self.k = k
        self.table = dict(table)

    def _lookup(self, label: str, func: int, size: int) -> int:
        try:
            return self.table[(label, func, size)]
        except KeyError:
            raise ValueError(
                f"fixed table has no entry for label {label!r}, "
                f"function {func}, range {size}"
            ) from None

    def mapper(self, label: str) -> Callable[[int], list]:
        def indices(size: int) -> list:
            return [self._lookup(label, func, size) for func in range(1, self.k + 1)]

        return indices

    def neighborhood(self, label: str, size: int) -> frozenset:
        if size < 1:
            raise ValueError("hash range must be at least 1")
        return frozenset(
            self._lookup(label, func, size) for func in range(1, self.k + 1)
        )

    def __repr__(self) -> str:
        return f"FixedTableHashFamily(k={self.k}, entries={len(self.table)})"
