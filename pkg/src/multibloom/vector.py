"""Bloom Vector: one individually sized Bloom filter per item.

Adding a label touches only the filters of the items that hold it, each
filter hashing into its own bit range; lookup probes every filter and
decodes the hit pattern.  Unlike the matrix, new items can be appended
incrementally, each with its own capacity and target rate.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bitset import Bitset, ItemOrdering, UnknownItemError, decode, encode
from .bloom import BloomFilter, size_for
from .hashing import SeededHashFamily
from .matrix import LOOKUP_MODES


@dataclass(frozen=True)
class VectorFpReport:
    """Expected false-positive measure per queried label, and their mean."""

    per_label: dict
    average: float


class BloomVector:
    """Ordered collection of per-item Bloom filters sharing one hash scheme.

    All filters hash with the same seeded scheme and differ only by range
    (and possibly k), so one set of raw hashes serves every filter during a
    lookup.  Single writer while filling; frozen vectors support concurrent
    lookups.
    """

    def __init__(self, ordering: ItemOrdering, filters, track_fpr: bool = False):
        filters = list(filters)
        if len(filters) != len(ordering):
            raise ValueError("need exactly one filter per ordered item")
        self.ordering = ordering
        self.filters = filters
        self._touched = {} if track_fpr else None
        self._refresh_shared_family()

    def _refresh_shared_family(self):
        families = {id(f.family) for f in self.filters}
        self._shared_family = (
            self.filters[0].family if len(families) == 1 else None
        )

    @property
    def n_items(self) -> int:
        return len(self.filters)

    def add_label(self, label: str, items):
        """Add the label to the filter of every item in the set."""
        try:
            encoded = encode(self.ordering, items)
        except UnknownItemError as err:
            raise UnknownItemError(
                err.item, "call add_item before assigning labels to it"
            ) from None
        filters = self.filters
        family = self._shared_family
        if family is not None:
            at = family.mapper(label)
            for pos in encoded.positions():
                filt = filters[pos]
                filt.set_positions(at(filt.m))
        else:
            for pos in encoded.positions():
                filters[pos].add(label)
        if self._touched is not None and encoded.value:
            self._touched.setdefault(label, set()).update(encoded.positions())

    def add_item(self, item_id: str, expected_labels: int, target_fp: float):
        """Append a new item with a fresh filter sized for its expected load."""
        if item_id in self.ordering:
            raise ValueError(f"duplicate item id: {item_id!r}")
        params = size_for(expected_labels, target_fp)
        family = self._shared_family
        if family is None or family.k != params.k or not isinstance(
            family, SeededHashFamily
        ):
            family = SeededHashFamily(params.k)
        self.ordering = self.ordering.extended(item_id)
        self.filters.append(BloomFilter(params.m, family))
        self._refresh_shared_family()

    def lookup_label(self, label: str) -> set:
        """Decode the per-filter hit pattern; a superset of the true item set."""
        hits = 0
        family = self._shared_family
        if family is not None:
            at = family.mapper(label)
            for pos, filt in enumerate(self.filters):
                if filt.test_positions(at(filt.m)):
                    hits |= 1 << pos
        else:
            for pos, filt in enumerate(self.filters):
                if filt.lookup(label):
                    hits |= 1 << pos
        return decode(self.ordering, Bitset(self.n_items, hits))

    def lookup_labels(self, labels, mode: str = "and") -> set:
        """AND: items whose filters hold every label.  OR: union of lookups."""
        labels = list(labels)
        if not labels:
            raise ValueError("lookup needs at least one label")
        if mode not in LOOKUP_MODES:
            raise ValueError(f"mode must be one of {LOOKUP_MODES}, got {mode!r}")
        if mode == "or":
            result = set()
            for label in labels:
                result |= self.lookup_label(label)
            return result
        hits = 0
        family = self._shared_family
        if family is not None:
            ats = [family.mapper(label) for label in labels]
            for pos, filt in enumerate(self.filters):
                m = filt.m
                if all(filt.test_positions(at(m)) for at in ats):
                    hits |= 1 << pos
        else:
            for pos, filt in enumerate(self.filters):
                if filt.lookup_all(labels):
                    hits |= 1 << pos
        return decode(self.ordering, Bitset(self.n_items, hits))

    def touched_filters(self, label: str) -> frozenset:
        """Positions of the filters this label was ever added to."""
        if self._touched is None:
            raise ValueError("vector was built without FPR tracking")
        return frozenset(self._touched.get(label, ()))

    def theoretical_fpr(self, labels) -> VectorFpReport:
        """Expected false-positive measure summed over each label's filters.

        A label contributes ``(1 - (1 - 1/m_i)^(k_i n_i))^k_i`` for each
        filter i it was added to; labels never added contribute 0.
        """
        if self._touched is None:
            raise ValueError("vector was built without FPR tracking")
        labels = list(labels)
        if not labels:
            raise ValueError("report needs at least one label")
        per_label = {}
        for label in labels:
            total = 0.0
            for pos in self._touched.get(label, ()):
                filt = self.filters[pos]
                n, k, m = filt.inserted_count, filt.k, filt.m
                if n:
                    total += (1.0 - (1.0 - 1.0 / m) ** (k * n)) ** k
            per_label[label] = total
        average = sum(per_label[label] for label in labels) / len(labels)
        return VectorFpReport(per_label=per_label, average=average)

    def stored_bits(self) -> int:
        return sum(filt.m for filt in self.filters)


def build_vector(dataset, target_fp: float, track_fpr: bool = False) -> BloomVector:
    """Construct a vector sizing each item's filter for its own label count."""
    if dataset.n_items == 0:
        raise ValueError("cannot build a vector from an empty dataset")
    params = [size_for(len(labels), target_fp) for _, labels in dataset.rows]
    families = {}
    filters = []
    for param in params:
        family = families.setdefault(param.k, SeededHashFamily(param.k))
        filters.append(BloomFilter(param.m, family))
    vector = BloomVector(ItemOrdering(dataset.item_ids), filters,
                         track_fpr=track_fpr)
    inverted = {}
    for item, labels in dataset.rows:
        for label in labels:
            inverted.setdefault(label, set()).add(item)
    for label in sorted(inverted):
        vector.add_label(label, inverted[label])
    return vector
