"""Bloom Matrix: an m x N bit matrix mapping labels to the items holding them.

A label's hash neighborhood selects rows; adding ORs the encoded item set
into each selected row, and lookup ANDs the selected rows and decodes the
result.  The sparse variant stores the same bits under a count-sorted item
ordering so rows can drop trailing zeros.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bitset import Bitset, ItemOrdering, UnknownItemError, decode, encode
from .bloom import size_for
from .hashing import SeededHashFamily

LOOKUP_MODES = ("and", "or")


@dataclass(frozen=True)
class MatrixFpReport:
    """Expected false-positive measure per queried label, and their mean.

    Per-label values sum expected false positives over all candidate items,
    so they are expectations and may exceed 1; they are reported unclamped.
    """

    per_label: dict
    average: float


class BloomMatrix:
    """m x N bit matrix over a fixed item ordering.

    Items are fixed at construction: the matrix cannot learn new items
    without being rebuilt.  Adding more labels to existing items later is
    allowed at the cost of a rising false-positive rate.  Single writer
    while filling; safe for concurrent lookups once frozen.
    """

    def __init__(self, m: int, k: int, ordering: ItemOrdering, family=None,
                 sparse: bool = False, track_fpr: bool = False):
        if m < 1:
            raise ValueError("matrix needs at least 1 row")
        if family is None:
            family = SeededHashFamily(k)
        if family.k != k:
            raise ValueError(f"hash family has k={family.k}, expected {k}")
        self.m = m
        self.k = k
        self.ordering = ordering
        self.family = family
        self.sparse = sparse
        self.rows = [0] * m
        self._label_items = {} if track_fpr else None

    @property
    def n_items(self) -> int:
        return len(self.ordering)

    @property
    def variant(self) -> str:
        return "sparse" if self.sparse else "dense"

    def add_label(self, label: str, items):
        """OR the encoded item set into every row the label hashes to."""
        try:
            encoded = encode(self.ordering, items)
        except UnknownItemError as err:
            raise UnknownItemError(
                err.item, "the matrix must be rebuilt to cover new items"
            ) from None
        value = encoded.value
        rows = self.rows
        for row in self.family.neighborhood(label, self.m):
            rows[row] |= value
        if self._label_items is not None:
            self._label_items[label] = self._label_items.get(label, 0) + encoded.popcount()

    def lookup_label(self, label: str) -> set:
        """Decode the AND of the label's rows; a superset of the true item set."""
        acc = None
        rows = self.rows
        for row in self.family.neighborhood(label, self.m):
            acc = rows[row] if acc is None else acc & rows[row]
            if not acc:
                break
        return decode(self.ordering, Bitset(self.n_items, acc or 0))

    def lookup_labels(self, labels, mode: str = "and") -> set:
        """Query several labels at once.

        AND intersects: rows for all labels are ANDed together, which equals
        the intersection of the single-label lookups.  OR unions the decoded
        single-label results (raw rows are never ORed, since that would
        produce item indexes no single label justifies).
        """
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
        selected = set()
        for label in labels:
            selected |= self.family.neighborhood(label, self.m)
        acc = None
        rows = self.rows
        for row in selected:
            acc = rows[row] if acc is None else acc & rows[row]
            if not acc:
                break
        return decode(self.ordering, Bitset(self.n_items, acc or 0))

    def theoretical_fpr(self, labels) -> MatrixFpReport:
        """Expected false-positive measure for the queried labels.

        Each candidate item outside a label's true set is a false positive
        with probability ``(1 - (1 - 1/m)^(n k))^k`` where n counts the items
        added under that label; labels never added contribute 0.
        """
        if self._label_items is None:
            raise ValueError("matrix was built without FPR tracking")
        labels = list(labels)
        if not labels:
            raise ValueError("report needs at least one label")
        per_label = {}
        for label in labels:
            n = self._label_items.get(label, 0)
            candidates = max(0, self.n_items - n)
            if n == 0 or candidates == 0:
                per_label[label] = 0.0
                continue
            single = (1.0 - (1.0 - 1.0 / self.m) ** (n * self.k)) ** self.k
            per_label[label] = candidates * single
        average = sum(per_label[label] for label in labels) / len(labels)
        return MatrixFpReport(per_label=per_label, average=average)

    def stored_bits(self) -> int:
        """Dense: m*N.  Sparse: per-row bits up to the last 1-bit only."""
        if self.sparse:
            return sum(row.bit_length() for row in self.rows)
        return self.m * self.n_items


def sparse_ordering(dataset) -> ItemOrdering:
    """Items sorted by descending label count, ties keeping input order.

    Encoding under this ordering pushes the sparsest columns to the end of
    every row, maximizing the trailing zeros a sparse row can drop.
    """
    ranked = sorted(
        range(dataset.n_items),
        key=lambda i: -len(dataset.rows[i][1]),
    )
    return ItemOrdering(dataset.rows[i][0] for i in ranked)


def build_matrix(dataset, target_fp: float = None, *, m: int = None, k: int = None,
                 family=None, sparse: bool = False, track_fpr: bool = False) -> BloomMatrix:
    """Construct and fill a matrix for a whole dataset.

    Row count defaults to the average-load rule: size a filter for the mean
    number of labels per item at ``target_fp``.  Passing explicit ``m`` and
    ``k`` overrides the rule entirely.
    """
    if dataset.n_items == 0:
        raise ValueError("cannot build a matrix from an empty dataset")
    if m is None or k is None:
        if target_fp is None:
            raise ValueError("need either target_fp or explicit m and k")
        avg_labels = -(-dataset.total_pairs // dataset.n_items)  # ceil
        params = size_for(avg_labels, target_fp)
        m, k = params.m, params.k
    ordering = sparse_ordering(dataset) if sparse else ItemOrdering(dataset.item_ids)
    matrix = BloomMatrix(m, k, ordering, family=family, sparse=sparse,
                         track_fpr=track_fpr)
    inverted = {}
    for item, labels in dataset.rows:
        for label in labels:
            inverted.setdefault(label, set()).add(item)
    for label in sorted(inverted):
        matrix.add_label(label, inverted[label])
    return matrix
