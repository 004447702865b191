"""Ground-truth label/item relations: CSV ingestion and synthetic generators.

A dataset is a sequence of ``(item_id, label set)`` rows, one per item.  The
CSV format is one row per line: the item id first, then every label assigned
to it.  Synthetic generators draw label assignments under a Uniform or a
Zipf rank-weight distribution, deterministically per seed (PCG64).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy-pcg64"


@dataclass(frozen=True)
class Dataset:
    """Immutable item -> label-set relation, preserving item input order."""

    rows: tuple

    def __post_init__(self):
        seen = set()
        for item_id, labels in self.rows:
            if item_id in seen:
                raise ValueError(f"duplicate item id: {item_id!r}")
            seen.add(item_id)

    @classmethod
    def from_pairs(cls, pairs) -> "Dataset":
        """Normalize any iterable of (item_id, labels) into a Dataset."""
        return cls(tuple((item, frozenset(labels)) for item, labels in pairs))

    @cached_property
    def n_items(self) -> int:
        return len(self.rows)

    @cached_property
    def item_ids(self) -> tuple:
        return tuple(item for item, _ in self.rows)

    @cached_property
    def total_pairs(self) -> int:
        """Total number of (label, item) assignments across all rows."""
        return sum(len(labels) for _, labels in self.rows)

    @cached_property
    def label_universe(self) -> frozenset:
        universe = set()
        for _, labels in self.rows:
            universe |= labels
        return frozenset(universe)


@dataclass(frozen=True)
class ExactIndex:
    """Exact forward and inverted maps; the oracle filter lookups are scored against."""

    forward: dict
    inverted: dict
    item_count: int

    def items_for(self, label: str) -> frozenset:
        return self.inverted.get(label, frozenset())


def build_exact_index(dataset: Dataset) -> ExactIndex:
    forward = {}
    inverted = {}
    for item, labels in dataset.rows:
        forward[item] = labels
        for label in labels:
            inverted.setdefault(label, set()).add(item)
    inverted = {label: frozenset(items) for label, items in inverted.items()}
    return ExactIndex(forward=forward, inverted=inverted, item_count=dataset.n_items)


@dataclass(frozen=True)
class UniformConfig:
    """Every (item, label) pair is assigned independently with probability p."""

    item_count: int
    label_universe_size: int
    p: float
    seed: int

    def __post_init__(self):
        if self.item_count < 1 or self.label_universe_size < 0:
            raise ValueError("item and label counts must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("assignment probability must be in [0, 1]")


@dataclass(frozen=True)
class ZipfConfig:
    """Item at rank r receives each label with probability min(1, scale * w(r)).

    ``w(r) = r^-s / H(N, s)`` with ``H(N, s)`` the generalized harmonic
    number, so the rank weights form a distribution over items.
    """

    item_count: int
    label_universe_size: int
    s: float
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.item_count < 1 or self.label_universe_size < 0:
            raise ValueError("item and label counts must be positive")
        if self.s <= 0.0:
            raise ValueError("zipf exponent must be positive")
        if self.scale <= 0.0:
            raise ValueError("zipf scale must be positive")


def zipf_rank_weights(n: int, s: float):
    """Normalized rank weights w(r) = (1/r^s) / sum_i(1/i^s) for r = 1..n."""
    ranks = np.arange(1, n + 1, dtype=np.float64)
    raw = ranks ** -s
    return raw / raw.sum()


def _item_name(i: int) -> str:
    return f"e{i + 1}"


def _label_names(count: int) -> list:
    return [f"l{j + 1}" for j in range(count)]


def generate_uniform(config: UniformConfig) -> Dataset:
    rng = np.random.default_rng(config.seed)
    labels = _label_names(config.label_universe_size)
    rows = []
    for i in range(config.item_count):
        picks = np.flatnonzero(rng.random(config.label_universe_size) < config.p)
        rows.append((_item_name(i), frozenset(labels[j] for j in picks)))
    return Dataset(tuple(rows))


def generate_zipf(config: ZipfConfig) -> Dataset:
    rng = np.random.default_rng(config.seed)
    labels = _label_names(config.label_universe_size)
    probs = np.minimum(1.0, config.scale * zipf_rank_weights(config.item_count, config.s))
    rows = []
    for i in range(config.item_count):
        picks = np.flatnonzero(rng.random(config.label_universe_size) < probs[i])
        rows.append((_item_name(i), frozenset(labels[j] for j in picks)))
    return Dataset(tuple(rows))


def save_csv(dataset: Dataset, path, header: str = None):
    """Write one row per item: the id, then its labels, comma-separated.

    Labels are written sorted so equal datasets serialize byte-identically.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write(f"# {header}\n")
        for item, labels in dataset.rows:
            fh.write(",".join([item, *sorted(labels)]))
            fh.write("\n")


def load_csv(path) -> Dataset:
    """Parse the row-per-item CSV format; '#' comment lines are ignored.

    Duplicate labels and empty label fields within a row are dropped with a
    warning; a duplicate item id is an error naming the offending line.
    """
    rows = []
    seen = {}
    dropped_empty = 0
    dropped_dupes = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            item = fields[0]
            if not item:
                raise ValueError(f"{path}:{lineno}: missing item id")
            if item in seen:
                raise ValueError(
                    f"{path}:{lineno}: duplicate item id {item!r} "
                    f"(first seen on line {seen[item]})"
                )
            seen[item] = lineno
            labels = set()
            for field in fields[1:]:
                if not field:
                    dropped_empty += 1
                elif field in labels:
                    dropped_dupes += 1
                else:
                    labels.add(field)
            rows.append((item, frozenset(labels)))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if dropped_empty:
        logger.warning("%s: dropped %d empty label fields", path, dropped_empty)
    if dropped_dupes:
        logger.warning("%s: dropped %d duplicate labels within rows", path, dropped_dupes)
    return Dataset(tuple(rows))


def dataset_fingerprint(dataset: Dataset) -> str:
    """Short stable identity for a dataset, independent of label set order."""
    import hashlib

    digest = hashlib.blake2b(digest_size=8)
    for item, labels in dataset.rows:
        digest.update(item.encode("utf-8"))
        digest.update(b"\x00")
        for label in sorted(labels):
            digest.update(label.encode("utf-8"))
            digest.update(b"\x01")
        digest.update(b"\x02")
    return f"{dataset.n_items}x{dataset.total_pairs}-{digest.hexdigest()}"
