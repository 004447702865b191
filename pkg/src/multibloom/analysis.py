"""Observed false-positive measurement, the Bloom Test, and benchmark sweeps.

The observed rate per label is ``FP / (TN + FP)`` where FP counts returned
items that are not truly assigned and TN counts items neither assigned nor
returned.  A returned set missing a true item is a structural bug and raises
immediately.
"""

from __future__ import annotations

import csv
import io
import json
import random
import statistics
import time
from dataclasses import dataclass

from .dataset import Dataset, build_exact_index, dataset_fingerprint
from .matrix import build_matrix
from .vector import build_vector

STRUCTURE_CODES = ("bm", "sbm", "bv")

DEFAULT_TARGET_FPRS = (0.9, 0.5, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)

BENCH_FIELDS = (
    "structure",
    "target_fpr",
    "m",
    "k",
    "stored_bits",
    "avg_add_ns",
    "avg_lookup_ns",
    "observed_fpr",
    "batch_size",
    "seed",
)

TIMING_FIELDS = ("avg_add_ns", "avg_lookup_ns")


class FalseNegativeError(RuntimeError):
    """A lookup dropped a truly assigned item; these structures never may."""


@dataclass(frozen=True)
class FprMeasurement:
    """Observed false-positive rates per label, their mean, and raw counts."""

    per_label: dict
    average: float
    true_positives: int
    false_positives: int
    true_negatives: int


def measure_fpr(lookup, oracle, labels) -> FprMeasurement:
    """Score single-label lookups against the exact index.

    ``lookup`` maps a label to a set of item ids.  Labels missing from the
    oracle are scored against an empty truth (pure false-positive probing).
    """
    labels = list(labels)
    if not labels:
        raise ValueError("measurement needs at least one label")
    per_label = {}
    rates = []
    tp = fp = tn = 0
    total_items = oracle.item_count
    for label in labels:
        returned = lookup(label)
        truth = oracle.items_for(label)
        if not truth <= returned:
            missing = sorted(truth - returned)[:5]
            raise FalseNegativeError(
                f"lookup({label!r}) dropped true items {missing}"
            )
        fp_count = len(returned) - len(truth)
        tn_count = total_items - len(returned)
        denom = tn_count + fp_count
        rate = fp_count / denom if denom else 0.0
        per_label[label] = rate
        rates.append(rate)
        tp += len(truth)
        fp += fp_count
        tn += tn_count
    return FprMeasurement(
        per_label=per_label,
        average=sum(rates) / len(rates),
        true_positives=tp,
        false_positives=fp,
        true_negatives=tn,
    )


@dataclass(frozen=True)
class BloomTestVerdict:
    """Outcome of probing a matrix built at a target rate against reality."""

    expected_fpr: float
    observed_fpr: float
    ratio: float
    classification: str  # "Uniform" | "NonUniform"
    recommendation: str  # "bm" | "bv"
    probe_count: int


def bloom_test(dataset: Dataset, expected_fpr: float = 1e-3,
               probe_label_count: int = 1000, ratio_threshold: float = 10.0,
               observed_floor: float = 1e-2, rng_seed: int = 0) -> BloomTestVerdict:
    """Classify a dataset's label distribution using a matrix as pre-filter.

    Builds a Bloom Matrix at ``expected_fpr`` under the average-load sizing
    rule, measures the observed rate over a seeded sample of the dataset's
    own labels, and calls the distribution NonUniform when the observed rate
    exceeds both ``ratio_threshold`` times the target and ``observed_floor``.
    NonUniform data is better served by a Bloom Vector.
    """
    if dataset.n_items == 0:
        raise ValueError("cannot run the test on an empty dataset")
    matrix = build_matrix(dataset, expected_fpr)
    oracle = build_exact_index(dataset)
    universe = sorted(dataset.label_universe)
    if not universe:
        raise ValueError("dataset has no labels to probe")
    count = min(probe_label_count, len(universe))
    probes = random.Random(rng_seed).sample(universe, count)
    observed = measure_fpr(matrix.lookup_label, oracle, probes).average
    ratio = observed / expected_fpr
    nonuniform = ratio > ratio_threshold and observed > observed_floor
    return BloomTestVerdict(
        expected_fpr=expected_fpr,
        observed_fpr=observed,
        ratio=ratio,
        classification="NonUniform" if nonuniform else "Uniform",
        recommendation="bv" if nonuniform else "bm",
        probe_count=count,
    )


def verdict_to_json(verdict: BloomTestVerdict) -> str:
    return json.dumps(
        {
            "expected_fpr": verdict.expected_fpr,
            "observed_fpr": verdict.observed_fpr,
            "ratio": verdict.ratio,
            "classification": verdict.classification,
            "recommendation": verdict.recommendation,
            "probe_count": verdict.probe_count,
        },
        indent=2,
    )


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark point: structure x target rate x lookup batch size."""

    structure: str
    target_fpr: float
    m: int
    k: int
    stored_bits: int
    avg_add_ns: float
    avg_lookup_ns: float
    observed_fpr: float
    batch_size: int
    seed: int
    dataset_id: str  # not serialized; identifies the input corpus


def _inverted_in_label_order(dataset: Dataset):
    inverted = {}
    for item, labels in dataset.rows:
        for label in labels:
            inverted.setdefault(label, set()).add(item)
    return [(label, inverted[label]) for label in sorted(inverted)]


def _timed_build(code: str, dataset: Dataset, target_fpr: float, adds):
    """Build one structure, timing only the label-add phase."""
    if code in ("bm", "sbm"):
        structure = build_matrix(dataset, target_fpr, sparse=(code == "sbm"))
        empty = type(structure)(structure.m, structure.k, structure.ordering,
                                family=structure.family, sparse=structure.sparse)
        start = time.perf_counter_ns()
        for label, items in adds:
            empty.add_label(label, items)
        elapsed = time.perf_counter_ns() - start
        return empty, elapsed / max(1, len(adds))
    if code == "bv":
        structure = build_vector(dataset, target_fpr)
        start = time.perf_counter_ns()
        for label, items in adds:
            structure.add_label(label, items)
        elapsed = time.perf_counter_ns() - start
        return structure, elapsed / max(1, len(adds))
    raise ValueError(f"unknown structure code {code!r}")


def _params_summary(code: str, structure):
    if code in ("bm", "sbm"):
        return structure.m, structure.k
    sizes = sorted(filt.m for filt in structure.filters)
    ks = sorted(filt.k for filt in structure.filters)
    return statistics.median_low(sizes), statistics.median_low(ks)


def bench_sweep(dataset: Dataset, structures=STRUCTURE_CODES,
                target_fprs=DEFAULT_TARGET_FPRS, lookup_batch_sizes=(1,),
                rng_seed: int = 0, repetitions: int = 5,
                probe_label_count: int = 1000):
    """Measure size, add/lookup latency, and observed FPR across a grid.

    Timings are medians over ``repetitions`` runs on a monotonic clock;
    everything except the timing columns is deterministic for a fixed seed.
    Batched lookups use AND semantics.
    """
    if repetitions < 1:
        raise ValueError("need at least one repetition")
    oracle = build_exact_index(dataset)
    universe = sorted(dataset.label_universe)
    rng = random.Random(rng_seed)
    probes = rng.sample(universe, min(probe_label_count, len(universe)))
    batches = {
        size: rng.sample(universe, min(size, len(universe)))
        for size in lookup_batch_sizes
    }
    adds = _inverted_in_label_order(dataset)
    fingerprint = dataset_fingerprint(dataset)

    records = []
    for code in structures:
        if code not in STRUCTURE_CODES:
            raise ValueError(f"unknown structure code {code!r}")
        for target in target_fprs:
            add_times = []
            structure = None
            for _ in range(repetitions):
                structure, per_label_ns = _timed_build(code, dataset, target, adds)
                add_times.append(per_label_ns)
            avg_add_ns = statistics.median(add_times)
            observed = measure_fpr(structure.lookup_label, oracle, probes).average
            m_summary, k_summary = _params_summary(code, structure)
            for size, batch in batches.items():
                lookup_times = []
                for _ in range(repetitions):
                    start = time.perf_counter_ns()
                    if len(batch) == 1:
                        structure.lookup_label(batch[0])
                    else:
                        structure.lookup_labels(batch, mode="and")
                    lookup_times.append((time.perf_counter_ns() - start) / len(batch))
                records.append(
                    BenchRecord(
                        structure=code.upper(),
                        target_fpr=target,
                        m=m_summary,
                        k=k_summary,
                        stored_bits=structure.stored_bits(),
                        avg_add_ns=avg_add_ns,
                        avg_lookup_ns=statistics.median(lookup_times),
                        observed_fpr=observed,
                        batch_size=size,
                        seed=rng_seed,
                        dataset_id=fingerprint,
                    )
                )
    return records


def records_to_csv(records) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(BENCH_FIELDS)
    for record in records:
        writer.writerow([getattr(record, field) for field in BENCH_FIELDS])
    return buffer.getvalue()


def records_to_json(records) -> str:
    return json.dumps(
        [{field: getattr(record, field) for field in BENCH_FIELDS} for record in records],
        indent=2,
    )
