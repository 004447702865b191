"""Command-line front end: generate, build, persist, query, benchmark, classify.

Machine-readable output goes to stdout, diagnostics to stderr.  Exit codes:
0 success, 2 usage error, 1 runtime failure.  ``BMF_SEED`` supplies the
default seed for every command that takes one.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import analysis, dataset, persist
from .matrix import BloomMatrix, build_matrix
from .vector import BloomVector, build_vector


class UsageError(Exception):
    pass


def _default_seed() -> int:
    return int(os.environ.get("BMF_SEED", "0"))


def _float_list(text: str):
    return [float(part) for part in text.split(",") if part]


def _int_list(text: str):
    return [int(part) for part in text.split(",") if part]


def _str_list(text: str):
    return [part for part in text.split(",") if part]


def _cmd_gen(args) -> int:
    if args.dist == "uniform":
        if args.p is None:
            raise UsageError("--p is required for the uniform distribution")
        config = dataset.UniformConfig(
            item_count=args.items,
            label_universe_size=args.labels,
            p=args.p,
            seed=args.seed,
        )
        ds = dataset.generate_uniform(config)
        header = (
            f"seed={args.seed} dist=uniform p={args.p} items={args.items} "
            f"labels={args.labels} rng={dataset.RNG_ALGORITHM}"
        )
    else:
        if args.s is None:
            raise UsageError("--s is required for the zipf distribution")
        config = dataset.ZipfConfig(
            item_count=args.items,
            label_universe_size=args.labels,
            s=args.s,
            scale=args.scale,
            seed=args.seed,
        )
        ds = dataset.generate_zipf(config)
        header = (
            f"seed={args.seed} dist=zipf s={args.s} scale={args.scale} "
            f"items={args.items} labels={args.labels} rng={dataset.RNG_ALGORITHM}"
        )
    dataset.save_csv(ds, args.out, header=header)
    print(f"rows={ds.n_items} pairs={ds.total_pairs} out={args.out}")
    return 0


def _build_structure(code: str, ds, target_fpr, m, k):
    if code == "bm":
        return build_matrix(ds, target_fpr, m=m, k=k, sparse=False)
    if code == "sbm":
        return build_matrix(ds, target_fpr, m=m, k=k, sparse=True)
    if code == "bv":
        if m is not None:
            raise UsageError("explicit --m/--k apply to matrices only")
        return build_vector(ds, target_fpr)
    raise UsageError(f"unknown structure {code!r}")


def _cmd_build(args) -> int:
    if args.fpr is not None and (args.m is not None or args.k is not None):
        raise UsageError("--fpr and explicit --m/--k are mutually exclusive")
    if args.fpr is None and (args.m is None or args.k is None):
        raise UsageError("need either --fpr or both --m and --k")
    ds = dataset.load_csv(args.dataset)
    start = time.perf_counter()
    structure = _build_structure(args.structure, ds, args.fpr, args.m, args.k)
    elapsed = time.perf_counter() - start
    persist.save_structure(structure, args.out)
    if isinstance(structure, BloomMatrix):
        print(f"structure={args.structure} m={structure.m} k={structure.k}")
    else:
        sizes = sorted(f.m for f in structure.filters)
        print(
            f"structure=bv filters={len(sizes)} m_min={sizes[0]} "
            f"m_max={sizes[-1]} k={structure.filters[0].k}"
        )
    print(f"stored_bits={structure.stored_bits()}")
    print(f"build_seconds={elapsed:.3f}")
    print(f"out={args.out}", file=sys.stderr)
    return 0


def _cmd_lookup(args) -> int:
    if not args.labels:
        raise UsageError("lookup needs at least one label")
    structure = persist.load_structure(args.file)
    if not isinstance(structure, (BloomMatrix, BloomVector)):
        raise UsageError("lookup requires a matrix or vector file")
    result = structure.lookup_labels(args.labels, mode=args.mode)
    for item in sorted(result):
        print(item)
    return 0


def _cmd_bench(args) -> int:
    ds = dataset.load_csv(args.dataset)
    records = analysis.bench_sweep(
        ds,
        structures=args.structures,
        target_fprs=args.fprs,
        lookup_batch_sizes=args.batches,
        rng_seed=args.seed,
        repetitions=args.reps,
        probe_label_count=args.probes,
    )
    rendered = (
        analysis.records_to_json(records)
        if args.format == "json"
        else analysis.records_to_csv(records)
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
        print(f"records={len(records)} out={args.out}", file=sys.stderr)
    else:
        sys.stdout.write(rendered)
    return 0


def _cmd_bloomtest(args) -> int:
    ds = dataset.load_csv(args.dataset)
    verdict = analysis.bloom_test(
        ds,
        expected_fpr=args.fpr,
        probe_label_count=args.probes,
        ratio_threshold=args.threshold,
        observed_floor=args.floor,
        rng_seed=args.seed,
    )
    print(
        f"classification={verdict.classification} "
        f"recommendation={verdict.recommendation} "
        f"observed={verdict.observed_fpr:.6g} "
        f"expected={verdict.expected_fpr:.6g}"
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(analysis.verdict_to_json(verdict))
    return 0


def _cmd_info(args) -> int:
    structure = persist.load_structure(args.file)
    if isinstance(structure, BloomMatrix):
        print(f"kind={'sbm' if structure.sparse else 'bm'}")
        print(f"m={structure.m} k={structure.k} items={structure.n_items}")
    elif isinstance(structure, BloomVector):
        sizes = sorted(f.m for f in structure.filters)
        print("kind=bv")
        print(
            f"filters={len(sizes)} m_min={sizes[0] if sizes else 0} "
            f"m_max={sizes[-1] if sizes else 0} items={structure.n_items}"
        )
    else:
        print("kind=bf")
        print(f"m={structure.m} k={structure.k} n={structure.inserted_count}")
    print(f"stored_bits={structure.stored_bits()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multibloom",
        description="Probabilistic label-to-sets indexes: build, query, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    gen.add_argument("--dist", choices=("uniform", "zipf"), required=True)
    gen.add_argument("--items", type=int, required=True)
    gen.add_argument("--labels", type=int, required=True)
    gen.add_argument("--p", type=float, help="uniform assignment probability")
    gen.add_argument("--s", type=float, help="zipf exponent")
    gen.add_argument("--scale", type=float, default=1.0, help="zipf weight scale")
    gen.add_argument("--seed", type=int, default=_default_seed())
    gen.add_argument("--out", required=True)
    gen.set_defaults(handler=_cmd_gen)

    build = sub.add_parser("build", help="build and serialize a structure")
    build.add_argument("dataset")
    build.add_argument("--structure", choices=("bm", "sbm", "bv"), required=True)
    build.add_argument("--fpr", type=float, help="target false-positive rate")
    build.add_argument("--m", type=int, help="explicit row count (matrices)")
    build.add_argument("--k", type=int, help="explicit hash count (matrices)")
    build.add_argument("--out", required=True)
    build.set_defaults(handler=_cmd_build)

    lookup = sub.add_parser("lookup", help="query a serialized structure")
    lookup.add_argument("file")
    lookup.add_argument("labels", nargs="*")
    lookup.add_argument("--mode", choices=("and", "or"), default="and")
    lookup.set_defaults(handler=_cmd_lookup)

    bench = sub.add_parser("bench", help="run the benchmark sweep")
    bench.add_argument("dataset")
    bench.add_argument("--structures", type=_str_list, default=list(analysis.STRUCTURE_CODES))
    bench.add_argument("--fprs", type=_float_list, default=list(analysis.DEFAULT_TARGET_FPRS))
    bench.add_argument("--batches", type=_int_list, default=[1])
    bench.add_argument("--probes", type=int, default=1000)
    bench.add_argument("--reps", type=int, default=5)
    bench.add_argument("--seed", type=int, default=_default_seed())
    bench.add_argument("--format", choices=("csv", "json"), default="csv")
    bench.add_argument("--out")
    bench.set_defaults(handler=_cmd_bench)

    bloomtest = sub.add_parser("bloomtest", help="classify a dataset's label distribution")
    bloomtest.add_argument("dataset")
    bloomtest.add_argument("--fpr", type=float, default=1e-3)
    bloomtest.add_argument("--probes", type=int, default=1000)
    bloomtest.add_argument("--threshold", type=float, default=10.0)
    bloomtest.add_argument("--floor", type=float, default=1e-2)
    bloomtest.add_argument("--seed", type=int, default=_default_seed())
    bloomtest.add_argument("--out", help="also write the verdict as JSON")
    bloomtest.set_defaults(handler=_cmd_bloomtest)

    info = sub.add_parser("info", help="describe a serialized structure")
    info.add_argument("file")
    info.set_defaults(handler=_cmd_info)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    except (OSError, ValueError, LookupError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
