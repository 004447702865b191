"""Probabilistic indexes mapping labels to the multiple sets containing them.

Three structures answer "which items hold this label" with tunable false
positives and no false negatives: BloomMatrix (fixed m x N bit matrix),
its sparse variant (count-sorted ordering, trailing zeros trimmed), and
BloomVector (one individually sized Bloom filter per item).  The analysis
module measures observed false-positive rates against an exact index and
uses a matrix as a pre-filter to pick the right structure for a dataset.
"""

from .analysis import (
    BenchRecord,
    BloomTestVerdict,
    FalseNegativeError,
    FprMeasurement,
    bench_sweep,
    bloom_test,
    measure_fpr,
)
from .bitset import (
    Bitset,
    ItemOrdering,
    SparseRow,
    UnknownItemError,
    decode,
    densify,
    encode,
    sparsify,
)
from .bloom import BloomFilter, FilterParams, size_for, theoretical_fp
from .dataset import (
    Dataset,
    ExactIndex,
    UniformConfig,
    ZipfConfig,
    build_exact_index,
    generate_uniform,
    generate_zipf,
    load_csv,
    save_csv,
    zipf_rank_weights,
)
from .hashing import FixedTableHashFamily, SeededHashFamily, murmur3_32
from .matrix import BloomMatrix, MatrixFpReport, build_matrix, sparse_ordering
from .persist import PersistError, load_structure, save_structure
from .vector import BloomVector, VectorFpReport, build_vector

__version__ = "0.1.0"

__all__ = [
    "BenchRecord",
    "Bitset",
    "BloomFilter",
    "BloomMatrix",
    "BloomTestVerdict",
    "BloomVector",
    "Dataset",
    "ExactIndex",
    "FalseNegativeError",
    "FilterParams",
    "FixedTableHashFamily",
    "FprMeasurement",
    "ItemOrdering",
    "MatrixFpReport",
    "PersistError",
    "SeededHashFamily",
    "SparseRow",
    "UniformConfig",
    "UnknownItemError",
    "VectorFpReport",
    "ZipfConfig",
    "bench_sweep",
    "bloom_test",
    "build_exact_index",
    "build_matrix",
    "build_vector",
    "decode",
    "densify",
    "encode",
    "generate_uniform",
    "generate_zipf",
    "load_csv",
    "load_structure",
    "measure_fpr",
    "murmur3_32",
    "save_csv",
    "save_structure",
    "size_for",
    "sparse_ordering",
    "sparsify",
    "theoretical_fp",
    "zipf_rank_weights",
]
