"""Shared fixtures: worked-example structures and the seeded benchmark corpora."""

import pytest

from multibloom import (
    BloomFilter,
    BloomMatrix,
    BloomVector,
    FixedTableHashFamily,
    ItemOrdering,
    UniformConfig,
    ZipfConfig,
    build_exact_index,
    generate_uniform,
    generate_zipf,
)

EXAMPLE_ITEMS = ("e1", "e2", "e3", "e4", "e5")

# Pinned matrix fixture: m=8, k=2, neighborhoods l1->{0,7}, l2->{2,4}, l3->{2,7},
# relation l1->{e2,e4}, l2->{e1,e2,e5}, l3->{e3,e5}.
MATRIX_RELATION = {
    "l1": frozenset({"e2", "e4"}),
    "l2": frozenset({"e1", "e2", "e5"}),
    "l3": frozenset({"e3", "e5"}),
}
MATRIX_NEIGHBORHOODS = {"l1": (0, 7), "l2": (2, 4), "l3": (2, 7)}

# Pinned vector fixture: one 6-bit filter then four 8-bit filters, k=2,
# relation l1->{e1,e2,e5}, l2->{e3,e5}.
VECTOR_RELATION = {
    "l1": frozenset({"e1", "e2", "e5"}),
    "l2": frozenset({"e3", "e5"}),
}
VECTOR_TABLE = {
    ("l1", 1, 6): 2, ("l1", 2, 6): 5,
    ("l1", 1, 8): 2, ("l1", 2, 8): 6,
    ("l2", 1, 6): 2, ("l2", 2, 6): 5,
    ("l2", 1, 8): 2, ("l2", 2, 8): 7,
}


@pytest.fixture
def matrix_family():
    table = {}
    for label, (first, second) in MATRIX_NEIGHBORHOODS.items():
        table[(label, 1, 8)] = first
        table[(label, 2, 8)] = second
    return FixedTableHashFamily(2, table)


def fill_matrix(matrix):
    for label, items in MATRIX_RELATION.items():
        matrix.add_label(label, items)
    return matrix


@pytest.fixture
def worked_matrix(matrix_family):
    matrix = BloomMatrix(8, 2, ItemOrdering(EXAMPLE_ITEMS), family=matrix_family,
                         track_fpr=True)
    return fill_matrix(matrix)


@pytest.fixture
def vector_family():
    return FixedTableHashFamily(2, VECTOR_TABLE)


@pytest.fixture
def worked_vector(vector_family):
    filters = [BloomFilter(6, vector_family)]
    filters += [BloomFilter(8, vector_family) for _ in range(4)]
    vector = BloomVector(ItemOrdering(EXAMPLE_ITEMS), filters, track_fpr=True)
    for label, items in VECTOR_RELATION.items():
        vector.add_label(label, items)
    return vector


# Seeded corpora shared by the statistical tests and the acceptance suite.
UNIFORM_CONFIG = UniformConfig(item_count=200, label_universe_size=5000, p=0.5,
                               seed=601)
ZIPF_CONFIG = ZipfConfig(item_count=500, label_universe_size=5125, s=0.8,
                         scale=2.0, seed=701)


@pytest.fixture(scope="session")
def uniform_dataset():
    return generate_uniform(UNIFORM_CONFIG)


@pytest.fixture(scope="session")
def zipf_dataset():
    return generate_zipf(ZIPF_CONFIG)


@pytest.fixture(scope="session")
def uniform_oracle(uniform_dataset):
    return build_exact_index(uniform_dataset)


@pytest.fixture(scope="session")
def zipf_oracle(zipf_dataset):
    return build_exact_index(zipf_dataset)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of a run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" not in report.nodeid:
                continue
            if getattr(report, "when", "call") != "call" and outcome != "error":
                continue
            name = report.nodeid.split("::")[-1]
            lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(set(lines)):
            terminalreporter.write_line(f"{status}  {name}")
