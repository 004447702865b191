"""Binary persistence for filters, matrices, and vectors.

Layout: 3-byte magic ``BMF``, a format-version byte, a structure tag, then
the structure body.  All counts are little-endian 64-bit; bit payloads pack
8 bits per byte with the lowest position in the least significant bit.
Seeded hash families are stored as just ``k`` (seeds are implicitly 1..k);
fixed-table families serialize their full tables so fixture files round-trip.
"""

from __future__ import annotations

import io
import struct

from .bitset import Bitset, ItemOrdering
from .bloom import BloomFilter
from .hashing import FixedTableHashFamily, SeededHashFamily
from .matrix import BloomMatrix
from .vector import BloomVector

MAGIC = b"BMF"
VERSION = 1

_TAG_FILTER = b"F"
_TAG_MATRIX = b"M"
_TAG_VECTOR = b"V"

_FAMILY_SEEDED = 0
_FAMILY_FIXED = 1


class PersistError(ValueError):
    """The file is not a recognizable structure file."""


def _write_u64(out, value: int):
    out.write(struct.pack("<Q", value))


def _read_u64(data: io.BytesIO) -> int:
    raw = data.read(8)
    if len(raw) != 8:
        raise PersistError("truncated file")
    return struct.unpack("<Q", raw)[0]


def _write_str(out, text: str):
    raw = text.encode("utf-8")
    _write_u64(out, len(raw))
    out.write(raw)


def _read_str(data: io.BytesIO) -> str:
    length = _read_u64(data)
    raw = data.read(length)
    if len(raw) != length:
        raise PersistError("truncated file")
    return raw.decode("utf-8")


def _write_bitset(out, length: int, value: int):
    _write_u64(out, length)
    out.write(value.to_bytes((length + 7) // 8, "little"))


def _read_bitset(data: io.BytesIO) -> Bitset:
    length = _read_u64(data)
    nbytes = (length + 7) // 8
    raw = data.read(nbytes)
    if len(raw) != nbytes:
        raise PersistError("truncated file")
    try:
        return Bitset.from_bytes(length, raw)
    except ValueError as err:
        raise PersistError(str(err)) from None


def _write_family(out, family):
    if isinstance(family, SeededHashFamily):
        out.write(bytes([_FAMILY_SEEDED]))
    elif isinstance(family, FixedTableHashFamily):
        out.write(bytes([_FAMILY_FIXED]))
        _write_u64(out, len(family.table))
        for (label, func, size), index in sorted(family.table.items()):
            _write_str(out, label)
            _write_u64(out, func)
            _write_u64(out, size)
            _write_u64(out, index)
    else:
        raise PersistError(f"cannot serialize hash family {family!r}")


def _read_family(data: io.BytesIO, k: int):
    tag = data.read(1)
    if tag == bytes([_FAMILY_SEEDED]):
        return SeededHashFamily(k)
    if tag == bytes([_FAMILY_FIXED]):
        count = _read_u64(data)
        table = {}
        for _ in range(count):
            label = _read_str(data)
            func = _read_u64(data)
            size = _read_u64(data)
            table[(label, func, size)] = _read_u64(data)
        return FixedTableHashFamily(k, table)
    raise PersistError("unknown hash family tag")


def _write_ordering(out, ordering: ItemOrdering):
    _write_u64(out, len(ordering))
    for item in ordering:
        _write_str(out, item)


def _read_ordering(data: io.BytesIO) -> ItemOrdering:
    count = _read_u64(data)
    return ItemOrdering(_read_str(data) for _ in range(count))


def _filter_body(out, filt: BloomFilter):
    _write_u64(out, filt.m)
    _write_u64(out, filt.k)
    _write_family(out, filt.family)
    _write_bitset(out, filt.m, filt.bits)


def _matrix_body(out, matrix: BloomMatrix):
    _write_u64(out, matrix.m)
    _write_u64(out, matrix.k)
    _write_u64(out, matrix.n_items)
    out.write(bytes([1 if matrix.sparse else 0]))
    _write_family(out, matrix.family)
    _write_ordering(out, matrix.ordering)
    if matrix.sparse:
        for row in matrix.rows:
            stored = row.bit_length()
            _write_u64(out, stored)
            out.write(row.to_bytes((stored + 7) // 8, "little"))
    else:
        for row in matrix.rows:
            _write_bitset(out, matrix.n_items, row)


def _vector_body(out, vector: BloomVector):
    _write_u64(out, vector.n_items)
    _write_ordering(out, vector.ordering)
    fixed = {
        id(f.family): f.family
        for f in vector.filters
        if isinstance(f.family, FixedTableHashFamily)
    }
    if not fixed:
        out.write(bytes([_FAMILY_SEEDED]))
    elif len(fixed) == 1 and all(
        isinstance(f.family, FixedTableHashFamily) for f in vector.filters
    ):
        # One shared table: store it once in the header.
        _write_family(out, next(iter(fixed.values())))
    else:
        raise PersistError("vectors with mixed hash family kinds cannot be saved")
    for filt in vector.filters:
        _write_u64(out, filt.m)
        _write_u64(out, filt.k)
        _write_u64(out, filt.inserted_count)
        _write_bitset(out, filt.m, filt.bits)


def save_structure(structure, path):
    """Serialize a BloomFilter, BloomMatrix, or BloomVector to a file."""
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(bytes([VERSION]))
    if isinstance(structure, BloomFilter):
        out.write(_TAG_FILTER)
        _filter_body(out, structure)
    elif isinstance(structure, BloomMatrix):
        out.write(_TAG_MATRIX)
        _matrix_body(out, structure)
    elif isinstance(structure, BloomVector):
        out.write(_TAG_VECTOR)
        _vector_body(out, structure)
    else:
        raise PersistError(f"cannot serialize {type(structure).__name__}")
    with open(path, "wb") as fh:
        fh.write(out.getvalue())


def _load_filter(data: io.BytesIO) -> BloomFilter:
    m = _read_u64(data)
    k = _read_u64(data)
    family = _read_family(data, k)
    bits = _read_bitset(data)
    if bits.length != m:
        raise PersistError("filter payload length does not match m")
    filt = BloomFilter(m, family)
    filt.bits = bits.value
    return filt


def _load_matrix(data: io.BytesIO) -> BloomMatrix:
    m = _read_u64(data)
    k = _read_u64(data)
    n_items = _read_u64(data)
    flag = data.read(1)
    if flag not in (b"\x00", b"\x01"):
        raise PersistError("bad matrix variant flag")
    sparse = flag == b"\x01"
    family = _read_family(data, k)
    ordering = _read_ordering(data)
    if len(ordering) != n_items:
        raise PersistError("ordering size does not match item count")
    matrix = BloomMatrix(m, k, ordering, family=family, sparse=sparse)
    for row in range(m):
        if sparse:
            stored = _read_u64(data)
            nbytes = (stored + 7) // 8
            raw = data.read(nbytes)
            if len(raw) != nbytes:
                raise PersistError("truncated file")
            value = int.from_bytes(raw, "little")
            if value.bit_length() != stored and not (value == 0 and stored == 0):
                raise PersistError("sparse row does not end in a 1-bit")
            if stored > n_items:
                raise PersistError("sparse row longer than the item count")
            matrix.rows[row] = value
        else:
            bits = _read_bitset(data)
            if bits.length != n_items:
                raise PersistError("dense row length does not match item count")
            matrix.rows[row] = bits.value
    return matrix


def _load_vector(data: io.BytesIO) -> BloomVector:
    n_items = _read_u64(data)
    ordering = _read_ordering(data)
    if len(ordering) != n_items:
        raise PersistError("ordering size does not match item count")
    family_tag = data.read(1)
    shared_fixed = None
    if family_tag == bytes([_FAMILY_FIXED]):
        count = _read_u64(data)
        table = {}
        max_func = 1
        for _ in range(count):
            label = _read_str(data)
            func = _read_u64(data)
            size = _read_u64(data)
            table[(label, func, size)] = _read_u64(data)
            max_func = max(max_func, func)
        shared_fixed = FixedTableHashFamily(max_func, table)
    elif family_tag != bytes([_FAMILY_SEEDED]):
        raise PersistError("unknown hash family tag")
    filters = []
    seeded_cache = {}
    for _ in range(n_items):
        m = _read_u64(data)
        k = _read_u64(data)
        n = _read_u64(data)
        bits = _read_bitset(data)
        if bits.length != m:
            raise PersistError("filter payload length does not match m")
        if shared_fixed is not None:
            if k != shared_fixed.k:
                raise PersistError("fixed-table vector filters must share k")
            family = shared_fixed
        else:
            family = seeded_cache.setdefault(k, SeededHashFamily(k))
        filt = BloomFilter(m, family)
        filt.bits = bits.value
        filt.inserted_count = n
        filters.append(filt)
    return BloomVector(ordering, filters)


def load_structure(path):
    """Load whatever structure a file holds; raises PersistError if corrupt."""
    with open(path, "rb") as fh:
        data = io.BytesIO(fh.read())
    if data.read(3) != MAGIC:
        raise PersistError(f"{path}: not a structure file (bad magic)")
    version = data.read(1)
    if version != bytes([VERSION]):
        raise PersistError(f"{path}: unsupported format version {version!r}")
    tag = data.read(1)
    if tag == _TAG_FILTER:
        return _load_filter(data)
    if tag == _TAG_MATRIX:
        return _load_matrix(data)
    if tag == _TAG_VECTOR:
        return _load_vector(data)
    raise PersistError(f"{path}: unknown structure tag {tag!r}")
