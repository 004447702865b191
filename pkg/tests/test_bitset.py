import pytest
from hypothesis import given
from hypothesis import strategies as st

from multibloom import (
    Bitset,
    ItemOrdering,
    SparseRow,
    UnknownItemError,
    decode,
    densify,
    encode,
    sparsify,
)


class TestBitset:
    def test_from01_roundtrip(self):
        bits = Bitset.from01("10100")
        assert bits.to01() == "10100"
        assert bits.length == 5
        assert [bits.get(i) for i in range(5)] == [1, 0, 1, 0, 0]

    def test_out_of_range_access(self):
        bits = Bitset(4)
        with pytest.raises(IndexError):
            bits.get(4)
        with pytest.raises(IndexError):
            bits.set(-1)

    def test_value_must_fit(self):
        with pytest.raises(ValueError):
            Bitset(3, 0b1000)

    def test_popcount_and_positions(self):
        bits = Bitset.from_positions(10, [0, 3, 9])
        assert bits.popcount() == 3
        assert list(bits.positions()) == [0, 3, 9]

    def test_or_and_in_place(self):
        a = Bitset.from01("1100")
        b = Bitset.from01("1010")
        a.or_with(b)
        assert a.to01() == "1110"
        a.and_with(Bitset.from01("0110"))
        assert a.to01() == "0110"

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Bitset(4).or_with(Bitset(5))
        with pytest.raises(ValueError):
            Bitset(4).and_with(Bitset(5))

    def test_byte_packing_is_little_endian_lsb_first(self):
        # positions 0 and 11 -> byte 0 has bit 0 set, byte 1 has bit 3 set
        bits = Bitset.from_positions(12, [0, 11])
        assert bits.to_bytes() == bytes([0b00000001, 0b00001000])
        assert Bitset.from_bytes(12, bits.to_bytes()) == bits

    def test_from_bytes_rejects_stray_bits(self):
        with pytest.raises(ValueError):
            Bitset.from_bytes(3, bytes([0b1000]))

    @given(st.lists(st.booleans(), max_size=64))
    def test_bytes_roundtrip(self, flags):
        bits = Bitset.from_positions(len(flags), [i for i, f in enumerate(flags) if f])
        assert Bitset.from_bytes(bits.length, bits.to_bytes()) == bits


class TestSparseRow:
    @pytest.mark.parametrize(
        "text,stored",
        [("10100", 3), ("00000", 0), ("00001", 5)],
    )
    def test_sparsify_drops_trailing_zeros(self, text, stored):
        row = sparsify(Bitset.from01(text))
        assert row.stored_length == stored
        assert row.logical_length == len(text)

    def test_densify_restores_length(self):
        bits = Bitset.from01("10100")
        assert densify(sparsify(bits)) == bits

    def test_reads_beyond_stored_are_zero(self):
        row = sparsify(Bitset.from01("10100"))
        assert row.get(2) == 1
        assert row.get(4) == 0
        with pytest.raises(IndexError):
            row.get(5)

    def test_stored_payload_must_end_in_one(self):
        with pytest.raises(ValueError):
            SparseRow(logical_length=5, stored_length=3, value=0b010)
        with pytest.raises(ValueError):
            SparseRow(logical_length=2, stored_length=3, value=0b101)

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_sparsify_densify_identity(self, value):
        bits = Bitset(40, value)
        assert densify(sparsify(bits)) == bits


class TestItemOrdering:
    def test_bijection(self):
        order = ItemOrdering(["a", "b", "c"])
        assert [order.position(x) for x in order] == [0, 1, 2]
        assert "b" in order and "z" not in order

    def test_duplicate_rejected(self):
        with pytest.raises(ValueError):
            ItemOrdering(["a", "a"])

    def test_unknown_position(self):
        with pytest.raises(UnknownItemError, match="'zz'"):
            ItemOrdering(["a"]).position("zz")

    def test_extended_appends(self):
        order = ItemOrdering(["a"]).extended("b")
        assert order.items == ("a", "b")
        with pytest.raises(ValueError):
            order.extended("a")


class TestEncodeDecode:
    def test_encode_basic(self):
        order = ItemOrdering(["e1", "e2", "e3"])
        assert encode(order, {"e1", "e3"}).to01() == "101"
        assert encode(order, set()).to01() == "000"

    def test_encode_under_permuted_ordering(self):
        order = ItemOrdering(["e2", "e5", "e4", "e3", "e1"])
        assert encode(order, {"e2", "e4"}).to01() == "10100"

    def test_encode_unknown_item_names_offender(self):
        order = ItemOrdering(["e1"])
        with pytest.raises(UnknownItemError, match="'e9'"):
            encode(order, {"e1", "e9"})

    def test_decode_basic(self):
        order = ItemOrdering(["e1", "e2", "e3"])
        assert decode(order, Bitset.from01("011")) == {"e2", "e3"}
        assert decode(order, Bitset.from01("000")) == set()

    def test_decode_length_mismatch(self):
        with pytest.raises(ValueError):
            decode(ItemOrdering(["e1", "e2"]), Bitset.from01("011"))

    def test_roundtrip_full_set(self):
        order = ItemOrdering(["e1", "e2", "e3"])
        full = {"e1", "e2", "e3"}
        assert decode(order, encode(order, full)) == full

    @given(st.data())
    def test_roundtrip_random_subsets(self, data):
        ids = data.draw(
            st.lists(st.text(min_size=1, max_size=4), min_size=1, max_size=12,
                     unique=True)
        )
        order = ItemOrdering(ids)
        subset = set(data.draw(st.lists(st.sampled_from(ids), unique=True)))
        assert decode(order, encode(order, subset)) == subset

    @given(st.data())
    def test_encode_monotone_under_subset(self, data):
        ids = data.draw(
            st.lists(st.text(min_size=1, max_size=4), min_size=1, max_size=10,
                     unique=True)
        )
        order = ItemOrdering(ids)
        small = set(data.draw(st.lists(st.sampled_from(ids), unique=True)))
        extra = set(data.draw(st.lists(st.sampled_from(ids), unique=True)))
        big = small | extra
        assert encode(order, small).value & encode(order, big).value == encode(order, small).value
