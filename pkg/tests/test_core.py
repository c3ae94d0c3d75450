import pickle

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dbbo.core import (
    BitString,
    DimensionMismatchError,
    RngStream,
    as_generator,
    derive_seed,
    hamming_distance,
    random_bitstring,
)

bit_lists = st.lists(st.integers(0, 1), min_size=1, max_size=200)


class TestBitString:
    def test_from_text(self):
        x = BitString("0110")
        assert len(x) == 4
        assert x.to01() == "0110"
        assert [x[i] for i in range(4)] == [0, 1, 1, 0]

    def test_from_list_and_array(self):
        assert BitString([1, 0, 1]) == BitString(np.array([1, 0, 1]))
        assert BitString([1, 0, 1]).to01() == "101"

    @pytest.mark.parametrize("bad", ["", "012", "ab", [2], [0, -1], [[0, 1]], []])
    def test_rejects_non_binary(self, bad):
        with pytest.raises(ValueError):
            BitString(bad)

    def test_storage_is_read_only(self):
        x = BitString("101")
        with pytest.raises(ValueError):
            x.bits[0] = 0

    def test_constructor_copies_input_array(self):
        raw = np.array([1, 0, 1], dtype=np.uint8)
        x = BitString(raw)
        raw[0] = 0
        assert x.to01() == "101"

    def test_equality_and_hash(self):
        assert BitString("10") == BitString([1, 0])
        assert BitString("10") != BitString("01")
        assert BitString("10") != BitString("100")
        assert hash(BitString("10")) == hash(BitString([1, 0]))
        assert BitString("10") != "10"

    def test_complement(self):
        assert BitString("0110").complement() == BitString("1001")

    def test_pickle_round_trip(self):
        x = BitString("01101")
        assert pickle.loads(pickle.dumps(x)) == x

    @given(bit_lists)
    def test_text_round_trip(self, bits):
        x = BitString(bits)
        assert BitString(x.to01()) == x


class TestHamming:
    def test_examples(self):
        assert hamming_distance(BitString("0000"), BitString("0000")) == 0
        assert hamming_distance(BitString("0101"), BitString("1010")) == 4
        assert hamming_distance(BitString("0101"), BitString("0111")) == 1

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            hamming_distance(BitString("01"), BitString("011"))

    @given(bit_lists)
    def test_self_and_complement(self, bits):
        x = BitString(bits)
        assert hamming_distance(x, x) == 0
        assert hamming_distance(x, x.complement()) == len(x)

    @given(bit_lists)
    def test_symmetry(self, bits):
        x = BitString(bits)
        y = x.complement()
        assert hamming_distance(x, y) == hamming_distance(y, x)


class TestRngStream:
    def test_seed_bounds(self):
        RngStream(0)
        RngStream(2**64 - 1)
        with pytest.raises(ValueError):
            RngStream(-1)
        with pytest.raises(ValueError):
            RngStream(2**64)

    def test_equal_seeds_equal_draws(self):
        a, b = RngStream(42), RngStream(42)
        assert a.generator.integers(0, 1000, 10).tolist() == b.generator.integers(
            0, 1000, 10
        ).tolist()

    def test_as_generator(self):
        stream = RngStream(3)
        assert as_generator(stream) is stream.generator
        g = np.random.default_rng(3)
        assert as_generator(g) is g
        with pytest.raises(TypeError):
            as_generator(3)


class TestDeriveSeed:
    def test_deterministic(self):
        args = (881310257, "rls|onemax,50,0,881310257", 7)
        assert derive_seed(*args) == derive_seed(*args)

    def test_range(self):
        for k in range(50):
            s = derive_seed(1, "cell", k)
            assert 0 <= s < 2**64

    def test_distinct_inputs_distinct_seeds(self):
        base = derive_seed(1, "cell-a", 0)
        assert base != derive_seed(1, "cell-a", 1)
        assert base != derive_seed(1, "cell-b", 0)
        assert base != derive_seed(2, "cell-a", 0)

    def test_no_collisions_across_runs(self):
        seeds = {derive_seed(99, "cell", k) for k in range(1000)}
        assert len(seeds) == 1000

    def test_negative_run_index(self):
        with pytest.raises(ValueError):
            derive_seed(1, "cell", -1)

    def test_for_run_matches(self):
        stream = RngStream.for_run(5, "k", 3)
        assert stream.seed == derive_seed(5, "k", 3)


class TestRandomBitstring:
    def test_deterministic(self):
        assert random_bitstring(64, RngStream(11)) == random_bitstring(64, RngStream(11))

    def test_dimension_validation(self):
        with pytest.raises(ValueError):
            random_bitstring(0, RngStream(1))

    def test_roughly_fair(self):
        g = np.random.default_rng(0)
        total = sum(int(random_bitstring(100, g).bits.sum()) for _ in range(200))
        # 20,000 fair bits: mean 10,000, sd ~70.7; allow 6 sd
        assert abs(total - 10_000) < 425
