from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matex.patterns import identity_permutation, tuple_permutation
from matex.tensor import (
    MAX_CELLS,
    Tensor01,
    TensorError,
    TensorSizeError,
    block_contraction,
    contract_axis,
    cross_section,
    j_remainder,
    kronecker,
    line,
    loads,
    ones_count,
    uniform_groups,
)

from oracles import random_tensor

I2 = identity_permutation(2, 2).tensor


def small_tensors(max_d: int = 3, max_n: int = 4):
    @st.composite
    def build(draw):
        d = draw(st.integers(1, max_d))
        dims = tuple(draw(st.integers(1, max_n)) for _ in range(d))
        bits = draw(st.lists(st.booleans(), min_size=int(np.prod(dims)), max_size=int(np.prod(dims))))
        return Tensor01(np.array(bits, dtype=bool).reshape(dims))

    return build()


class TestBasics:
    def test_ones_count_examples(self):
        assert ones_count(Tensor01.zeros((2, 2, 2))) == 0
        assert ones_count(identity_permutation(3, 2).tensor) == 3

    def test_coordinates_are_one_based(self):
        T = Tensor01.from_ones((3, 3), [(2, 3)])
        assert T.get((2, 3)) == 1
        assert T.array[1, 2]
        with pytest.raises(TensorError):
            T.get((0, 1))
        with pytest.raises(TensorError):
            T.get((4, 1))

    def test_shape_rejections(self):
        with pytest.raises(TensorError):
            Tensor01.zeros(())
        with pytest.raises(TensorError):
            Tensor01.zeros((2, 0))
        with pytest.raises(TensorSizeError):
            Tensor01.zeros((2,) * 7)
        with pytest.raises(TensorSizeError):
            Tensor01.zeros((MAX_CELLS + 1,))

    def test_immutable(self):
        T = Tensor01.zeros((2, 2))
        with pytest.raises(ValueError):
            T.array[0, 0] = True
        U = T.set((1, 1), 1)
        assert T.ones_count() == 0 and U.ones_count() == 1

    @settings(max_examples=60, deadline=None)
    @given(small_tensors(), st.data())
    def test_set_get_round_trip(self, T, data):
        c = tuple(data.draw(st.integers(1, n)) for n in T.dims)
        v = data.draw(st.integers(0, 1))
        U = T.set(c, v)
        assert U.get(c) == v
        assert U.ones_count() - T.ones_count() == v - T.get(c)

    def test_str_render(self):
        assert str(I2) == "1.\n.1"


class TestJson:
    def test_round_trip_and_order(self):
        T = Tensor01.from_ones((2, 3), [(2, 1), (1, 3)])
        text = T.to_json()
        assert json.loads(text) == {"dims": [2, 3], "ones": [[1, 3], [2, 1]]}
        assert loads(text) == T

    @pytest.mark.parametrize(
        "payload, field",
        [
            ('{"ones": []}', "dims"),
            ('{"dims": [2, 2]}', "ones"),
            ('{"dims": [2, "x"], "ones": []}', "dims"),
            ('{"dims": [2, 2], "ones": [[1, 1], [1, 1]]}', "ones[1]"),
            ('{"dims": [2, 2], "ones": [[1, 3]]}', "ones[0]"),
            ('{"dims": [2, 2], "ones": [[1]]}', "ones[0]"),
        ],
    )
    def test_rejections_name_field(self, payload, field):
        with pytest.raises(TensorError, match=field.replace("[", r"\[").replace("]", r"\]")):
            loads(payload)

    def test_malformed(self):
        with pytest.raises(TensorError, match="malformed"):
            loads("{")

    def test_hash_and_packing(self):
        T = Tensor01.from_ones((2, 3), [(1, 1), (2, 3)])
        # C order: cells 0 and 5 set -> 0b10000100
        assert T.packed() == bytes([0b10000100])
        assert T.canonical_hash() == Tensor01.from_ones((2, 3), [(2, 3), (1, 1)]).canonical_hash()
        assert hash(T) == hash(Tensor01(T.array))


class TestSlices:
    def test_cross_section(self):
        assert cross_section(I2, 1, 1) == Tensor01([1, 0])
        assert cross_section(Tensor01.full((2, 2, 2)), 3, 2) == Tensor01.full((2, 2))
        single = Tensor01.from_ones((3, 3), [(2, 3)])
        assert cross_section(single, 2, 3) == Tensor01([0, 1, 0])
        with pytest.raises(TensorError):
            cross_section(I2, 3, 1)
        with pytest.raises(TensorError):
            cross_section(I2, 1, 3)

    def test_line(self):
        assert line(Tensor01.zeros((3, 2)), 1, (2,)) == [0, 0, 0]
        assert line(I2, 1, (2,)) == [0, 1]
        P = tuple_permutation(identity_permutation(2, 3), 2)
        assert P.tensor.dims == (4, 2, 2)
        assert line(P.tensor, 1, (1, 1)) == [1, 1, 0, 0]
        with pytest.raises(TensorError):
            line(I2, 1, (3,))

    def test_cross_section_matches_slice_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            T = random_tensor(rng, (3, 4, 2))
            for axis in (1, 2, 3):
                for idx in range(1, T.dims[axis - 1] + 1):
                    S = cross_section(T, axis, idx)
                    for c in S.ones():
                        full = c[: axis - 1] + (idx,) + c[axis - 1 :]
                        assert T.get(full) == 1
                    assert S.ones_count() == sum(1 for c in T.ones() if c[axis - 1] == idx)


class TestKronecker:
    def test_examples(self):
        N = Tensor01.from_ones((2, 3), [(1, 2), (2, 1)])
        assert kronecker(Tensor01.full((1, 1)), N) == N
        K = kronecker(I2, Tensor01.full((1, 2)))
        assert K.ones() == [(1, 1), (1, 2), (2, 3), (2, 4)]
        with pytest.raises(TensorError):
            kronecker(I2, Tensor01.full((2,)))

    def test_counts_and_blocks_against_expansion(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            M, N = random_tensor(rng, (3, 3)), random_tensor(rng, (3, 3))
            K = kronecker(M, N)
            assert K.ones_count() == M.ones_count() * N.ones_count()
            expect = {
                (3 * (a - 1) + x, 3 * (b - 1) + y) for a, b in M.ones() for x, y in N.ones()
            }
            assert set(K.ones()) == expect

    def test_associative(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            A, B, C = (random_tensor(rng, (2, 3)) for _ in range(3))
            assert kronecker(kronecker(A, B), C) == kronecker(A, kronecker(B, C))


class TestContraction:
    def test_examples(self):
        full = Tensor01.full((2, 2))
        assert contract_axis(contract_axis(full, 1, [(1, 2)]), 2, [(1, 2)]) == Tensor01([[1]])
        assert contract_axis(I2, 1, [(1, 2)]) == Tensor01.full((1, 2))
        I4 = identity_permutation(4, 2).tensor
        g = uniform_groups(4, 2)
        assert contract_axis(contract_axis(I4, 1, g), 2, g) == I2

    def test_bad_groups(self):
        for groups in ([(1, 1)], [(1, 1), (3, 4)], [(2, 4)], [(1, 2), (2, 4)], [(1, 4, 5)]):
            with pytest.raises(TensorError):
                contract_axis(Tensor01.zeros((4, 2)), 1, groups)

    def test_block_contraction_examples(self):
        assert block_contraction(Tensor01.zeros((4, 4)), 2) == Tensor01.zeros((2, 2))
        assert block_contraction(Tensor01.from_ones((4, 4), [(3, 4)]), 2).ones() == [(2, 2)]
        assert block_contraction(identity_permutation(4, 2).tensor, 2) == I2
        with pytest.raises(TensorError):
            block_contraction(Tensor01.zeros((4, 3)), 2)

    @settings(max_examples=60, deadline=None)
    @given(small_tensors())
    def test_singleton_groups_identity(self, T):
        U = T
        for axis, n in enumerate(T.dims, start=1):
            U = contract_axis(U, axis, [(i, i) for i in range(1, n + 1)])
        assert U == T

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([(4, 4), (4, 2, 6), (2, 2, 2), (6, 4)]))
    def test_block_contraction_order_independent(self, seed, dims):
        T = random_tensor(np.random.default_rng(seed), dims, 0.2)
        want = block_contraction(T, 2)
        for order in (range(1, len(dims) + 1), range(len(dims), 0, -1)):
            U = T
            for axis in order:
                U = contract_axis(U, axis, uniform_groups(dims[axis - 1], 2))
            assert U == want


class TestRemainder:
    def test_examples(self):
        assert j_remainder(Tensor01.zeros((2, 3, 2)), 2) == Tensor01.zeros((2, 2))
        assert j_remainder(identity_permutation(2, 3).tensor, 3) == I2
        with pytest.raises(TensorError):
            j_remainder(Tensor01.full((3,)), 1)

    def test_double_permutation_remainder(self):
        P = tuple_permutation(identity_permutation(2, 3), 2).tensor
        assert j_remainder(P, 3) == tuple_permutation(I2, 2).tensor

    @settings(max_examples=60, deadline=None)
    @given(small_tensors(max_d=3).filter(lambda T: T.d >= 2), st.data())
    def test_matches_full_contraction(self, T, data):
        j = data.draw(st.integers(1, T.d))
        C = contract_axis(T, j, [(1, T.dims[j - 1])])
        assert j_remainder(T, j) == Tensor01(C.array.reshape([n for i, n in enumerate(T.dims) if i != j - 1]))
