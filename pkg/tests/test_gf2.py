import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpqc.gf2 import (BitMatrix, BitVector, DimensionError, entrywise_product, in_rowspan, nullspace,
                      rank, rref, solve, triple_product_weight, weight)

from conftest import np_rank


def bv(s):
    return BitVector.from_str(s)


def matrices(max_rows=12, max_cols=12):
    return st.integers(1, max_rows).flatmap(lambda m: st.integers(1, max_cols).flatmap(
        lambda n: st.lists(st.integers(0, (1 << n) - 1), min_size=m, max_size=m).map(
            lambda rows: BitMatrix(tuple(rows), n))))


def test_weight_examples():
    assert weight(bv("0000")) == 0
    assert weight(bv("1111")) == 4
    assert weight(bv("1011010")) == sum(map(int, "1011010"))


def test_entrywise_product_examples():
    assert entrywise_product(bv("1100"), bv("1010")) == bv("1000")
    v = bv("1011")
    assert entrywise_product(v, BitVector.ones(4)) == v
    assert entrywise_product(v, BitVector.zeros(4)) == BitVector.zeros(4)
    with pytest.raises(DimensionError):
        entrywise_product(bv("10"), bv("100"))


def test_triple_product_weight_examples():
    assert triple_product_weight(bv("1111"), bv("1111"), bv("1111")) == 4
    assert triple_product_weight(bv("1100"), bv("0011"), bv("1111")) == 0
    u, v, w = "1110", "0111", "1011"
    assert triple_product_weight(bv(u), bv(v), bv(w)) == sum(a == b == c == "1" for a, b, c in zip(u, v, w))
    with pytest.raises(DimensionError):
        triple_product_weight(bv("1"), bv("11"), bv("11"))


def test_rref_examples():
    I3 = BitMatrix.identity(3)
    R, rk, piv = rref(I3)
    assert R == I3 and rk == 3 and piv == [0, 1, 2]
    assert rref(BitMatrix.from_strings(["1010", "1010"]))[1] == 1


def test_nullspace_examples():
    assert nullspace(BitMatrix.identity(5)).nrows == 0
    N = nullspace(BitMatrix.from_strings(["11"]))
    assert N.rows == (bv("11").bits,)
    M = BitMatrix.from_strings(["1100", "0011"])
    N = nullspace(M)
    assert N.nrows == 2
    kernel = {x for x in range(16) if all((r & x).bit_count() % 2 == 0 for r in M.rows)}
    assert set(N.span()) == kernel


def test_solve_examples():
    b = bv("101")
    assert solve(BitMatrix.identity(3), b) == b
    assert solve(BitMatrix.zeros(2, 3), bv("01")) is None
    with pytest.raises(DimensionError):
        solve(BitMatrix.identity(3), bv("10"))


@given(st.integers(0, 2**20 - 1), st.integers(0, 2**20 - 1))
def test_product_weight_parity_is_inner_product(a, b):
    u, v = BitVector(a, 20), BitVector(b, 20)
    assert weight(entrywise_product(u, v)) % 2 == u.dot(v)


@settings(max_examples=150)
@given(matrices())
def test_rank_matches_numpy_oracle(M):
    assert rank(M) == np_rank(M.to_array())


@settings(max_examples=150)
@given(matrices())
def test_rref_idempotent_and_rowspace_preserved(M):
    R, rk, piv = rref(M)
    assert rref(R)[0] == R
    assert all(in_rowspan(BitVector(r, M.ncols), R) for r in M.rows)
    assert all(in_rowspan(BitVector(r, M.ncols), M) for r in R.rows)
    assert len(piv) == rk == R.nrows


@settings(max_examples=100)
@given(matrices(max_cols=10))
def test_nullspace_agrees_with_enumeration(M):
    N = nullspace(M)
    n = M.ncols
    assert N.nrows == n - rank(M)
    for r in M.rows:
        for x in N.rows:
            assert (r & x).bit_count() % 2 == 0
    kernel = {x for x in range(1 << n) if all((r & x).bit_count() % 2 == 0 for r in M.rows)}
    assert set(N.span()) == kernel


@settings(max_examples=150)
@given(matrices(), st.data())
def test_solve_consistent_systems(M, data):
    x0 = data.draw(st.integers(0, (1 << M.ncols) - 1))
    b = M.mul_vec(BitVector(x0, M.ncols))
    x = solve(M, b)
    assert x is not None and M.mul_vec(x) == b


def test_solve_reports_infeasible():
    M = BitMatrix.from_strings(["11", "11"])
    assert solve(M, bv("10")) is None


def test_exhaustive_small_nullspace():
    for rows in itertools.product(range(8), repeat=2):
        M = BitMatrix(rows, 3)
        assert rank(M) + nullspace(M).nrows == 3


def test_matrix_from_array_roundtrip():
    a = np.array([[1, 0, 1], [0, 1, 1]])
    M = BitMatrix.from_array(a)
    assert (M.to_array() == a).all()
