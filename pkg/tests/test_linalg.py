import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indgl2 import _kernels
from indgl2.errors import DimensionMismatch
from indgl2.gf import FieldCtx
from indgl2.linalg import (
    LinMap,
    Subspace,
    coinvariant_complement,
    echelon,
    fixed_space,
    full_space,
    identity_map,
    image,
    intersect,
    kernel,
    member,
    preimage,
    quotient_dim,
    subspace_sum,
)


@pytest.fixture(scope="module")
def F9():
    return FieldCtx(3, 2).fq


@pytest.fixture(scope="module")
def F3():
    return FieldCtx(3, 1).fq


def rand_mat(rng, F, n, m):
    return rng.integers(0, F.order, size=(n, m)).astype(np.int32)


def test_echelon_idempotent(F9):
    rng = np.random.default_rng(0)
    for _ in range(15):
        S = echelon(rand_mat(rng, F9, 5, 8), F9)
        assert echelon(S.rows, F9, ambient=8) == S


def test_echelon_strictly_increasing_pivots(F9):
    rng = np.random.default_rng(1)
    S = echelon(rand_mat(rng, F9, 6, 9), F9)
    assert list(S.pivots) == sorted(set(int(p) for p in S.pivots))
    # pivot entries are 1, pivot columns elsewhere 0
    for k, col in enumerate(S.pivots):
        assert S.rows[k, col] == 1
        assert np.count_nonzero(S.rows[:, col]) == 1


def test_member_basic(F3):
    v = np.array([1, 2, 0], dtype=np.int32)
    w = np.array([0, 1, 1], dtype=np.int32)
    S = echelon(np.vstack([v, w]), F3)
    assert member(v, S)
    assert member(F3.ADD[v, w], S)
    assert not member(np.array([0, 0, 1], dtype=np.int32), S)


def test_kernel_zero_map(F3):
    Z = LinMap(F3, np.zeros((3, 4), dtype=np.int32))
    assert kernel(Z).dim == 3


def test_kernel_all_ones_row_map(F3):
    # 1x3 all-ones map transposed: v ↦ Σv_i; kernel has dimension 2
    M = LinMap(F3, np.ones((3, 1), dtype=np.int32))
    assert kernel(M).dim == 2


def test_rank_nullity_random(F9):
    rng = np.random.default_rng(2)
    for _ in range(25):
        n, m = rng.integers(1, 14, size=2)
        M = LinMap(F9, rand_mat(rng, F9, n, m))
        k = kernel(M)
        assert k.dim + image(M).dim == n
        for row in k.rows:
            assert not np.any(M.apply(row))


def test_sum_intersect_dim_formula(F9):
    rng = np.random.default_rng(3)
    for _ in range(25):
        amb = int(rng.integers(2, 12))
        S = echelon(rand_mat(rng, F9, int(rng.integers(1, 6)), amb), F9)
        T = echelon(rand_mat(rng, F9, int(rng.integers(1, 6)), amb), F9)
        assert S.dim + T.dim == subspace_sum(S, T).dim + intersect(S, T).dim
        for row in intersect(S, T).rows:
            assert member(row, S) and member(row, T)


def test_preimage(F9):
    rng = np.random.default_rng(4)
    for _ in range(15):
        M = LinMap(F9, rand_mat(rng, F9, 6, 5))
        S = echelon(rand_mat(rng, F9, 2, 5), F9)
        P = preimage(M, S)
        for row in P.rows:
            assert member(M.apply(row), S)
        # the preimage contains the kernel
        for row in kernel(M).rows:
            assert member(row, P)


def test_preimage_exhaustive_small(F3):
    # brute force count over F_3^3
    rng = np.random.default_rng(5)
    M = LinMap(F3, rand_mat(rng, F3, 3, 2))
    S = echelon(np.array([[1, 2]], dtype=np.int32), F3)
    P = preimage(M, S)
    count = 0
    for code in range(27):
        v = np.array([code % 3, (code // 3) % 3, (code // 9) % 3], dtype=np.int32)
        if member(M.apply(v), S):
            count += 1
    assert count == 3**P.dim


def test_quotient_dim(F3):
    S = echelon(np.array([[1, 0, 0]], dtype=np.int32), F3)
    T = echelon(np.array([[1, 0, 0], [0, 1, 0]], dtype=np.int32), F3)
    assert quotient_dim(S, T) == 1
    with pytest.raises(DimensionMismatch):
        quotient_dim(T, S)


def test_fixed_space_identity(F3):
    assert fixed_space([identity_map(F3, 4)]).dim == 4
    assert fixed_space([], field=F3, ambient=4).dim == 4


def test_fixed_space_regular_rep(F3):
    # cyclic shift on K^3 = regular representation of Z/3
    P = np.zeros((3, 3), dtype=np.int32)
    P[0, 1] = P[1, 2] = P[2, 0] = 1
    fx = fixed_space([LinMap(F3, P)])
    assert fx.dim == 1
    assert member(np.array([1, 1, 1], dtype=np.int32), fx)


def test_fixed_space_multiple_ops(F9):
    rng = np.random.default_rng(6)
    # two commuting unipotents: I + N with N strictly upper triangular
    n = 6
    ops = []
    for _ in range(2):
        N = np.triu(rand_mat(rng, F9, n, n), k=1)
        M = N.copy()
        np.fill_diagonal(M, 1)
        ops.append(LinMap(F9, M))
    fx = fixed_space(ops)
    for u in ops:
        for row in fx.rows:
            assert np.array_equal(u.apply(row), row)


def test_coinvariant_complement_regular_rep(F3):
    P = np.zeros((3, 3), dtype=np.int32)
    P[0, 1] = P[1, 2] = P[2, 0] = 1
    cw = coinvariant_complement([LinMap(F3, P)])
    assert cw.dim == 2  # augmentation ideal image has codimension 1


def test_coinvariant_identity_op(F3):
    assert coinvariant_complement([identity_map(F3, 5)]).dim == 0
    assert coinvariant_complement([], field=F3, ambient=5).dim == 0


def test_coinvariant_contains_product_op(F9):
    # (uv - 1)v ∈ im(u-1) + im(v-1) for commuting u, v
    rng = np.random.default_rng(7)
    n = 5
    mats = []
    for _ in range(2):
        N = np.triu(rand_mat(rng, F9, n, n), k=1)
        M = N.copy()
        np.fill_diagonal(M, 1)
        mats.append(M)
    u, v = LinMap(F9, mats[0]), LinMap(F9, mats[1])
    cw = coinvariant_complement([u, v])
    uv = u.compose(v)
    for row in image(uv.minus_identity()).rows:
        assert member(row, cw)


def test_dimension_mismatch_guards(F3, F9):
    S = echelon(np.array([[1, 0]], dtype=np.int32), F3)
    T = echelon(np.array([[1, 0, 0]], dtype=np.int32), F3)
    with pytest.raises(DimensionMismatch):
        subspace_sum(S, T)
    with pytest.raises(DimensionMismatch):
        intersect(S, echelon(np.array([[1, 0]], dtype=np.int32), F9))


class TestBackends:
    def run_with(self, backend, fn):
        old = os.environ.get("INDGL2_BACKEND")
        os.environ["INDGL2_BACKEND"] = backend
        try:
            return fn()
        finally:
            if old is None:
                os.environ.pop("INDGL2_BACKEND", None)
            else:
                os.environ["INDGL2_BACKEND"] = old

    def test_rref_agrees(self, F9):
        rng = np.random.default_rng(8)
        for _ in range(10):
            M = rand_mat(rng, F9, 7, 9)
            r1, p1 = self.run_with("numpy", lambda: _kernels.rref(M, F9))
            r2, p2 = self.run_with("numba", lambda: _kernels.rref(M, F9))
            assert np.array_equal(r1, r2)
            assert np.array_equal(p1, p2)

    def test_matmul_agrees(self, F9):
        rng = np.random.default_rng(9)
        for _ in range(10):
            A = rand_mat(rng, F9, 6, 7)
            B = rand_mat(rng, F9, 7, 5)
            c1 = self.run_with("numpy", lambda: _kernels.matmul(A, B, F9))
            c2 = self.run_with("numba", lambda: _kernels.matmul(A, B, F9))
            assert np.array_equal(c1, c2)

    def test_invalid_backend_rejected(self):
        with pytest.raises(ValueError):
            self.run_with("cuda", _kernels.backend)


@given(st.lists(st.integers(0, 8), min_size=12, max_size=12))
@settings(max_examples=40, deadline=None)
def test_member_after_echelon(codes):
    F = FieldCtx(3, 2).fq
    rows = np.array(codes, dtype=np.int32).reshape(3, 4)
    S = echelon(rows, F)
    for row in rows:
        assert member(row, S)
