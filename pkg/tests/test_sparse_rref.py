import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualitylab.fields import GF, QQ, default_primes
from dualitylab.rref import (AmbientMismatchError, SubspaceBasis, kernel,
                             rank, rref, solve, dense_rref_mod)
from dualitylab.sparse import ShapeError, SparseMatrix


def random_sparse(rng, nrows, ncols, density=0.3, field=QQ):
    entries = [(r, c, rng.randint(-5, 5))
               for r in range(nrows) for c in range(ncols)
               if rng.random() < density]
    return SparseMatrix.from_entries(nrows, ncols, entries, field)


# ----------------------------------------------------------------------
# rref
# ----------------------------------------------------------------------
def test_rref_zero_matrix():
    basis, rk = rref(SparseMatrix.zeros(4, 5))
    assert rk == 0 and basis.rows == []


def test_rref_identity():
    n = 6
    basis, rk = rref(SparseMatrix.identity(n))
    assert rk == n
    assert basis.rows == [{i: Fraction(1)} for i in range(n)]


def test_rref_hand_example():
    # rows (1,2,3), (2,4,6), (0,0,1): second row is twice the first, so
    # hand elimination leaves pivots in columns 0 and 2.
    m = SparseMatrix.from_dense([[1, 2, 3], [2, 4, 6], [0, 0, 1]])
    basis, rk = rref(m)
    assert rk == 2
    assert basis.pivots == [0, 2]
    assert basis.rows == [{0: Fraction(1), 1: Fraction(2)}, {2: Fraction(1)}]


def test_rref_idempotent_and_deterministic():
    rng = random.Random(11)
    for _ in range(25):
        m = random_sparse(rng, 8, 10)
        basis1, _ = rref(m)
        basis2, _ = rref(m)
        assert basis1 == basis2
        again, _ = rref(basis1.to_matrix())
        assert again == basis1


# ----------------------------------------------------------------------
# kernel
# ----------------------------------------------------------------------
def test_kernel_identity_and_zero():
    assert kernel(SparseMatrix.identity(5)).dim == 0
    assert kernel(SparseMatrix.zeros(3, 7)).dim == 7


def test_rank_nullity_on_random_matrices():
    rng = random.Random(5)
    for _ in range(100):
        m = random_sparse(rng, rng.randint(1, 9), rng.randint(1, 9))
        null = kernel(m)
        assert null.dim + rank(m) == m.ncols
        for vec in null.rows:
            assert not m.apply(vec)


def test_kernel_is_canonical_rref():
    m = SparseMatrix.from_dense([[1, 1]])
    null = kernel(m)
    assert null.rows == [{0: Fraction(1), 1: Fraction(-1)}]
    assert null.pivots == [0]


# ----------------------------------------------------------------------
# kron
# ----------------------------------------------------------------------
def test_kron_identities():
    assert SparseMatrix.identity(2).kron(SparseMatrix.identity(3)) == \
        SparseMatrix.identity(6)


def test_kron_action_on_pure_tensors():
    rng = random.Random(3)
    for _ in range(20):
        a = random_sparse(rng, 3, 3, 0.6)
        b = random_sparse(rng, 4, 4, 0.6)
        ab = a.kron(b)
        for i in range(3):
            for j in range(4):
                e_ij = {i * 4 + j: Fraction(1)}
                lhs = ab.apply(e_ij)
                au = a.column(i)
                bv = b.column(j)
                rhs = {r1 * 4 + r2: v1 * v2
                       for r1, v1 in au.items() for r2, v2 in bv.items()}
                assert lhs == rhs


def test_kron_rank_multiplicative():
    rng = random.Random(4)
    for _ in range(10):
        a = random_sparse(rng, 4, 3, 0.5)
        b = random_sparse(rng, 3, 4, 0.5)
        assert rank(a.kron(b)) == rank(a) * rank(b)


# ----------------------------------------------------------------------
# subspace operations
# ----------------------------------------------------------------------
def random_subspace(rng, ambient, dim_hint):
    vecs = [{c: Fraction(rng.randint(-4, 4)) for c in range(ambient)
             if rng.random() < 0.4} for _ in range(dim_hint)]
    return SubspaceBasis.from_vectors(vecs, ambient, QQ)


def test_subspace_self_and_zero_intersection():
    rng = random.Random(9)
    a = random_subspace(rng, 12, 5)
    zero = SubspaceBasis.zero(12, QQ)
    assert a.intersect(a) == a
    assert a.intersect(zero).dim == 0
    assert a.sum(zero) == a


def test_dimension_formula_on_random_pairs():
    rng = random.Random(21)
    for _ in range(100):
        a = random_subspace(rng, 20, rng.randint(0, 8))
        b = random_subspace(rng, 20, rng.randint(0, 8))
        inter = a.intersect(b)
        total = a.sum(b)
        assert a.dim + b.dim == total.dim + inter.dim
        for vec in inter.rows:
            assert a.contains(vec) and b.contains(vec)


def test_ambient_mismatch_raises():
    a = SubspaceBasis.zero(3, QQ)
    b = SubspaceBasis.zero(4, QQ)
    with pytest.raises(AmbientMismatchError):
        a.intersect(b)


# ----------------------------------------------------------------------
# prime backend
# ----------------------------------------------------------------------
def test_prime_rank_never_exceeds_rational():
    rng = random.Random(13)
    p = default_primes(0)[0]
    for _ in range(40):
        m = random_sparse(rng, 7, 7, 0.4)
        assert rank(m.change_field(GF(p))) <= rank(m)


def test_prime_rank_can_drop():
    p = default_primes(0)[0]
    m = SparseMatrix.from_dense([[p]])
    assert rank(m) == 1
    assert rank(m.change_field(GF(p))) == 0


def test_dense_path_matches_sparse_path():
    rng = random.Random(17)
    p = default_primes(1)[0]
    f = GF(p)
    for _ in range(10):
        m = random_sparse(rng, 6, 8, 0.5, field=f)
        sparse_basis, _ = rref(m)
        import numpy as np
        dense = np.zeros((6, 8), dtype=np.int64)
        for r, c, v in m.entries():
            dense[r, c] = v
        reduced, pivots = dense_rref_mod(dense, p)
        assert pivots == sparse_basis.pivots
        for i in range(reduced.shape[0]):
            row = {int(c): int(reduced[i, c])
                   for c in np.nonzero(reduced[i])[0]}
            assert row == sparse_basis.rows[i]


def test_solve_particular_solution():
    m = SparseMatrix.from_dense([[1, 2, 3], [2, 4, 6], [0, 0, 1]])
    sol = solve(m, {0: Fraction(1), 1: Fraction(2), 2: Fraction(5)})
    assert sol is not None
    assert m.apply(sol) == {0: Fraction(1), 1: Fraction(2), 2: Fraction(5)}
    assert solve(m, {1: Fraction(1)}) is None  # rows 0,1 are proportional


# ----------------------------------------------------------------------
# hypothesis properties
# ----------------------------------------------------------------------
small_entries = st.lists(
    st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-4, 4)),
    max_size=25)


@given(small_entries)
@settings(max_examples=60, deadline=None)
def test_rref_rank_bounded(entries):
    m = SparseMatrix.from_entries(6, 6, entries)
    basis, rk = rref(m)
    assert 0 <= rk <= 6
    assert basis.pivots == sorted(basis.pivots)
    assert len(set(basis.pivots)) == rk


@given(small_entries, small_entries)
@settings(max_examples=40, deadline=None)
def test_matmul_respects_rank_bound(e1, e2):
    a = SparseMatrix.from_entries(6, 6, e1)
    b = SparseMatrix.from_entries(6, 6, e2)
    assert rank(a @ b) <= min(rank(a), rank(b))


def test_shape_errors():
    with pytest.raises(ShapeError):
        SparseMatrix.identity(2) @ SparseMatrix.identity(3)
    with pytest.raises(ShapeError):
        SparseMatrix.identity(2) + SparseMatrix.identity(3)
