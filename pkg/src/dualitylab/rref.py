"""Reduced row-echelon bases, kernels and subspace arithmetic.

Every subspace in the engine is carried as a reduced row-echelon basis
(unit pivots, pivots strictly increasing, pivot columns cleared above
and below).  RREF is canonical for a given row space and field, so two
subspaces are equal iff their bases compare equal entry by entry; that
property is what turns the verified theorems into decidable checks.

Pivoting is leftmost-column first, lowest row as tie-break.  For prime
fields a dense int64 numpy elimination kicks in once a problem is large
enough; the moduli are capped (see :mod:`dualitylab.fields`) so that the
update ``c*x - y`` never overflows int64.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .fields import QQ, Field, PrimeField, Scalar
from .sparse import Row, SparseMatrix, vec_add_scaled

# Dense elimination thresholds for prime fields.
_DENSE_MIN_COLS = 160
_DENSE_MIN_ROWS = 48


class AmbientMismatchError(Exception):
    """Subspace operands live in different ambient spaces."""


# ----------------------------------------------------------------------
# insertion-style RREF builder
# ----------------------------------------------------------------------
class InsertionBasis:
    """Mutable RREF accumulator; feed vectors, read off a canonical basis.

    Kept in fully reduced form after every insertion, so `rows` can be
    used for membership tests at any point.
    """

    def __init__(self, ambient: int, field: Field = QQ):
        self.ambient = ambient
        self.field = field
        self.rows: List[Row] = []
        self.pivots: List[int] = []

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Row) -> Row:
        """Remainder of `vec` after elimination against the basis."""
        f = self.field
        rem = {c: v for c, v in vec.items() if not f.is_zero(v)}
        for pivot, row in zip(self.pivots, self.rows):
            c = rem.get(pivot)
            if c is not None:
                vec_add_scaled(rem, row, f.neg(c), f)
        return rem

    def coordinates(self, vec: Row) -> Optional[List[Scalar]]:
        """Coefficients of `vec` on the basis rows, or None if outside."""
        f = self.field
        rem = {c: v for c, v in vec.items() if not f.is_zero(v)}
        coords: List[Scalar] = []
        for pivot, row in zip(self.pivots, self.rows):
            c = rem.get(pivot, f.zero)
            coords.append(c)
            if not f.is_zero(c):
                vec_add_scaled(rem, row, f.neg(c), f)
        return None if rem else coords

    def contains(self, vec: Row) -> bool:
        return not self.reduce(vec)

    def insert(self, vec: Row) -> bool:
        """Insert a vector; returns True when the dimension grew."""
        f = self.field
        rem = self.reduce(vec)
        if not rem:
            return False
        pivot = min(rem)
        inv = f.inv(rem[pivot])
        new_row = {c: f.mul(inv, v) for c, v in rem.items()}
        # Clear the new pivot column in existing rows to stay reduced.
        for row in self.rows:
            c = row.get(pivot)
            if c is not None:
                vec_add_scaled(row, new_row, f.neg(c), f)
        idx = 0
        while idx < len(self.pivots) and self.pivots[idx] < pivot:
            idx += 1
        self.pivots.insert(idx, pivot)
        self.rows.insert(idx, new_row)
        return True

    def freeze(self) -> "SubspaceBasis":
        return SubspaceBasis(self.ambient, self.field,
                             [dict(r) for r in self.rows], list(self.pivots))


class SubspaceBasis:
    """Immutable subspace of F^ambient in canonical RREF."""

    __slots__ = ("ambient", "field", "rows", "pivots")

    def __init__(self, ambient: int, field: Field, rows: List[Row], pivots: List[int]):
        self.ambient = ambient
        self.field = field
        self.rows = rows
        self.pivots = pivots

    # -- construction ---------------------------------------------------
    @classmethod
    def from_vectors(cls, vectors: Sequence[Row], ambient: int,
                     field: Field = QQ) -> "SubspaceBasis":
        if field.char and _dense_worthwhile(len(vectors), ambient):
            dense = _vectors_to_dense(vectors, ambient, field.p)
            reduced, pivots = dense_rref_mod(dense, field.p)
            return cls(ambient, field, _dense_to_rows(reduced), pivots)
        builder = InsertionBasis(ambient, field)
        for vec in vectors:
            builder.insert(vec)
        return builder.freeze()

    @classmethod
    def zero(cls, ambient: int, field: Field = QQ) -> "SubspaceBasis":
        return cls(ambient, field, [], [])

    @classmethod
    def full(cls, ambient: int, field: Field = QQ) -> "SubspaceBasis":
        rows = [{i: field.one} for i in range(ambient)]
        return cls(ambient, field, rows, list(range(ambient)))

    # -- inspection ------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SubspaceBasis)
                and self.ambient == other.ambient and self.field == other.field
                and self.pivots == other.pivots and self.rows == other.rows)

    def __repr__(self):
        return f"SubspaceBasis(dim={self.dim}, ambient={self.ambient}, {self.field!r})"

    def reduce(self, vec: Row) -> Row:
        f = self.field
        rem = {c: v for c, v in vec.items() if not f.is_zero(v)}
        for pivot, row in zip(self.pivots, self.rows):
            c = rem.get(pivot)
            if c is not None:
                vec_add_scaled(rem, row, f.neg(c), f)
        return rem

    def contains(self, vec: Row) -> bool:
        return not self.reduce(vec)

    def contains_subspace(self, other: "SubspaceBasis") -> bool:
        self._check(other)
        return all(self.contains(row) for row in other.rows)

    def coordinates(self, vec: Row) -> Optional[List[Scalar]]:
        f = self.field
        rem = {c: v for c, v in vec.items() if not f.is_zero(v)}
        coords: List[Scalar] = []
        for pivot, row in zip(self.pivots, self.rows):
            c = rem.get(pivot, f.zero)
            coords.append(c)
            if not f.is_zero(c):
                vec_add_scaled(rem, row, f.neg(c), f)
        return None if rem else coords

    def _check(self, other: "SubspaceBasis"):
        if self.ambient != other.ambient:
            raise AmbientMismatchError(
                f"ambient {self.ambient} vs {other.ambient}")
        if self.field != other.field:
            raise AmbientMismatchError(
                f"field {self.field!r} vs {other.field!r}")

    # -- subspace arithmetic ----------------------------------------------
    def sum(self, other: "SubspaceBasis") -> "SubspaceBasis":
        self._check(other)
        return SubspaceBasis.from_vectors(self.rows + other.rows,
                                          self.ambient, self.field)

    def intersect(self, other: "SubspaceBasis") -> "SubspaceBasis":
        """Zassenhaus-style intersection via the kernel of stacked bases."""
        self._check(other)
        if not self.rows or not other.rows:
            return SubspaceBasis.zero(self.ambient, self.field)
        f = self.field
        ka, kb = self.dim, other.dim
        # Solutions (x, y) of x*A - y*B = 0; intersection vectors are x*A.
        stacked_rows: Dict[int, Row] = {}
        for i, row in enumerate(self.rows):
            stacked_rows[i] = dict(row)
        for j, row in enumerate(other.rows):
            stacked_rows[ka + j] = {c: f.neg(v) for c, v in row.items()}
        stacked = SparseMatrix(ka + kb, self.ambient, stacked_rows, f)
        null = kernel(stacked.transpose())
        vectors: List[Row] = []
        for coeff in null.rows:
            vec: Row = {}
            for i, row in enumerate(self.rows):
                c = coeff.get(i)
                if c is not None:
                    vec_add_scaled(vec, row, c, f)
            vectors.append(vec)
        return SubspaceBasis.from_vectors(vectors, self.ambient, f)

    def to_matrix(self) -> SparseMatrix:
        rows = {i: dict(r) for i, r in enumerate(self.rows) if r}
        return SparseMatrix(self.dim, self.ambient, rows, self.field)

    def change_field(self, field: Field) -> "SubspaceBasis":
        """Entrywise reduction of the basis (unit pivots survive intact)."""
        if field == self.field:
            return self
        rows = []
        for row in self.rows:
            new: Row = {}
            for c, v in row.items():
                w = field.convert(v)
                if not field.is_zero(w):
                    new[c] = w
            rows.append(new)
        return SubspaceBasis(self.ambient, field, rows, list(self.pivots))


# ----------------------------------------------------------------------
# rank / rref / kernel entry points
# ----------------------------------------------------------------------
def rref(matrix: SparseMatrix) -> Tuple[SubspaceBasis, int]:
    """Canonical RREF basis of the row space together with the rank."""
    vectors = [matrix.row(r) for r in range(matrix.nrows)]
    basis = SubspaceBasis.from_vectors(vectors, matrix.ncols, matrix.field)
    return basis, basis.dim


def rank(matrix: SparseMatrix) -> int:
    return rref(matrix)[1]


def kernel(matrix: SparseMatrix) -> SubspaceBasis:
    """Right null space {x : M x = 0} as a canonical RREF basis."""
    field = matrix.field
    n = matrix.ncols
    if field.char and _dense_worthwhile(matrix.nrows, n):
        dense = _matrix_to_dense(matrix, field.p)
        reduced, pivots = dense_rref_mod(dense, field.p)
        kern = _dense_kernel_from_rref(reduced, pivots, n, field.p)
        reduced_k, pivots_k = dense_rref_mod(kern, field.p)
        return SubspaceBasis(n, field, _dense_to_rows(reduced_k), pivots_k)
    row_basis, _ = rref(matrix)
    return _kernel_from_rref(row_basis, n, field)


def _kernel_from_rref(row_basis: SubspaceBasis, n: int, field: Field) -> SubspaceBasis:
    pivots = row_basis.pivots
    pivot_set = set(pivots)
    free_cols = [c for c in range(n) if c not in pivot_set]
    vectors: List[Row] = []
    for fcol in free_cols:
        vec: Row = {fcol: field.one}
        for prow, pcol in zip(row_basis.rows, pivots):
            v = prow.get(fcol)
            if v is not None:
                vec[pcol] = field.neg(v)
        vectors.append(vec)
    return SubspaceBasis.from_vectors(vectors, n, field)


def solve(matrix: SparseMatrix, rhs: Row) -> Optional[Row]:
    """One solution x of M x = b, or None when inconsistent."""
    field = matrix.field
    n = matrix.ncols
    augmented = SparseMatrix(
        matrix.nrows, n + 1,
        _augment_rows(matrix, rhs, field), field)
    basis, _ = rref(augmented)
    solution: Row = {}
    for prow, pcol in zip(basis.rows, basis.pivots):
        if pcol == n:
            return None  # pivot in the RHS column: inconsistent
        v = prow.get(n)
        if v is not None:
            solution[pcol] = v
    return solution


def _augment_rows(matrix: SparseMatrix, rhs: Row, field: Field) -> Dict[int, Row]:
    rows: Dict[int, Row] = {}
    for r in range(matrix.nrows):
        row = matrix.row(r)
        b = rhs.get(r)
        if b is not None and not field.is_zero(b):
            row[matrix.ncols] = b
        if row:
            rows[r] = row
    return rows


# ----------------------------------------------------------------------
# dense mod-p elimination (int64 numpy)
# ----------------------------------------------------------------------
def _dense_worthwhile(nrows: int, ncols: int) -> bool:
    return ncols >= _DENSE_MIN_COLS and nrows >= _DENSE_MIN_ROWS


def _matrix_to_dense(matrix: SparseMatrix, p: int) -> np.ndarray:
    dense = np.zeros((matrix.nrows, matrix.ncols), dtype=np.int64)
    for r, c, v in matrix.entries():
        dense[r, c] = v % p
    return dense


def _vectors_to_dense(vectors: Sequence[Row], ambient: int, p: int) -> np.ndarray:
    dense = np.zeros((len(vectors), ambient), dtype=np.int64)
    for i, vec in enumerate(vectors):
        for c, v in vec.items():
            dense[i, c] = v % p
    return dense


def _dense_to_rows(dense: np.ndarray) -> List[Row]:
    rows: List[Row] = []
    for i in range(dense.shape[0]):
        nz = np.nonzero(dense[i])[0]
        rows.append({int(c): int(dense[i, c]) for c in nz})
    return rows


def dense_rref_mod(a: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Gauss-Jordan elimination mod p on an int64 array.

    Returns the nonzero rows of the RREF and the pivot columns.  Entries
    stay in [0, p); p is capped so c*x - y cannot overflow int64.
    """
    a = np.mod(a, p)
    m, n = a.shape
    pivots: List[int] = []
    pr = 0
    for col in range(n):
        if pr == m:
            break
        nz = np.nonzero(a[pr:, col])[0]
        if nz.size == 0:
            continue
        r = pr + int(nz[0])
        if r != pr:
            a[[pr, r]] = a[[r, pr]]
        inv = pow(int(a[pr, col]), -1, p)
        a[pr] = a[pr] * inv % p
        other = np.nonzero(a[:, col])[0]
        other = other[other != pr]
        if other.size:
            a[other] = (a[other] - np.outer(a[other, col], a[pr])) % p
        pivots.append(col)
        pr += 1
    return a[:pr], pivots


def _dense_kernel_from_rref(reduced: np.ndarray, pivots: List[int],
                            n: int, p: int) -> np.ndarray:
    pivot_set = set(pivots)
    free_cols = [c for c in range(n) if c not in pivot_set]
    kern = np.zeros((len(free_cols), n), dtype=np.int64)
    for i, fcol in enumerate(free_cols):
        kern[i, fcol] = 1
        if pivots:
            kern[i, pivots] = (-reduced[:, fcol]) % p
    return kern
