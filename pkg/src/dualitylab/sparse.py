"""Sparse matrices over an exact field.

Storage is dict-of-rows with no explicit zeros; all operations are pure
and return new matrices, so values can be shared freely across threads.
Row/column indices are always 0-based; formed-space index bookkeeping
lives in :mod:`dualitylab.forms`.
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

from .fields import QQ, Field, Scalar

Row = Dict[int, Scalar]


class ShapeError(Exception):
    """Operands have incompatible shapes or fields."""


class SparseMatrix:
    __slots__ = ("nrows", "ncols", "field", "_rows")

    def __init__(self, nrows: int, ncols: int, rows: Dict[int, Row], field: Field = QQ):
        # Trusted constructor: `rows` must hold no zero values and no
        # empty row dicts.  Use the classmethods for unvetted input.
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        self._rows = rows

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------
    @classmethod
    def from_entries(cls, nrows: int, ncols: int,
                     entries: Iterable[Tuple[int, int, Scalar]],
                     field: Field = QQ) -> "SparseMatrix":
        rows: Dict[int, Row] = {}
        for r, c, v in entries:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise ShapeError(f"entry ({r},{c}) outside {nrows}x{ncols}")
            v = field.convert(v)
            row = rows.setdefault(r, {})
            v = field.add(row.get(c, field.zero), v)
            if field.is_zero(v):
                row.pop(c, None)
            else:
                row[c] = v
        return cls(nrows, ncols, {r: d for r, d in rows.items() if d}, field)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[Scalar]], field: Field = QQ) -> "SparseMatrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        entries = [(r, c, v) for r, rowdata in enumerate(data)
                   for c, v in enumerate(rowdata) if v]
        return cls.from_entries(nrows, ncols, entries, field)

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "SparseMatrix":
        return cls(n, n, {i: {i: field.one} for i in range(n)}, field)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: Field = QQ) -> "SparseMatrix":
        return cls(nrows, ncols, {}, field)

    # ------------------------------------------------------------------
    # inspection
    # ------------------------------------------------------------------
    def entry(self, r: int, c: int) -> Scalar:
        return self._rows.get(r, {}).get(c, self.field.zero)

    def row(self, r: int) -> Row:
        return dict(self._rows.get(r, {}))

    def entries(self) -> Iterator[Tuple[int, int, Scalar]]:
        for r in sorted(self._rows):
            row = self._rows[r]
            for c in sorted(row):
                yield r, c, row[c]

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self._rows.values())

    def is_zero(self) -> bool:
        return not self._rows

    def density(self) -> float:
        total = self.nrows * self.ncols
        return self.nnz / total if total else 0.0

    def __eq__(self, other) -> bool:
        return (isinstance(other, SparseMatrix)
                and self.nrows == other.nrows and self.ncols == other.ncols
                and self.field == other.field and self._rows == other._rows)

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz}, {self.field!r})"

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------
    def _check_same(self, other: "SparseMatrix"):
        if self.field != other.field:
            raise ShapeError(f"field mismatch: {self.field!r} vs {other.field!r}")

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_same(other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ShapeError("addition shape mismatch")
        f = self.field
        rows: Dict[int, Row] = {r: dict(row) for r, row in self._rows.items()}
        for r, orow in other._rows.items():
            row = rows.setdefault(r, {})
            for c, v in orow.items():
                s = f.add(row.get(c, f.zero), v)
                if f.is_zero(s):
                    row.pop(c, None)
                else:
                    row[c] = s
            if not row:
                del rows[r]
        return SparseMatrix(self.nrows, self.ncols, rows, f)

    def __neg__(self) -> "SparseMatrix":
        f = self.field
        rows = {r: {c: f.neg(v) for c, v in row.items()}
                for r, row in self._rows.items()}
        return SparseMatrix(self.nrows, self.ncols, rows, f)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scale(self, a: Scalar) -> "SparseMatrix":
        f = self.field
        a = f.convert(a)
        if f.is_zero(a):
            return SparseMatrix.zeros(self.nrows, self.ncols, f)
        rows = {r: {c: f.mul(a, v) for c, v in row.items()}
                for r, row in self._rows.items()}
        return SparseMatrix(self.nrows, self.ncols, rows, f)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_same(other)
        if self.ncols != other.nrows:
            raise ShapeError(f"matmul shape mismatch {self.ncols} vs {other.nrows}")
        f = self.field
        rows: Dict[int, Row] = {}
        orows = other._rows
        for r, row in self._rows.items():
            acc: Row = {}
            for k, a in row.items():
                brow = orows.get(k)
                if not brow:
                    continue
                for c, b in brow.items():
                    s = f.add(acc.get(c, f.zero), f.mul(a, b))
                    if f.is_zero(s):
                        acc.pop(c, None)
                    else:
                        acc[c] = s
            if acc:
                rows[r] = acc
        return SparseMatrix(self.nrows, other.ncols, rows, f)

    def pow_int(self, m: int) -> "SparseMatrix":
        if self.nrows != self.ncols:
            raise ShapeError("power of a non-square matrix")
        if m < 0:
            raise ValueError("negative matrix power")
        result = SparseMatrix.identity(self.nrows, self.field)
        base = self
        while m:
            if m & 1:
                result = result @ base
            base = base @ base if m > 1 else base
            m >>= 1
        return result

    def transpose(self) -> "SparseMatrix":
        rows: Dict[int, Row] = {}
        for r, row in self._rows.items():
            for c, v in row.items():
                rows.setdefault(c, {})[r] = v
        return SparseMatrix(self.ncols, self.nrows, rows, self.field)

    def trace(self) -> Scalar:
        f = self.field
        t = f.zero
        for r, row in self._rows.items():
            if r in row:
                t = f.add(t, row[r])
        return t

    def trace_product(self, other: "SparseMatrix") -> Scalar:
        """Trace(self @ other) without materialising the product."""
        self._check_same(other)
        if self.ncols != other.nrows or self.nrows != other.ncols:
            raise ShapeError("trace_product shape mismatch")
        f = self.field
        t = f.zero
        for i, row in self._rows.items():
            for k, a in row.items():
                b = other._rows.get(k, {}).get(i)
                if b is not None:
                    t = f.add(t, f.mul(a, b))
        return t

    def commutator(self, other: "SparseMatrix") -> "SparseMatrix":
        return self @ other - other @ self

    def commutes_with(self, other: "SparseMatrix") -> bool:
        return self.commutator(other).is_zero()

    # ------------------------------------------------------------------
    # structure
    # ------------------------------------------------------------------
    def kron(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_same(other)
        f = self.field
        rows: Dict[int, Row] = {}
        on, om = other.nrows, other.ncols
        for r1, row1 in self._rows.items():
            for r2, row2 in other._rows.items():
                target = rows.setdefault(r1 * on + r2, {})
                for c1, v1 in row1.items():
                    for c2, v2 in row2.items():
                        target[c1 * om + c2] = f.mul(v1, v2)
        return SparseMatrix(self.nrows * on, self.ncols * om, rows, f)

    def apply(self, vec: Row) -> Row:
        """Matrix-vector product; vectors are sparse dicts."""
        f = self.field
        out: Row = {}
        for r, row in self._rows.items():
            s = f.zero
            hit = False
            for c, a in row.items():
                x = vec.get(c)
                if x is not None:
                    s = f.add(s, f.mul(a, x))
                    hit = True
            if hit and not f.is_zero(s):
                out[r] = s
        return out

    def flatten(self) -> Row:
        """Row-major flattening to a sparse vector of length nrows*ncols."""
        out: Row = {}
        n = self.ncols
        for r, row in self._rows.items():
            base = r * n
            for c, v in row.items():
                out[base + c] = v
        return out

    @classmethod
    def unflatten(cls, vec: Row, nrows: int, ncols: int, field: Field = QQ) -> "SparseMatrix":
        rows: Dict[int, Row] = {}
        for idx, v in vec.items():
            rows.setdefault(idx // ncols, {})[idx % ncols] = v
        return cls(nrows, ncols, rows, field)

    def change_field(self, field: Field) -> "SparseMatrix":
        if field == self.field:
            return self
        rows: Dict[int, Row] = {}
        for r, row in self._rows.items():
            new: Row = {}
            for c, v in row.items():
                w = field.convert(v)
                if not field.is_zero(w):
                    new[c] = w
            if new:
                rows[r] = new
        return SparseMatrix(self.nrows, self.ncols, rows, field)

    def column(self, c: int) -> Row:
        out: Row = {}
        for r, row in self._rows.items():
            v = row.get(c)
            if v is not None:
                out[r] = v
        return out

    def submatrix_rows(self, row_indices: Sequence[int]) -> "SparseMatrix":
        rows: Dict[int, Row] = {}
        for new_r, old_r in enumerate(row_indices):
            row = self._rows.get(old_r)
            if row:
                rows[new_r] = dict(row)
        return SparseMatrix(len(row_indices), self.ncols, rows, self.field)


# ----------------------------------------------------------------------
# sparse vector helpers (dict-backed, shared with the elimination code)
# ----------------------------------------------------------------------
def vec_add_scaled(target: Row, source: Row, coeff: Scalar, field: Field) -> None:
    """In-place target += coeff * source."""
    if field.is_zero(coeff):
        return
    for c, v in source.items():
        s = field.add(target.get(c, field.zero), field.mul(coeff, v))
        if field.is_zero(s):
            target.pop(c, None)
        else:
            target[c] = s


def vec_scale(vec: Row, coeff: Scalar, field: Field) -> Row:
    if field.is_zero(coeff):
        return {}
    return {c: field.mul(coeff, v) for c, v in vec.items()}


def vec_dot(a: Row, b: Row, field: Field) -> Scalar:
    if len(a) > len(b):
        a, b = b, a
    s = field.zero
    for c, v in a.items():
        w = b.get(c)
        if w is not None:
            s = field.add(s, field.mul(v, w))
    return s


def vec_convert(vec: Row, field: Field) -> Row:
    out: Row = {}
    for c, v in vec.items():
        w = field.convert(v)
        if not field.is_zero(w):
            out[c] = w
    return out


def stack_matrices(mats: Sequence[SparseMatrix]) -> SparseMatrix:
    """Vertically stack matrices with equal column counts."""
    if not mats:
        raise ShapeError("nothing to stack")
    ncols = mats[0].ncols
    field = mats[0].field
    rows: Dict[int, Row] = {}
    offset = 0
    for m in mats:
        if m.ncols != ncols or m.field != field:
            raise ShapeError("stack mismatch")
        for r, row in m._rows.items():
            rows[offset + r] = dict(row)
        offset += m.nrows
    return SparseMatrix(offset, ncols, rows, field)
