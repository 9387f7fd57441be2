"""Formed vector spaces and the classical matrix Lie algebras on them.

A formed space is V = F^n with a fixed nondegenerate bilinear form:
symmetric for the orthogonal families, antisymmetric for the symplectic
one, absent for the general-linear family (kept for cross-checks).
Coordinates are indexed by a signed index set I, ascending:

    so-odd : I = {-r, ..., -1, 0, 1, ..., r},  n = 2r + 1
    so-even: I = {-r, ..., -1, 1, ..., r},     n = 2r
    sp     : I = {-r, ..., -1, 1, ..., r},     n = 2r
    gl     : I = {1, ..., r},                  n = r

The form is pinned to <v_i, v_j> = delta_{i,-j} for the orthogonal
families and <v_i, v_j> = sgn(i) delta_{i,-j} for the symplectic one.
With this choice the basis elements F_{i,j} = E_{i,j} - theta_{i,j}
E_{-j,-i} (theta = 1 orthogonal, sgn(i)sgn(j) symplectic) satisfy
iota(F) = -F on the nose, where iota is the form adjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .fields import QQ, Field, Scalar
from .rref import InsertionBasis
from .sparse import Row, SparseMatrix

FAMILIES = ("so-odd", "so-even", "sp", "gl")
FORMED_FAMILIES = ("so-odd", "so-even", "sp")


class UnsupportedFamilyError(Exception):
    """Operation requires a bilinear form the family does not carry."""


def _sgn(i: int) -> int:
    return 1 if i > 0 else -1


@dataclass(frozen=True)
class FormedSpace:
    family: str
    r: int
    n: int
    indices: Tuple[int, ...]          # ascending signed index set I
    _pos: Dict[int, int] = dataclass_field(repr=False, default_factory=dict)

    @property
    def has_form(self) -> bool:
        return self.family != "gl"

    def pos(self, i: int) -> int:
        return self._pos[i]

    def index_at(self, position: int) -> int:
        return self.indices[position]

    def sgn(self, i: int) -> int:
        if i == 0:
            raise ValueError("sgn(0) undefined")
        return _sgn(i)

    # -- the bilinear form -------------------------------------------------
    def form_value(self, i: int, j: int) -> Fraction:
        """<v_i, v_j> for basis vectors."""
        if not self.has_form:
            raise UnsupportedFamilyError("gl spaces carry no bilinear form")
        if i != -j:
            return Fraction(0)
        if self.family == "sp":
            return Fraction(_sgn(i))
        return Fraction(1)

    def gram(self, fld: Field = QQ) -> SparseMatrix:
        if not self.has_form:
            raise UnsupportedFamilyError("gl spaces carry no bilinear form")
        entries = []
        for i in self.indices:
            j = -i
            if j in self._pos:
                entries.append((self.pos(i), self.pos(j), self.form_value(i, j)))
        return SparseMatrix.from_entries(self.n, self.n, entries, fld)

    def bilinear(self, u: Row, w: Row) -> Scalar:
        """<u, w> on coordinate vectors keyed by position."""
        if not self.has_form:
            raise UnsupportedFamilyError("gl spaces carry no bilinear form")
        total = Fraction(0)
        for pu, a in u.items():
            i = self.index_at(pu)
            pw = self._pos.get(-i)
            if pw is None:
                continue
            b = w.get(pw)
            if b is not None:
                total += a * self.form_value(i, -i) * b
        return total

    def dual_vector(self, p: int, fld: Field = QQ) -> Row:
        """v^p with <v_q, v^p> = delta_{qp}."""
        if not self.has_form:
            raise UnsupportedFamilyError("gl spaces carry no dual basis")
        coeff = fld.convert(_sgn(p)) if self.family == "sp" and p != 0 else fld.one
        return {self.pos(-p): coeff}

    def basis_vector(self, i: int, fld: Field = QQ) -> Row:
        return {self.pos(i): fld.one}

    # -- elementary matrices -------------------------------------------------
    def E(self, i: int, j: int, fld: Field = QQ) -> SparseMatrix:
        return SparseMatrix.from_entries(
            self.n, self.n, [(self.pos(i), self.pos(j), 1)], fld)

    def theta_sign(self, i: int, j: int) -> int:
        if self.family == "sp":
            return _sgn(i) * _sgn(j)
        return 1

    def F(self, i: int, j: int, fld: Field = QQ) -> SparseMatrix:
        """F_{i,j} = E_{i,j} - theta_{i,j} E_{-j,-i}."""
        entries = [(self.pos(i), self.pos(j), 1),
                   (self.pos(-j), self.pos(-i), -self.theta_sign(i, j))]
        return SparseMatrix.from_entries(self.n, self.n, entries, fld)


def build_space(family: str, r: int) -> FormedSpace:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if r < 1:
        raise ValueError("rank must be at least 1")
    if family == "so-odd":
        indices = tuple(range(-r, r + 1))
    elif family in ("so-even", "sp"):
        indices = tuple(i for i in range(-r, r + 1) if i != 0)
    else:
        indices = tuple(range(1, r + 1))
    pos = {i: k for k, i in enumerate(indices)}
    return FormedSpace(family, r, len(indices), indices, pos)


# ----------------------------------------------------------------------
# the form adjoint (anti-involution iota)
# ----------------------------------------------------------------------
def iota(space: FormedSpace, X: SparseMatrix) -> SparseMatrix:
    """Form adjoint: <X v, u> = <v, iota(X) u> for all u, v.

    The fixed antidiagonal form makes this an index flip:
    orthogonal families iota(X)_{i,j} = X_{-j,-i}; symplectic
    iota(X)_{i,j} = sgn(i) sgn(j) X_{-j,-i}.
    """
    if not space.has_form:
        raise UnsupportedFamilyError("iota needs a bilinear form (not gl)")
    if X.nrows != space.n or X.ncols != space.n:
        raise ValueError("matrix size does not match the space")
    fld = X.field
    entries = []
    symplectic = space.family == "sp"
    for rpos, cpos, v in X.entries():
        a = space.index_at(rpos)   # X_{a,b}
        b = space.index_at(cpos)
        # contributes to iota(X)_{-b,-a}
        if symplectic:
            s = _sgn(-b) * _sgn(-a)
            v = fld.mul(fld.convert(s), v)
        entries.append((space.pos(-b), space.pos(-a), v))
    return SparseMatrix.from_entries(space.n, space.n, entries, fld)


def theta_op(space: FormedSpace, u: Row, w: Row, fld: Field = QQ) -> SparseMatrix:
    """Rank-one operator v |-> <w, v> u."""
    if not space.has_form:
        raise UnsupportedFamilyError("theta needs a bilinear form (not gl)")
    entries = []
    for pw, b in w.items():
        k = space.index_at(pw)
        jpos = space._pos.get(-k)
        if jpos is None:
            continue
        weight = fld.mul(fld.convert(space.form_value(k, -k)), b)
        for pu, a in u.items():
            entries.append((pu, jpos, fld.mul(a, weight)))
    return SparseMatrix.from_entries(space.n, space.n, entries, fld)


def trace_rank_one_product(space: FormedSpace,
                           pairs: Sequence[Tuple[Row, Row]]) -> Fraction:
    """Trace of theta(u_1 (x) w_1) ... theta(u_k (x) w_k), evaluated as
    the cyclic product of pairings prod_i <w_i, u_{i+1}>."""
    if not pairs:
        raise ValueError("need at least one (u, w) pair")
    total = Fraction(1)
    k = len(pairs)
    for idx in range(k):
        _, w = pairs[idx]
        u_next, _ = pairs[(idx + 1) % k]
        total *= space.bilinear(w, u_next)
    return total


# ----------------------------------------------------------------------
# Lie algebra bases
# ----------------------------------------------------------------------
class LieBasis:
    """Ordered basis of the classical Lie algebra of a formed space.

    Element order is deterministic: Cartan elements F_{i,i} first, then
    the off-diagonal quadruples F_{+-i,+-j} for i < j, then the family
    extras (row-zero elements for so-odd, F_{+-i,-+i} for sp).  gl
    spaces get the full E_{i,j} basis in lexicographic order.
    """

    def __init__(self, space: FormedSpace, labels: List[Tuple[int, int]],
                 elements: List[SparseMatrix]):
        self.space = space
        self.labels = labels
        self.elements = elements
        self._coords = InsertionBasis(space.n * space.n, QQ)
        for el in elements:
            grew = self._coords.insert(el.flatten())
            if not grew:
                raise ValueError("basis elements are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.elements)

    def coordinates(self, X: SparseMatrix) -> Optional[List[Scalar]]:
        """Coefficients of X on the ordered basis, or None if X is outside.

        The insertion basis stores the RREF of the element rows; member
        coefficients on the original elements are recovered by a short
        triangular solve against that RREF.
        """
        coords_rref = self._coords.coordinates(X.flatten())
        if coords_rref is None:
            return None
        # The RREF rows are invertible combinations of the elements; solve
        # back through the recorded insert history.
        return self._solve_history(coords_rref)

    def _solve_history(self, coords_rref: List[Scalar]) -> List[Scalar]:
        # Lazily build the change-of-basis matrix (RREF row -> elements).
        if not hasattr(self, "_rref_to_elements"):
            from .rref import SubspaceBasis  # local import to avoid cycle
            elem_rows = [el.flatten() for el in self.elements]
            m = len(elem_rows)
            # Augment each element row with an identity tag, reduce; the
            # tags of the RREF rows express them over the elements.
            width = self.space.n * self.space.n
            builder = InsertionBasis(width + m, QQ)
            for k, row in enumerate(elem_rows):
                tagged = dict(row)
                tagged[width + k] = Fraction(1)
                builder.insert(tagged)
            table: List[List[Scalar]] = []
            for row in builder.rows:
                table.append([row.get(width + k, Fraction(0)) for k in range(m)])
            self._rref_to_elements = table
        m = len(self.elements)
        out = [Fraction(0)] * m
        for c, tag_row in zip(coords_rref, self._rref_to_elements):
            if c:
                for k in range(m):
                    if tag_row[k]:
                        out[k] += c * tag_row[k]
        return out

    def contains(self, X: SparseMatrix) -> bool:
        return self._coords.contains(X.flatten())

    def span_basis(self) -> InsertionBasis:
        return self._coords

    def __iter__(self):
        return iter(zip(self.labels, self.elements))


def lie_basis(space: FormedSpace) -> LieBasis:
    labels: List[Tuple[int, int]] = []
    r = space.r
    if space.family == "gl":
        labels = [(i, j) for i in space.indices for j in space.indices]
        elements = [space.E(i, j) for i, j in labels]
        return LieBasis(space, labels, elements)
    labels.extend((i, i) for i in range(1, r + 1))
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            labels.extend([(i, j), (i, -j), (-i, j), (-i, -j)])
    if space.family == "so-odd":
        for i in range(1, r + 1):
            labels.extend([(0, i), (0, -i)])
    elif space.family == "sp":
        for i in range(1, r + 1):
            labels.extend([(i, -i), (-i, i)])
    elements = [space.F(i, j) for i, j in labels]
    return LieBasis(space, labels, elements)


def expected_lie_dim(space: FormedSpace) -> int:
    n, r = space.n, space.r
    if space.family == "gl":
        return n * n
    if space.family == "sp":
        return r * (2 * r + 1)
    return n * (n - 1) // 2
