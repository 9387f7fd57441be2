"""Algebra closures, commutants, invariant vectors and trace pairings.

Everything here reduces questions about generated algebras to canonical
row-echelon bases of subspaces of the flattened matrix space, so that
claimed equalities of algebras become decidable comparisons.

Two backends cooperate:

* rational: authoritative, exact, used for closures (cheap: candidates
  are reduced against a growing echelon basis) and for small kernels;
* prime: fast modular elimination (numpy int64) used to bound kernel
  dimensions from above.

Rational certification of an equality "closure = kernel-cut space" is a
squeeze: the closure is rationally contained in the cut space (verified
by exact commutator checks on generators), the closure dimension is
exact, and the modular kernel dimension bounds the rational kernel
dimension from above.  When the two numbers agree the rational equality
is established outright; no probabilistic gap remains.  Modular
prefilters inside closures can only under-count; a resulting mismatch
is detected by the squeeze and handled by redrawing primes or falling
back to the pure rational path.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .fields import GF, QQ, Field, PrimeField, ReductionError, Scalar
from .forms import FormedSpace, LieBasis, lie_basis
from .rref import InsertionBasis, SubspaceBasis, kernel, rref
from .sparse import Row, SparseMatrix, vec_add_scaled

_GF_DENSE_MIN_AMBIENT = 160


class ClosureError(Exception):
    """Closure iteration exceeded its certified dimension cap."""


class PrimeCollisionError(Exception):
    """Modular shortcut disagreed with the rational computation."""


# ----------------------------------------------------------------------
# echelon bases with optional numpy backing / modular prefilters
# ----------------------------------------------------------------------
class _GFDenseBasis:
    """RREF accumulator over GF(p) on dense int64 rows."""

    def __init__(self, ambient: int, p: int):
        self.ambient = ambient
        self.p = p
        self.rows: List[np.ndarray] = []
        self.pivots: List[int] = []

    @property
    def dim(self) -> int:
        return len(self.rows)

    def _dense(self, vec: Row) -> np.ndarray:
        out = np.zeros(self.ambient, dtype=np.int64)
        for c, v in vec.items():
            out[c] = v % self.p
        return out

    def reduce_dense(self, dense: np.ndarray) -> np.ndarray:
        p = self.p
        for pivot, row in zip(self.pivots, self.rows):
            c = int(dense[pivot])
            if c:
                dense = (dense - c * row) % p
        return dense

    def insert(self, vec: Row) -> bool:
        dense = self.reduce_dense(self._dense(vec))
        nz = np.nonzero(dense)[0]
        if nz.size == 0:
            return False
        pivot = int(nz[0])
        inv = pow(int(dense[pivot]), -1, self.p)
        dense = dense * inv % self.p
        for i, row in enumerate(self.rows):
            c = int(row[pivot])
            if c:
                self.rows[i] = (row - c * dense) % self.p
        idx = 0
        while idx < len(self.pivots) and self.pivots[idx] < pivot:
            idx += 1
        self.pivots.insert(idx, pivot)
        self.rows.insert(idx, dense)
        return True

    def contains(self, vec: Row) -> bool:
        return not np.any(self.reduce_dense(self._dense(vec)))

    def freeze(self) -> SubspaceBasis:
        field = GF(self.p)
        rows: List[Row] = []
        for dense in self.rows:
            nz = np.nonzero(dense)[0]
            rows.append({int(c): int(dense[c]) for c in nz})
        return SubspaceBasis(self.ambient, field, rows, list(self.pivots))


def _make_builder(ambient: int, field: Field):
    if field.char and ambient >= _GF_DENSE_MIN_AMBIENT:
        return _GFDenseBasis(ambient, field.p)
    return InsertionBasis(ambient, field)


class _PrefilteredRationalBasis:
    """Rational RREF basis with modular shadows screening out members.

    A candidate judged zero by every shadow is presumed to be a member
    and skipped without rational work; genuinely new candidates (nonzero
    mod some prime, hence nonzero over Q) are inserted rationally.  A
    false skip can only deflate the dimension, which downstream
    certification detects.
    """

    def __init__(self, ambient: int, primes: Sequence[int]):
        self.rational = InsertionBasis(ambient, QQ)
        self.shadows = [_GFDenseBasis(ambient, p) for p in primes]

    @property
    def dim(self) -> int:
        return self.rational.dim

    def insert(self, vec: Row) -> bool:
        try:
            shadow_views = [
                {c: GF(sh.p).convert(v) for c, v in vec.items()}
                for sh in self.shadows]
        except ReductionError as exc:
            raise PrimeCollisionError(str(exc)) from exc
        new_somewhere = False
        for sh, view in zip(self.shadows, shadow_views):
            if not sh.contains(view):
                new_somewhere = True
                break
        if not new_somewhere:
            return False
        grew = self.rational.insert(vec)
        if grew:
            for sh, view in zip(self.shadows, shadow_views):
                sh.insert(view)
        return grew

    def freeze(self) -> SubspaceBasis:
        return self.rational.freeze()


# ----------------------------------------------------------------------
# operator algebras
# ----------------------------------------------------------------------
@dataclass
class OperatorAlgebra:
    """A subalgebra of End(V^(x)d) carried as a canonical RREF basis."""

    space: FormedSpace
    d: int
    basis: SubspaceBasis
    generator_recipes: List[str]
    closed: bool

    @property
    def ambient_matrix_dim(self) -> int:
        return self.space.n ** self.d

    @property
    def dim(self) -> int:
        return self.basis.dim

    def matrices(self) -> List[SparseMatrix]:
        N = self.ambient_matrix_dim
        return [SparseMatrix.unflatten(row, N, N, self.basis.field)
                for row in self.basis.rows]

    def contains_matrix(self, m: SparseMatrix) -> bool:
        return self.basis.contains(m.flatten())

    def contains_algebra(self, other: "OperatorAlgebra") -> bool:
        return self.basis.contains_subspace(other.basis)

    def verify_closed(self, limit: Optional[int] = None) -> bool:
        """Recheck closure under products on basis representatives."""
        mats = self.matrices()
        count = 0
        for a in mats:
            for b in mats:
                if limit is not None and count >= limit:
                    return True
                if not self.basis.contains((a @ b).flatten()):
                    return False
                count += 1
        return True


def _sorted_by_recipe(generators) -> List:
    return sorted(generators, key=lambda g: g.recipe)


def span_closure(space: FormedSpace, d: int, generators,
                 field: Field = QQ,
                 prefilter_primes: Optional[Sequence[int]] = None,
                 ) -> OperatorAlgebra:
    """Smallest unital subalgebra of End(V^(x)d) containing the generators.

    BFS fixed point: every accepted element is multiplied on the right
    by every generator exactly once; the span of words is closed under
    those products iff it is the full generated algebra.  Terminates in
    at most n^(2d) growth steps (the ambient dimension).
    """
    N = space.n ** d
    ambient = N * N
    gens = _sorted_by_recipe(list(generators))
    gen_matrices = [g.matrix.change_field(field) for g in gens]
    for g in gen_matrices:
        if g.nrows != N:
            raise ClosureError("generator has wrong ambient dimension")
    if field.char == 0 and prefilter_primes:
        builder = _PrefilteredRationalBasis(ambient, prefilter_primes)
    else:
        builder = _make_builder(ambient, field)

    identity = SparseMatrix.identity(N, field)
    worklist: List[SparseMatrix] = []
    for mat in [identity] + gen_matrices:
        if builder.insert(mat.flatten()):
            worklist.append(mat)
    rounds = 0
    while worklist:
        rounds += 1
        if rounds > ambient + 1:
            raise ClosureError("closure failed to stabilize below the dimension cap")
        next_work: List[SparseMatrix] = []
        for mat in worklist:
            for g in gen_matrices:
                candidate = mat @ g
                if builder.insert(candidate.flatten()):
                    next_work.append(candidate)
        worklist = next_work
    return OperatorAlgebra(space, d, builder.freeze(),
                           [g.recipe for g in gens], True)


# ----------------------------------------------------------------------
# commutants
# ----------------------------------------------------------------------
def sylvester_matrix(g: SparseMatrix) -> SparseMatrix:
    """Matrix of T |-> gT - Tg on row-major flattened T."""
    ident = SparseMatrix.identity(g.nrows, g.field)
    return g.kron(ident) - ident.kron(g.transpose())


def _as_matrices(space: FormedSpace, d: int, generators, field: Field
                 ) -> List[SparseMatrix]:
    N = space.n ** d
    out = []
    for g in generators:
        mat = g.matrix if hasattr(g, "matrix") else g
        if mat.nrows != N or mat.ncols != N:
            raise ClosureError("commutant generator has wrong dimension")
        out.append(mat.change_field(field))
    return out


def commutant(space: FormedSpace, d: int, generators,
              field: Field = QQ) -> OperatorAlgebra:
    """{T : [T, g] = 0 for all generators g}, a closed unital algebra.

    Computed as the kernel of the stacked Sylvester maps, intersected
    one generator at a time so only the first solve runs at full size.
    """
    N = space.n ** d
    ambient = N * N
    mats = _as_matrices(space, d, generators, field)
    recipes = [getattr(g, "recipe", "matrix") for g in generators]
    order = sorted(range(len(mats)), key=lambda k: recipes[k])
    current: Optional[SubspaceBasis] = None
    for k in order:
        g = mats[k]
        if g.is_zero():
            continue
        if current is None:
            current = kernel(sylvester_matrix(g))
            continue
        if current.dim == 0:
            break
        current = _restrict_to_commuting(current, g, N, field)
    if current is None:
        current = SubspaceBasis.full(ambient, field)
    return OperatorAlgebra(space, d, current,
                           [recipes[k] for k in order], True)


def _restrict_to_commuting(current: SubspaceBasis, g: SparseMatrix,
                           N: int, field: Field) -> SubspaceBasis:
    """Cut a subspace of flattened matrices down to those commuting with g."""
    images: List[Row] = []
    for row in current.rows:
        T = SparseMatrix.unflatten(row, N, N, field)
        images.append((g @ T - T @ g).flatten())
    support = sorted(set().union(*images) if images else set())
    index = {pos: i for i, pos in enumerate(support)}
    k = current.dim
    entries = []
    for col, img in enumerate(images):
        for pos, v in img.items():
            entries.append((index[pos], col, v))
    constraint = SparseMatrix.from_entries(len(support), k, entries, field)
    coeff_kernel = kernel(constraint)
    vectors: List[Row] = []
    for coeffs in coeff_kernel.rows:
        vec: Row = {}
        for i, c in coeffs.items():
            vec_add_scaled(vec, current.rows[i], c, field)
        vectors.append(vec)
    return SubspaceBasis.from_vectors(vectors, N * N, field)


def full_matrix_algebra(space: FormedSpace, d: int, field: Field = QQ) -> OperatorAlgebra:
    N = space.n ** d
    return OperatorAlgebra(space, d, SubspaceBasis.full(N * N, field), [], True)


# ----------------------------------------------------------------------
# invariant vectors
# ----------------------------------------------------------------------
def reflection_matrix(space: FormedSpace) -> SparseMatrix:
    """A determinant -1 isometry: -id in odd dimension, else the swap of
    the first hyperbolic pair of coordinates."""
    if space.family == "so-odd":
        return SparseMatrix.identity(space.n).scale(-1)
    if space.family != "so-even":
        raise ValueError("reflection filter applies to orthogonal families")
    entries = []
    for i in space.indices:
        if i == 1:
            entries.append((space.pos(1), space.pos(-1), 1))
        elif i == -1:
            entries.append((space.pos(-1), space.pos(1), 1))
        else:
            entries.append((space.pos(i), space.pos(i), 1))
    return SparseMatrix.from_entries(space.n, space.n, entries)


def invariant_vectors(space: FormedSpace, d: int,
                      generators: Optional[Sequence[SparseMatrix]] = None,
                      orthogonal_filter: bool = False,
                      field: Field = QQ) -> SubspaceBasis:
    """Joint kernel of the derivation actions of the Lie algebra on
    V^(x)d; optionally intersected with the fixed space of the
    reflection acting diagonally (orthogonal-group invariants)."""
    from .tensorops import derivation_action, position_op

    N = space.n ** d
    if generators is None:
        basis = lie_basis(space)
        generators = [derivation_action(space, d, X).matrix.change_field(field)
                      for _, X in basis]
    current: Optional[SubspaceBasis] = None
    for g in generators:
        g = g.change_field(field)
        if g.is_zero():
            continue
        if current is None:
            current = kernel(g)
        else:
            if current.dim == 0:
                break
            current = _restrict_to_kernel(current, g, field)
    if current is None:
        current = SubspaceBasis.full(N, field)
    if orthogonal_filter:
        refl = reflection_matrix(space)
        big = refl
        for _ in range(d - 1):
            big = big.kron(refl)
        fixer = (big - SparseMatrix.identity(N)).change_field(field)
        if current.dim:
            current = _restrict_to_kernel(current, fixer, field)
    return current


def _restrict_to_kernel(current: SubspaceBasis, g: SparseMatrix,
                        field: Field) -> SubspaceBasis:
    images = []
    for row in current.rows:
        images.append(g.apply(row))
    support = sorted(set().union(*images) if images else set())
    index = {pos: i for i, pos in enumerate(support)}
    entries = []
    for col, img in enumerate(images):
        for pos, v in img.items():
            entries.append((index[pos], col, v))
    constraint = SparseMatrix.from_entries(len(support), current.dim, entries, field)
    coeff_kernel = kernel(constraint)
    vectors: List[Row] = []
    for coeffs in coeff_kernel.rows:
        vec: Row = {}
        for i, c in coeffs.items():
            vec_add_scaled(vec, current.rows[i], c, field)
        vectors.append(vec)
    return SubspaceBasis.from_vectors(vectors, current.ambient, field)


# ----------------------------------------------------------------------
# trace pairing and trace monomials
# ----------------------------------------------------------------------
def trace_pairing_J(b, X_list: Sequence[SparseMatrix]) -> Scalar:
    """Trace(b o (X_1 (x) ... (x) X_d)), exactly."""
    mat = b.matrix if hasattr(b, "matrix") else b
    tensor = X_list[0]
    for X in X_list[1:]:
        tensor = tensor.kron(X)
    return mat.trace_product(tensor)


def trace_monomial(space: FormedSpace, word: Sequence[Tuple[int, bool]],
                   X_list: Sequence[SparseMatrix]) -> Scalar:
    """Trace(U_{i_1} ... U_{i_k}) with U = X or its form adjoint where starred."""
    from .forms import iota

    if not space.has_form:
        raise ValueError("trace monomials with adjoints need a formed family")
    if not word:
        raise ValueError("empty monomial")
    product: Optional[SparseMatrix] = None
    for index, starred in word:
        X = X_list[index - 1]
        U = iota(space, X) if starred else X
        product = U if product is None else product @ U
    return product.trace()


# ----------------------------------------------------------------------
# certification
# ----------------------------------------------------------------------
@dataclass
class EqualityCertificate:
    """Outcome of comparing a rational closure with a kernel-cut space."""

    equal: bool
    method: str
    lower_dim: int
    upper_dims: Dict[int, int]
    rational_certified: bool
    detail: str = ""

    @property
    def prime_consistent(self) -> bool:
        return len(set(self.upper_dims.values())) <= 1


def modular_commutant_dims(space: FormedSpace, d: int, generators,
                           primes: Sequence[int]) -> Dict[int, int]:
    dims: Dict[int, int] = {}
    for p in primes:
        dims[p] = commutant(space, d, generators, field=GF(p)).dim
    return dims


def certify_closure_equals_commutant(closure: OperatorAlgebra,
                                     constraint_gens: Sequence[SparseMatrix],
                                     primes: Sequence[int],
                                     direct_rational_max_ambient: int = 0,
                                     ) -> EqualityCertificate:
    """Rational certification of closure = commutant(constraints).

    Containment: every closure basis matrix commutes with every
    constraint generator, checked exactly over the rationals.  Dimension
    squeeze: the modular commutant dimension bounds the rational one
    from above; agreement with the exact closure dimension forces
    equality over the rationals.  Optionally also recomputes the
    commutant rationally outright when the ambient is small enough.
    """
    if closure.basis.field.char != 0:
        raise ValueError("certification needs a rational closure")
    space, d = closure.space, closure.d
    for T in closure.matrices():
        for g in constraint_gens:
            if not (g @ T - T @ g).is_zero():
                return EqualityCertificate(
                    False, "containment", closure.dim, {}, False,
                    "a closure element fails to commute with a constraint")
    upper = modular_commutant_dims(space, d, list(constraint_gens), primes)
    squeeze_ok = all(v == closure.dim for v in upper.values())
    detail = ""
    rational_certified = squeeze_ok
    method = "containment+modular-dim"
    if direct_rational_max_ambient and closure.ambient_matrix_dim ** 2 <= direct_rational_max_ambient:
        direct = commutant(space, d, list(constraint_gens), field=QQ)
        method = "containment+modular-dim+direct-rational"
        if direct.basis != closure.basis:
            return EqualityCertificate(
                False, method, closure.dim, upper, False,
                f"direct rational commutant has dim {direct.dim}")
        rational_certified = True
        detail = "direct rational commutant equals closure basis"
        if not squeeze_ok:
            raise PrimeCollisionError(
                f"modular dims {upper} disagree with certified rational dim "
                f"{closure.dim}")
    if not squeeze_ok and not rational_certified:
        return EqualityCertificate(False, method, closure.dim, upper, False,
                                   f"dimension mismatch: {upper}")
    return EqualityCertificate(True, method, closure.dim, upper,
                               rational_certified, detail)


def thread_count() -> int:
    """Worker count for scenario-level parallelism (env override)."""
    value = os.environ.get("DUALITYLAB_THREADS", "")
    try:
        return max(1, int(value))
    except ValueError:
        return min(4, os.cpu_count() or 1)
