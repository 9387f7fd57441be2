"""Endomorphisms of the d-th tensor power of a formed space.

Basis order of V^(x)d is fixed once and for all: pure tensors
v_{i_1} (x) ... (x) v_{i_d} are enumerated lexicographically over the
ascending signed index set, first slot most significant, so the code of
a tuple is sum_k pos(i_k) * n^(d-k).  Operator dumps record this order
in their header, making matrices diffable across runs.

Operators carry a `recipe` string naming their construction; closures
sort generators by recipe, which keeps iteration order reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .fields import QQ, Field, Scalar
from .forms import FormedSpace, LieBasis, UnsupportedFamilyError, lie_basis
from .rref import InsertionBasis, solve
from .sparse import Row, SparseMatrix


class SlotError(Exception):
    """Tensor slot index out of range or repeated where distinct required."""


class DegenerateFormError(Exception):
    """The requested invariant pairing is degenerate on this algebra."""


@dataclass(frozen=True)
class TensorOperator:
    space: FormedSpace
    d: int
    matrix: SparseMatrix
    recipe: str

    @property
    def dim(self) -> int:
        return self.matrix.nrows

    def __matmul__(self, other: "TensorOperator") -> "TensorOperator":
        self._check(other)
        return TensorOperator(self.space, self.d, self.matrix @ other.matrix,
                              f"({self.recipe})*({other.recipe})")

    def __add__(self, other: "TensorOperator") -> "TensorOperator":
        self._check(other)
        return TensorOperator(self.space, self.d, self.matrix + other.matrix,
                              f"({self.recipe})+({other.recipe})")

    def __sub__(self, other: "TensorOperator") -> "TensorOperator":
        self._check(other)
        return TensorOperator(self.space, self.d, self.matrix - other.matrix,
                              f"({self.recipe})-({other.recipe})")

    def scale(self, a: Scalar) -> "TensorOperator":
        return TensorOperator(self.space, self.d, self.matrix.scale(a),
                              f"{a}*({self.recipe})")

    def commutator(self, other: "TensorOperator") -> SparseMatrix:
        return self.matrix.commutator(other.matrix)

    def commutes_with(self, other: "TensorOperator") -> bool:
        return self.matrix.commutes_with(other.matrix)

    def _check(self, other: "TensorOperator"):
        if self.space is not other.space and self.space != other.space:
            raise SlotError("operators live on different spaces")
        if self.d != other.d:
            raise SlotError("operators have different tensor degrees")

    def __eq__(self, other) -> bool:
        return (isinstance(other, TensorOperator)
                and self.d == other.d and self.matrix == other.matrix)

    def dumps(self, normalization: Optional[str] = None) -> str:
        """Plain-text sparse triplet dump, bit-exact and diffable."""
        lines = ["# tensor-operator v1",
                 f"# n={self.space.n} d={self.d} family={self.space.family} "
                 f"index-order=ascending-signed lex-first-slot-major",
                 f"# recipe={self.recipe}"]
        if normalization is not None:
            lines.append(f"# normalization={normalization}")
        lines.append(f"{self.matrix.nrows} {self.matrix.ncols}")
        fld = self.matrix.field
        for r, c, v in self.matrix.entries():
            if fld.char == 0:
                fr = Fraction(v)
                lines.append(f"{r} {c} {fr.numerator}/{fr.denominator}")
            else:
                lines.append(f"{r} {c} {v}")
        return "\n".join(lines) + "\n"


def load_operator_dump(text: str, space: FormedSpace, d: int) -> TensorOperator:
    """Inverse of :meth:`TensorOperator.dumps` (rational dumps only)."""
    recipe = "loaded"
    entries: List[Tuple[int, int, Fraction]] = []
    shape: Optional[Tuple[int, int]] = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# recipe="):
                recipe = line[len("# recipe="):]
            continue
        fields = line.split()
        if shape is None:
            shape = (int(fields[0]), int(fields[1]))
            continue
        r, c, val = int(fields[0]), int(fields[1]), Fraction(fields[2])
        entries.append((r, c, val))
    if shape is None:
        raise ValueError("dump carries no shape line")
    return TensorOperator(
        space, d, SparseMatrix.from_entries(shape[0], shape[1], entries), recipe)


# ----------------------------------------------------------------------
# index bookkeeping
# ----------------------------------------------------------------------
def tensor_code(space: FormedSpace, indices: Sequence[int]) -> int:
    code = 0
    for i in indices:
        code = code * space.n + space.pos(i)
    return code


def tensor_tuples(space: FormedSpace, d: int) -> Iterable[Tuple[int, ...]]:
    return itertools.product(space.indices, repeat=d)


def identity_op(space: FormedSpace, d: int) -> TensorOperator:
    return TensorOperator(space, d, SparseMatrix.identity(space.n ** d), "id")


# ----------------------------------------------------------------------
# permutation operators
# ----------------------------------------------------------------------
def perm_op(space: FormedSpace, d: int, w: Sequence[int]) -> TensorOperator:
    """Place permutation: slot k of the input moves to slot w[k].

    `w` is 1-based of length d (a permutation of 1..d); the operator
    satisfies perm_op(w) perm_op(w') = perm_op(w o w').
    """
    if sorted(w) != list(range(1, d + 1)):
        raise SlotError(f"{w!r} is not a permutation of 1..{d}")
    n = space.n
    size = n ** d
    entries = []
    # destination tuple t with t[w[k]] = s[k]
    for s in itertools.product(range(n), repeat=d):
        t = [0] * d
        for k in range(d):
            t[w[k] - 1] = s[k]
        col = 0
        for p in s:
            col = col * n + p
        row = 0
        for p in t:
            row = row * n + p
        entries.append((row, col, 1))
    name = " ".join(str(x) for x in w)
    return TensorOperator(space, d, SparseMatrix.from_entries(size, size, entries),
                          f"perm({name})")


def transposition_op(space: FormedSpace, d: int, i: int, j: int) -> TensorOperator:
    _check_slots(d, i, j)
    w = list(range(1, d + 1))
    w[i - 1], w[j - 1] = j, i
    op = perm_op(space, d, w)
    return TensorOperator(space, d, op.matrix, f"s({i},{j})")


def _check_slots(d: int, i: int, j: int):
    if not (1 <= i <= d and 1 <= j <= d):
        raise SlotError(f"slots ({i},{j}) outside 1..{d}")
    if i == j:
        raise SlotError("slots must be distinct")


# ----------------------------------------------------------------------
# contraction operators
# ----------------------------------------------------------------------
def contraction_op(space: FormedSpace, d: int, i: int, j: int,
                   check_basis_independence: bool = False) -> TensorOperator:
    """Form contraction on slots i, j re-expanded along dual bases:
    u |-> <u_i, u_j> sum_p (... v_p at slot i ... v^p at slot j ...).
    """
    if not space.has_form:
        raise UnsupportedFamilyError("contractions need a bilinear form (not gl)")
    _check_slots(d, i, j)
    n = space.n
    size = n ** d
    pair_vec = _form_expansion_vector(space)
    entries = []
    for s in tensor_tuples(space, d):
        value = space.form_value(s[i - 1], s[j - 1]) if s[i - 1] == -s[j - 1] else None
        if not value:
            continue
        col = tensor_code(space, s)
        t = list(s)
        for (pi, pj), coeff in pair_vec.items():
            t[i - 1], t[j - 1] = pi, pj
            entries.append((tensor_code(space, t), col, value * coeff))
    op = TensorOperator(space, d, SparseMatrix.from_entries(size, size, entries),
                        f"gamma({i},{j})")
    if check_basis_independence:
        alt = _form_expansion_vector(space, second_basis=True)
        if alt != pair_vec:
            raise DegenerateFormError(
                "dual-basis expansion depends on the basis (form bug)")
    return op


def _form_expansion_vector(space: FormedSpace, second_basis: bool = False
                           ) -> Dict[Tuple[int, int], Fraction]:
    """sum_p v_p (x) v^p as {(index_i, index_j): coeff}.

    With `second_basis` the sum is recomputed from a deterministic
    alternative basis (unit upper-triangular change); the result is a
    basis invariant, so both computations must agree.
    """
    if not second_basis:
        out: Dict[Tuple[int, int], Fraction] = {}
        for p in space.indices:
            coeff = Fraction(space.sgn(p)) if space.family == "sp" and p != 0 else Fraction(1)
            out[(p, -p)] = coeff
        return out
    n = space.n
    shift = SparseMatrix.from_entries(
        n, n, [(k, k + 1, 1) for k in range(n - 1)])
    U = SparseMatrix.identity(n) + shift
    G = space.gram()
    # dual columns solve (U^T G) U* = I
    A = U.transpose() @ G
    out2: Dict[Tuple[int, int], Fraction] = {}
    for p in range(n):
        rhs = {p: Fraction(1)}
        dual_col = solve(A, rhs)
        if dual_col is None:
            raise DegenerateFormError("second basis has no dual (form bug)")
        u_col = U.column(p)
        for a, va in u_col.items():
            for b, vb in dual_col.items():
                key = (space.index_at(a), space.index_at(b))
                out2[key] = out2.get(key, Fraction(0)) + va * vb
    return {k: v for k, v in out2.items() if v}


# ----------------------------------------------------------------------
# one-slot operators
# ----------------------------------------------------------------------
def position_op(space: FormedSpace, d: int, k: int, X: SparseMatrix) -> TensorOperator:
    """X acting on slot k: 1 (x) ... (x) X (x) ... (x) 1."""
    if not (1 <= k <= d):
        raise SlotError(f"slot {k} outside 1..{d}")
    n = space.n
    left = SparseMatrix.identity(n ** (k - 1), X.field)
    right = SparseMatrix.identity(n ** (d - k), X.field)
    return TensorOperator(space, d, left.kron(X).kron(right), f"slot({k})")


def power_tensor_op(space: FormedSpace, d: int, X: SparseMatrix,
                    powers: Sequence[int]) -> TensorOperator:
    """X^{l_1} (x) ... (x) X^{l_d}."""
    if len(powers) != d:
        raise SlotError(f"need {d} exponents, got {len(powers)}")
    if any(l < 0 for l in powers):
        raise ValueError("exponents must be nonnegative")
    result = SparseMatrix.identity(1, X.field)
    for l in powers:
        result = result.kron(X.pow_int(l))
    name = ",".join(str(l) for l in powers)
    return TensorOperator(space, d, result, f"powers({name})")


def derivation_action(space: FormedSpace, d: int, X: SparseMatrix) -> TensorOperator:
    """Leibniz action sum_k X^{(k)} (the derivative of the diagonal action)."""
    n = space.n
    total = SparseMatrix.zeros(n ** d, n ** d, X.field)
    for k in range(1, d + 1):
        total = total + position_op(space, d, k, X).matrix
    return TensorOperator(space, d, total, "phi")


# ----------------------------------------------------------------------
# invariant pairings on the Lie algebra and split Casimir operators
# ----------------------------------------------------------------------
NORMALIZATIONS = ("trace", "killing")


def pairing_gram(space: FormedSpace, basis: LieBasis,
                 normalization: str) -> SparseMatrix:
    """Gram matrix of the chosen invariant pairing on the Lie basis.

    "trace" is half the matrix trace pairing, (X, Y) -> Tr(XY)/2 - the
    normalization under which the dual of F_{p,q} is the index flip
    F_{q,p} (halved when q = -p).  "killing" is Tr(ad_X ad_Y).
    """
    m = basis.dim
    if normalization == "trace":
        entries = []
        for a in range(m):
            for b in range(a, m):
                v = basis.elements[a].trace_product(basis.elements[b])
                if v:
                    entries.append((a, b, Fraction(v, 2)))
                    if a != b:
                        entries.append((b, a, Fraction(v, 2)))
        return SparseMatrix.from_entries(m, m, entries)
    if normalization == "killing":
        ad = _adjoint_matrices(basis)
        entries = []
        for a in range(m):
            for b in range(a, m):
                v = ad[a].trace_product(ad[b])
                if v:
                    entries.append((a, b, v))
                    if a != b:
                        entries.append((b, a, v))
        return SparseMatrix.from_entries(m, m, entries)
    raise ValueError(f"unknown normalization {normalization!r}")


def _adjoint_matrices(basis: LieBasis) -> List[SparseMatrix]:
    m = basis.dim
    mats = []
    for a in range(m):
        cols = []
        for b in range(m):
            image = basis.elements[a].commutator(basis.elements[b])
            coords = basis.coordinates(image)
            if coords is None:
                raise ValueError("bracket left the span of the basis")
            cols.append(coords)
        entries = [(i, b, cols[b][i]) for b in range(m) for i in range(m) if cols[b][i]]
        mats.append(SparseMatrix.from_entries(m, m, entries))
    return mats


def dual_basis_elements(space: FormedSpace, basis: LieBasis,
                        normalization: str) -> List[SparseMatrix]:
    """Elements g* with pairing(g_a, g*_b) = delta_ab."""
    gram = pairing_gram(space, basis, normalization)
    m = basis.dim
    duals = []
    for b in range(m):
        coeffs = solve(gram, {b: Fraction(1)})
        if coeffs is None:
            raise DegenerateFormError(
                f"{normalization} pairing is degenerate on this algebra "
                f"(family {space.family}, rank {space.r})")
        out = SparseMatrix.zeros(space.n, space.n)
        for k, c in coeffs.items():
            out = out + basis.elements[k].scale(c)
        duals.append(out)
    return duals


def casimir_pair_op(space: FormedSpace, d: int, i: int, j: int,
                    normalization: str = "trace",
                    basis: Optional[LieBasis] = None) -> TensorOperator:
    """Split Casimir sum_g g^{(i)} (g*)^{(j)} over the Lie basis."""
    if not space.has_form:
        raise UnsupportedFamilyError("split Casimir needs a formed family")
    _check_slots(d, i, j)
    basis = basis or lie_basis(space)
    duals = dual_basis_elements(space, basis, normalization)
    n = space.n
    total = SparseMatrix.zeros(n ** d, n ** d)
    for g, g_dual in zip(basis.elements, duals):
        total = total + (position_op(space, d, i, g).matrix
                         @ position_op(space, d, j, g_dual).matrix)
    return TensorOperator(space, d, total,
                          f"casimir-pair({i},{j};{normalization})")


def casimir_op(space: FormedSpace, d: int, k: int,
               normalization: str = "trace",
               basis: Optional[LieBasis] = None) -> TensorOperator:
    """The Casimir element sum_g g g* acting on one tensor slot."""
    if not space.has_form:
        raise UnsupportedFamilyError("Casimir needs a formed family")
    basis = basis or lie_basis(space)
    duals = dual_basis_elements(space, basis, normalization)
    kappa = SparseMatrix.zeros(space.n, space.n)
    for g, g_dual in zip(basis.elements, duals):
        kappa = kappa + g @ g_dual
    op = position_op(space, d, k, kappa)
    return TensorOperator(space, d, op.matrix, f"casimir({k};{normalization})")


def brauer_generators(space: FormedSpace, d: int) -> List[TensorOperator]:
    """Generators of the Brauer image: adjacent swaps and one contraction
    (slot conjugates of gamma(1,2) arise inside the closure)."""
    gens = [transposition_op(space, d, k, k + 1) for k in range(1, d)]
    if space.has_form and d >= 2:
        gens.append(contraction_op(space, d, 1, 2))
    return gens


def symmetric_group_generators(space: FormedSpace, d: int) -> List[TensorOperator]:
    return [transposition_op(space, d, k, k + 1) for k in range(1, d)]
