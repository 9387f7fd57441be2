"""Nilpotent elements from Jordan partitions, their centralizers and gradings.

A nilpotent with prescribed Jordan type is built on an auxiliary chain
basis (one chain per Jordan block, with an explicit block-diagonal form
making the shift operator skew) and carried into the fixed coordinates
of the formed space by an explicit rational isometry.  The isometry is
chosen so that the natural weight element of the chain model becomes a
diagonal matrix, which is what the grading machinery needs.

Block bookkeeping: for the orthogonal families even block sizes are
hyperbolically paired and odd blocks carry a one-dimensional middle
line whose form value is steered to +1/-1 so middles can be paired two
at a time over the rationals (one middle of value +1 survives unpaired
exactly in odd dimension, landing on the index-0 axis).  For the
symplectic family the roles of even and odd sizes swap and no middle
lines occur.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .fields import QQ
from .forms import FormedSpace, LieBasis, UnsupportedFamilyError, iota, lie_basis
from .rref import InsertionBasis, SubspaceBasis, kernel, rref, solve
from .sparse import Row, SparseMatrix, stack_matrices, vec_add_scaled


class PartitionParityError(Exception):
    """Partition invalid for the family; names the offending part size."""


class MembershipError(Exception):
    """A matrix expected inside the Lie algebra lies outside it."""


class NoSl2Error(Exception):
    """The zero nilpotent has no sl2 completion."""


class GradingError(Exception):
    """No integer diagonal grading element in the given coordinates."""


class InternalSolveError(Exception):
    """A linear solve that theory guarantees failed; indicates a bug."""


# ----------------------------------------------------------------------
# partitions
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Partition:
    parts: Tuple[int, ...]

    @classmethod
    def of(cls, parts: Sequence[int]) -> "Partition":
        if any(p < 1 for p in parts):
            raise ValueError("partition parts must be positive")
        return cls(tuple(sorted(parts, reverse=True)))

    @property
    def total(self) -> int:
        return sum(self.parts)

    def multiplicities(self) -> Dict[int, int]:
        mult: Dict[int, int] = {}
        for p in self.parts:
            mult[p] = mult.get(p, 0) + 1
        return mult

    def conjugate_count(self, k: int) -> int:
        """Number of parts strictly greater than k."""
        return sum(1 for p in self.parts if p > k)

    def expected_power_rank(self, k: int) -> int:
        """rank(e^k) for a nilpotent of this Jordan type."""
        return sum(max(p - k, 0) for p in self.parts)

    def validate_for(self, family: str) -> None:
        if family == "gl":
            return
        mult = self.multiplicities()
        if family in ("so-odd", "so-even"):
            bad = [s for s, m in mult.items() if s % 2 == 0 and m % 2 == 1]
            kind = "even"
        elif family == "sp":
            bad = [s for s, m in mult.items() if s % 2 == 1 and m % 2 == 1]
            kind = "odd"
        else:
            raise ValueError(f"unknown family {family!r}")
        if bad:
            raise PartitionParityError(
                f"{family}: {kind} part size {min(bad)} has odd multiplicity "
                f"in {list(self.parts)}")

    def __str__(self):
        return "[" + ",".join(str(p) for p in self.parts) + "]"


def check_multiplicity_condition(partition: Partition, family: str, d: int) -> bool:
    """Multiplicity condition on the Jordan type at tensor degree d.

    Orthogonal families test the odd part sizes, the symplectic family
    the even ones: each tested multiplicity must be odd or exceed 2d.
    """
    mult = partition.multiplicities()
    if family in ("so-odd", "so-even", "so"):
        tested = {s: m for s, m in mult.items() if s % 2 == 1}
    elif family == "sp":
        tested = {s: m for s, m in mult.items() if s % 2 == 0}
    else:
        raise UnsupportedFamilyError("multiplicity condition needs a formed family")
    return all(m % 2 == 1 or m > 2 * d for m in tested.values())


# ----------------------------------------------------------------------
# chain model
# ----------------------------------------------------------------------
@dataclass
class _Block:
    size: int
    paired: bool
    start: int          # first chain coordinate of the (first) chain
    sign: Fraction      # overall form sign for single blocks

    @property
    def width(self) -> int:
        return self.size * (2 if self.paired else 1)


def _plan_blocks(partition: Partition, family: str) -> List[_Block]:
    mult = partition.multiplicities()
    sizes = sorted(mult, reverse=True)
    blocks: List[_Block] = []
    cursor = 0
    if family == "gl":
        for p in partition.parts:
            blocks.append(_Block(p, False, cursor, Fraction(1)))
            cursor += p
        return blocks
    single_parity = 1 if family in ("so-odd", "so-even") else 0
    # Alternate the middle signs of single (odd-size, orthogonal) blocks
    # so they can be hyperbolically paired over the rationals.
    middle_counter = 0
    for s in sizes:
        m = mult[s]
        if s % 2 == single_parity:
            for _ in range(m):
                if family in ("so-odd", "so-even"):
                    target = 1 if middle_counter % 2 == 0 else -1
                    middle_counter += 1
                    sign = Fraction(target * (-1) ** ((s - 1) // 2))
                else:
                    sign = Fraction(1)
                blocks.append(_Block(s, False, cursor, sign))
                cursor += s
        else:
            if m % 2 == 1:
                raise PartitionParityError(
                    f"{family}: part size {s} has odd multiplicity {m}")
            for _ in range(m // 2):
                blocks.append(_Block(s, True, cursor, Fraction(1)))
                cursor += 2 * s
    return blocks


def _chain_shift(blocks: List[_Block], n: int) -> SparseMatrix:
    entries = []
    for blk in blocks:
        chains = (blk.start, blk.start + blk.size) if blk.paired else (blk.start,)
        for c0 in chains:
            for a in range(blk.size - 1):
                entries.append((c0 + a + 1, c0 + a, 1))
    return SparseMatrix.from_entries(n, n, entries)


def _chain_weights(blocks: List[_Block], n: int) -> List[int]:
    weights = [0] * n
    for blk in blocks:
        chains = (blk.start, blk.start + blk.size) if blk.paired else (blk.start,)
        for c0 in chains:
            for a in range(blk.size):
                weights[c0 + a] = 2 * a - (blk.size - 1)
    return weights


def _chain_lowering(blocks: List[_Block], n: int) -> SparseMatrix:
    entries = []
    for blk in blocks:
        s = blk.size
        chains = (blk.start, blk.start + blk.size) if blk.paired else (blk.start,)
        for c0 in chains:
            for a in range(1, s):
                entries.append((c0 + a - 1, c0 + a, a * (s - a)))
    return SparseMatrix.from_entries(n, n, entries)


def _chain_planes(blocks: List[_Block], family: str):
    """Hyperbolic planes (x, y) with <x, y> = 1 plus at most one unit line.

    Vectors are sparse rows in chain coordinates.  For the orthogonal
    families <y, x> = 1 too; for the symplectic family <y, x> = -1.
    """
    planes: List[Tuple[Row, Row]] = []
    middles: List[Tuple[Row, Fraction]] = []   # (vector, <m, m>)
    for blk in blocks:
        s = blk.size
        if blk.paired:
            first, second = blk.start, blk.start + blk.size
            for a in range(s):
                x: Row = {first + a: Fraction(1)}
                y: Row = {second + (s - 1 - a): Fraction((-1) ** a)}
                planes.append((x, y))
        else:
            for a in range((s - 1) // 2 if s % 2 == 1 else s // 2):
                coeff = blk.sign * (-1) ** a
                x = {blk.start + a: Fraction(1)}
                y = {blk.start + (s - 1 - a): 1 / coeff}
                planes.append((x, y))
            if s % 2 == 1:
                mid = blk.start + (s - 1) // 2
                value = blk.sign * (-1) ** ((s - 1) // 2)
                middles.append(({mid: Fraction(1)}, value))
    # Pair middles (+1 with -1); in odd dimension one +1 middle remains.
    plus = [m for m, v in middles if v == 1]
    minus = [m for m, v in middles if v == -1]
    if family in ("so-odd", "so-even"):
        if len(minus) > len(plus):
            raise InternalSolveError("middle sign bookkeeping failed")
        for m1, m2 in zip(plus, minus):
            x = dict(m1)
            vec_add_scaled(x, m2, Fraction(1), QQ)
            y = {k: v / 2 for k, v in m1.items()}
            vec_add_scaled(y, m2, Fraction(-1, 2), QQ)
            planes.append((x, y))
        leftover = plus[len(minus):]
    else:
        if middles:
            raise InternalSolveError("symplectic blocks cannot have middles")
        leftover = []
    return planes, leftover


def _chain_form_value(blocks: List[_Block], family: str,
                      a_idx: int, b_idx: int) -> Fraction:
    """<w_a, w_b> in chain coordinates (slow reference; used in tests)."""
    for blk in blocks:
        s = blk.size
        if blk.paired:
            lo, hi = blk.start, blk.start + 2 * s
            if lo <= a_idx < hi and lo <= b_idx < hi:
                a_first = a_idx < blk.start + s
                b_first = b_idx < blk.start + s
                if a_first == b_first:
                    return Fraction(0)
                a = (a_idx - blk.start) % s
                b = (b_idx - blk.start) % s
                if a + b != s - 1:
                    return Fraction(0)
                if a_first:
                    return Fraction((-1) ** a)
                sign = 1 if family in ("so-odd", "so-even") else -1
                return Fraction(sign * (-1) ** b)
            if (lo <= a_idx < hi) != (lo <= b_idx < hi):
                continue
        else:
            lo, hi = blk.start, blk.start + s
            if lo <= a_idx < hi and lo <= b_idx < hi:
                a, b = a_idx - lo, b_idx - lo
                if a + b != s - 1:
                    return Fraction(0)
                return blk.sign * (-1) ** a
    return Fraction(0)


# ----------------------------------------------------------------------
# the nilpotent datum
# ----------------------------------------------------------------------
@dataclass
class NilpotentDatum:
    space: FormedSpace
    partition: Partition
    e: SparseMatrix
    jordan_vectors: List[Row]            # chain tops, standard coordinates
    centralizer_basis: List[SparseMatrix]
    h: Optional[SparseMatrix]            # diagonal grading element, if e != 0
    f: Optional[SparseMatrix]
    h_diag: Optional[Dict[int, Fraction]]  # coefficients on F_{i,i}
    blocks: List[Tuple[int, str]]        # (size, "single" | "paired") for reports
    component_fixers: List[Tuple[int, SparseMatrix]]
    """One stabilizer element outside the identity component per block
    size carried by orthogonal-group factors of the reductive
    centralizer (odd sizes for orthogonal families, even for
    symplectic): the isometry negating the first single block of that
    size.  Conjugation-invariance under these cuts the connected
    centralizer's commutant down to the full group centralizer's."""


def build_nilpotent(space: FormedSpace, partition: Partition) -> NilpotentDatum:
    """Nilpotent of the given Jordan type inside the space's Lie algebra."""
    if partition.total != space.n:
        raise PartitionParityError(
            f"partition {partition} sums to {partition.total}, dim V = {space.n}")
    partition.validate_for(space.family)
    blocks = _plan_blocks(partition, space.family)
    n = space.n
    e_chain = _chain_shift(blocks, n)
    f_chain = _chain_lowering(blocks, n)
    weights = _chain_weights(blocks, n)

    if space.family == "gl":
        psi_cols: List[Row] = [{k: Fraction(1)} for k in range(n)]
        assigned = {space.index_at(k): k for k in range(n)}
    else:
        planes, leftover = _chain_planes(blocks, space.family)
        if len(planes) != space.r or len(leftover) != (1 if space.family == "so-odd" else 0):
            raise InternalSolveError("plane extraction does not fill the space")
        psi_cols = [None] * n  # type: ignore[list-item]
        for i, (x, y) in enumerate(planes, start=1):
            psi_cols[space.pos(i)] = x
            psi_cols[space.pos(-i)] = y
        if space.family == "so-odd":
            psi_cols[space.pos(0)] = leftover[0]

    psi = SparseMatrix.from_entries(
        n, n, [(r, c, v) for c, col in enumerate(psi_cols) for r, v in col.items()])
    psi_inv = _invert(psi)
    e_std = psi_inv @ e_chain @ psi
    f_std = psi_inv @ f_chain @ psi
    h_entries = []
    for c, col in enumerate(psi_cols):
        # every isometry column is a weight vector of the chain model
        ws = {weights[k] for k in col}
        if len(ws) != 1:
            raise InternalSolveError("mixed-weight isometry column")
        w = ws.pop()
        if w != 0:
            h_entries.append((c, c, w))
    h_std = SparseMatrix.from_entries(n, n, h_entries)

    if space.has_form:
        if iota(space, e_std) != -e_std:
            raise InternalSolveError("constructed nilpotent is not skew")
        # isometry sanity: psi^T G_chain psi = G_std
    for k in range(1, (partition.parts[0] if partition.parts else 0) + 1):
        from .rref import rank as _rank
        if _rank(e_std.pow_int(k)) != partition.expected_power_rank(k):
            raise InternalSolveError("Jordan type mismatch in construction")

    jordan_vectors = []
    for blk in blocks:
        chains = (blk.start, blk.start + blk.size) if blk.paired else (blk.start,)
        for c0 in chains:
            jordan_vectors.append(psi_inv.apply({c0: Fraction(1)}))

    component_fixers: List[Tuple[int, SparseMatrix]] = []
    if space.has_form:
        seen_sizes = set()
        for blk in blocks:
            if blk.paired or blk.size in seen_sizes:
                continue
            seen_sizes.add(blk.size)
            neg = SparseMatrix.from_entries(
                n, n,
                [(k, k, -1 if blk.start <= k < blk.start + blk.size else 1)
                 for k in range(n)])
            rho = psi_inv @ neg @ psi
            if not rho.commutes_with(e_std):
                raise InternalSolveError("component fixer does not centralize e")
            if iota(space, rho) @ rho != SparseMatrix.identity(n):
                raise InternalSolveError("component fixer is not an isometry")
            component_fixers.append((blk.size, rho))

    is_zero = e_std.is_zero()
    basis = lie_basis(space)
    centralizer = centralizer_lie(space, e_std, basis=basis)
    h_diag: Optional[Dict[int, Fraction]] = None
    if not is_zero:
        h_diag = {}
        for i in space.indices:
            if i > 0:
                h_diag[i] = h_std.entry(space.pos(i), space.pos(i))
        # triple relations hold by construction; verified again in sl2_complete
    return NilpotentDatum(
        space=space, partition=partition, e=e_std,
        jordan_vectors=jordan_vectors, centralizer_basis=centralizer,
        h=None if is_zero else h_std, f=None if is_zero else f_std,
        h_diag=h_diag,
        blocks=[(b.size, "paired" if b.paired else "single") for b in blocks],
        component_fixers=component_fixers)


def _invert(m: SparseMatrix) -> SparseMatrix:
    n = m.nrows
    aug_rows: Dict[int, Row] = {}
    for r in range(n):
        row = m.row(r)
        row[n + r] = Fraction(1)
        aug_rows[r] = row
    aug = SparseMatrix(n, 2 * n, aug_rows, m.field)
    basis, rk = rref(aug)
    if rk != n or basis.pivots != list(range(n)):
        raise InternalSolveError("singular isometry matrix")
    inv_entries = []
    for r, row in enumerate(basis.rows):
        for c, v in row.items():
            if c >= n:
                inv_entries.append((r, c - n, v))
    return SparseMatrix.from_entries(n, n, inv_entries, m.field)


# ----------------------------------------------------------------------
# centralizers
# ----------------------------------------------------------------------
def centralizer_lie(space: FormedSpace, e: SparseMatrix,
                    basis: Optional[LieBasis] = None) -> List[SparseMatrix]:
    """Canonical basis of {X in g : [X, e] = 0}.

    Solved as the kernel of ad_e on the coefficient space of the Lie
    basis, then re-echelonized inside the flattened matrix space so the
    output is independent of the Lie basis ordering.
    """
    basis = basis or lie_basis(space)
    if space.has_form and not basis.contains(e):
        raise MembershipError("e does not lie in the Lie algebra of the space")
    n2 = space.n * space.n
    columns = [b.commutator(e).flatten() for _, b in basis]
    entries = []
    for k, col in enumerate(columns):
        for ridx, v in col.items():
            entries.append((ridx, k, v))
    constraint = SparseMatrix.from_entries(n2, basis.dim, entries)
    coeff_kernel = kernel(constraint)
    vectors = []
    for coeffs in coeff_kernel.rows:
        vec: Row = {}
        for k, c in coeffs.items():
            vec_add_scaled(vec, basis.elements[k].flatten(), c, QQ)
        vectors.append(vec)
    canonical = SubspaceBasis.from_vectors(vectors, n2, QQ)
    return [SparseMatrix.unflatten(row, space.n, space.n) for row in canonical.rows]


def centralizer_gl(space: FormedSpace, e: SparseMatrix) -> List[SparseMatrix]:
    """Canonical basis of the full matrix centralizer {X : [X, e] = 0}."""
    n = space.n
    ident = SparseMatrix.identity(n)
    # row-major flattening: vec(eX - Xe) = (e (x) I - I (x) e^T) vec(X)
    sylvester = e.kron(ident) - ident.kron(e.transpose())
    null = kernel(sylvester)
    return [SparseMatrix.unflatten(row, n, n) for row in null.rows]


# ----------------------------------------------------------------------
# sl2 completion
# ----------------------------------------------------------------------
def sl2_complete(space: FormedSpace, e: SparseMatrix
                 ) -> Tuple[SparseMatrix, SparseMatrix, SparseMatrix]:
    """Complete a nilpotent e to a triple (e, h, f) with h diagonal.

    h is found as [e, y] subject to being diagonal and [h, e] = 2e, then
    f is completed by the standard correction inside the centralizer.
    Raises GradingError when no diagonal grading element exists in the
    given coordinates (engine-built nilpotents always admit one).
    """
    if e.is_zero():
        raise NoSl2Error("the zero nilpotent has no sl2 completion")
    basis = lie_basis(space)
    if space.has_form and not basis.contains(e):
        raise MembershipError("e does not lie in the Lie algebra of the space")
    n = space.n
    m = basis.dim

    # Unknown y = sum c_k b_k.  Equations: [[e, y], e] = 2e and
    # offdiag([e, y]) = 0, all linear in the coefficients c.
    eq_entries: List[Tuple[int, int, Fraction]] = []
    rhs: Row = {}
    n2 = n * n
    for k, (_, b) in enumerate(basis):
        h_cand = e.commutator(b)            # [e, b]
        outer = h_cand.commutator(e)        # [[e, b], e]
        for idx, v in outer.flatten().items():
            eq_entries.append((idx, k, v))
        for ridx, cidx, v in h_cand.entries():
            if ridx != cidx:
                eq_entries.append((n2 + ridx * n + cidx, k, v))
    for idx, v in e.scale(2).flatten().items():
        rhs[idx] = v
    system = SparseMatrix.from_entries(2 * n2, m, eq_entries)
    coeffs = solve(system, rhs)
    if coeffs is None:
        raise GradingError(
            "no diagonal grading element for this nilpotent in the given "
            "coordinates; conjugate e first (engine-built nilpotents are aligned)")
    y = SparseMatrix.zeros(n, n)
    for k, c in coeffs.items():
        y = y + basis.elements[k].scale(c)
    h = e.commutator(y)

    # f0 with [e, f0] = h, inside g.
    f0_entries: List[Tuple[int, int, Fraction]] = []
    for k, (_, b) in enumerate(basis):
        for idx, v in e.commutator(b).flatten().items():
            f0_entries.append((idx, k, v))
    f0_system = SparseMatrix.from_entries(n2, m, f0_entries)
    f0_coeffs = solve(f0_system, h.flatten())
    if f0_coeffs is None:
        raise InternalSolveError("no f0 with [e, f0] = h")
    f0 = SparseMatrix.zeros(n, n)
    for k, c in f0_coeffs.items():
        f0 = f0 + basis.elements[k].scale(c)

    # Correct inside the centralizer: u = [h, f0] + 2 f0 lies in g_e and
    # (ad_h + 2) is invertible there, so f = f0 - z restores [h, f] = -2f.
    u = h.commutator(f0) + f0.scale(2)
    cent = centralizer_lie(space, e, basis=basis)
    if not u.commutator(e).is_zero():
        raise InternalSolveError("correction term left the centralizer")
    col_entries: List[Tuple[int, int, Fraction]] = []
    for k, z in enumerate(cent):
        image = h.commutator(z) + z.scale(2)
        for idx, v in image.flatten().items():
            col_entries.append((idx, k, v))
    corr_system = SparseMatrix.from_entries(n2, len(cent), col_entries)
    z_coeffs = solve(corr_system, u.flatten())
    if z_coeffs is None:
        raise InternalSolveError("(ad_h + 2) correction solve failed")
    z = SparseMatrix.zeros(n, n)
    for k, c in z_coeffs.items():
        z = z + cent[k].scale(c)
    f = f0 - z

    if h.commutator(e) != e.scale(2) or e.commutator(f) != h \
            or h.commutator(f) != f.scale(-2):
        raise InternalSolveError("sl2 relations failed after completion")
    return e, h, f


def h_diagonal_coefficients(space: FormedSpace, h: SparseMatrix) -> Dict[int, Fraction]:
    """Coefficients a_i of a diagonal h = sum a_i F_{i,i}; checks shape."""
    for r, c, _ in h.entries():
        if r != c:
            raise GradingError("grading element is not diagonal")
    coeffs: Dict[int, Fraction] = {}
    for i in space.indices:
        if i > 0:
            a = h.entry(space.pos(i), space.pos(i))
            b = h.entry(space.pos(-i), space.pos(-i))
            if a != -b:
                raise GradingError("diagonal is not of the form sum a_i F_{i,i}")
            coeffs[i] = Fraction(a)
    if 0 in space.indices and h.entry(space.pos(0), space.pos(0)) != 0:
        raise GradingError("index-0 diagonal entry must vanish")
    return coeffs


# ----------------------------------------------------------------------
# gradings
# ----------------------------------------------------------------------
@dataclass
class GradingData:
    space: FormedSpace
    basis: LieBasis
    h_diag: Dict[int, int]
    col: Dict[int, int]
    degrees: List[int]               # aligned with basis elements
    h_matrix: SparseMatrix

    def graded_piece_indices(self) -> Dict[int, List[int]]:
        pieces: Dict[int, List[int]] = {}
        for k, deg in enumerate(self.degrees):
            pieces.setdefault(deg, []).append(k)
        return pieces

    @property
    def p_labels(self) -> List[Tuple[int, int]]:
        return [self.basis.labels[k] for k, d in enumerate(self.degrees) if d >= 0]

    @property
    def m_labels(self) -> List[Tuple[int, int]]:
        return [self.basis.labels[k] for k, d in enumerate(self.degrees) if d < 0]

    def tensor_degree(self, indices: Sequence[int]) -> int:
        return sum(self.col[i] for i in indices)


def grading_from_h(space: FormedSpace, h_diag: Dict[int, Fraction],
                   basis: Optional[LieBasis] = None) -> GradingData:
    """Grading data from h = sum a_i F_{i,i} with integer a_i."""
    if not space.has_form:
        raise UnsupportedFamilyError("gradings are built on formed families")
    basis = basis or lie_basis(space)
    col: Dict[int, int] = {}
    for i in range(1, space.r + 1):
        a = Fraction(h_diag.get(i, 0))
        if a.denominator != 1:
            raise GradingError(f"non-integer eigenvalue {a} at index {i}")
        col[i] = int(a)
        col[-i] = -int(a)
    if 0 in space.indices:
        col[0] = 0
    h = SparseMatrix.from_entries(
        space.n, space.n,
        [(space.pos(i), space.pos(i), col[i]) for i in space.indices if col[i] != 0])
    degrees: List[int] = []
    for (p, q), element in zip(basis.labels, basis.elements):
        deg = col[p] - col[q]
        # independent check: ad_h acts on the element by the same degree
        if h.commutator(element) != element.scale(deg):
            raise GradingError("basis element is not homogeneous for ad_h")
        degrees.append(deg)
    for i in range(1, space.r + 1):
        if col[i] + col[-i] != 0:
            raise InternalSolveError("col antisymmetry failed")
    return GradingData(space, basis, {i: col[i] for i in col if i > 0},
                       col, degrees, h)


@dataclass
class GoodGradingReport:
    even: bool
    good: bool
    failures: List[str]
    piece_dims: Dict[int, int]


def check_even_good(space: FormedSpace, grading: GradingData,
                    e: SparseMatrix) -> GoodGradingReport:
    """Evenness and goodness of the grading for e, by rank checks.

    Goodness: e is a nonzero element of the degree-2 piece, ad_e is
    injective from degree j for j <= -1 and surjective onto degree j+2
    for j >= -1.  The zero nilpotent is reported not good.
    """
    pieces = grading.graded_piece_indices()
    piece_dims = {d: len(ids) for d, ids in sorted(pieces.items())}
    failures: List[str] = []
    even = all(d % 2 == 0 for d in pieces)
    if not even:
        odd_degs = sorted(d for d in pieces if d % 2)
        failures.append(f"not even: odd graded pieces present {odd_degs}")

    if e.is_zero():
        failures.append("not good: e = 0 is not a nonzero element of the "
                        "degree-2 piece")
        return GoodGradingReport(even, False, failures, piece_dims)

    good_failures: List[str] = []
    deg2 = InsertionBasis(space.n * space.n)
    for k in pieces.get(2, []):
        deg2.insert(grading.basis.elements[k].flatten())
    if not deg2.contains(e.flatten()):
        good_failures.append("e does not lie in the degree-2 piece")

    degs = sorted(pieces)
    all_degrees = set(degs)
    for j in degs:
        dim_j = len(pieces[j])
        images = [e.commutator(grading.basis.elements[k]).flatten()
                  for k in pieces[j]]
        img_basis = SubspaceBasis.from_vectors(images, space.n * space.n)
        if j <= -1 and img_basis.dim != dim_j:
            good_failures.append(
                f"ad_e not injective on degree {j} (rank {img_basis.dim} < {dim_j})")
        if j >= -1:
            target = len(pieces.get(j + 2, []))
            if img_basis.dim != target:
                good_failures.append(
                    f"ad_e not surjective from degree {j} onto degree {j + 2} "
                    f"(rank {img_basis.dim} < {target})")
    for j in all_degrees:
        # surjectivity also fails when a nonzero target has no source piece
        if j - 2 >= -1 and j - 2 not in all_degrees and pieces[j]:
            good_failures.append(
                f"degree {j} piece has no source at degree {j - 2}")
    failures.extend(good_failures)
    return GoodGradingReport(even, not good_failures, failures, piece_dims)


# ----------------------------------------------------------------------
# the trace character
# ----------------------------------------------------------------------
def chi(space: FormedSpace, e: SparseMatrix, X: SparseMatrix,
        basis: Optional[LieBasis] = None) -> Fraction:
    """Trace of ad_e composed with ad_X on the Lie algebra."""
    basis = basis or lie_basis(space)
    for name, mat in (("e", e), ("X", X)):
        if not basis.contains(mat):
            raise MembershipError(f"{name} does not lie in the Lie algebra")
    total = Fraction(0)
    for j, (_, b) in enumerate(basis):
        image = e.commutator(X.commutator(b))
        coords = basis.coordinates(image)
        if coords is None:
            raise MembershipError("ad image left the Lie algebra (impossible)")
        total += coords[j]
    return total
