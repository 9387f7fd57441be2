import itertools
import random
from fractions import Fraction

import pytest

from dualitylab.fields import QQ
from dualitylab.forms import LieBasis, build_space, iota, lie_basis
from dualitylab.nilpotent import Partition, build_nilpotent
from dualitylab.rref import solve
from dualitylab.sparse import SparseMatrix
from dualitylab.tensorops import (DegenerateFormError, SlotError,
                                  TensorOperator, casimir_op, casimir_pair_op,
                                  contraction_op, derivation_action,
                                  identity_op, load_operator_dump,
                                  pairing_gram, perm_op, position_op,
                                  power_tensor_op, transposition_op,
                                  tensor_code)

FORMED = [("so-odd", 1), ("so-odd", 2), ("so-even", 2), ("sp", 1), ("sp", 2)]


def random_lie_element(space, rng):
    basis = lie_basis(space)
    out = SparseMatrix.zeros(space.n, space.n)
    for _, X in basis:
        c = rng.randint(-2, 2)
        if c:
            out = out + X.scale(c)
    return out


# ----------------------------------------------------------------------
# permutation operators
# ----------------------------------------------------------------------
def test_perm_identity():
    space = build_space("sp", 2)
    assert perm_op(space, 3, [1, 2, 3]).matrix == SparseMatrix.identity(64)


def test_perm_swap_on_basis():
    space = build_space("so-even", 2)
    s = transposition_op(space, 2, 1, 2)
    for a in space.indices:
        for b in space.indices:
            src = {tensor_code(space, (a, b)): Fraction(1)}
            dst = {tensor_code(space, (b, a)): Fraction(1)}
            assert s.matrix.apply(src) == dst


def test_perm_group_relations():
    space = build_space("sp", 1)
    d = 3
    s1 = transposition_op(space, d, 1, 2)
    s2 = transposition_op(space, d, 2, 3)
    ident = SparseMatrix.identity(space.n ** d)
    assert (s1 @ s1).matrix == ident
    assert (s1 @ s2 @ s1).matrix == (s2 @ s1 @ s2).matrix


def test_perm_composition_homomorphism():
    space = build_space("so-odd", 1)
    d = 4
    rng = random.Random(0)
    for _ in range(10):
        w1 = list(range(1, d + 1))
        w2 = list(range(1, d + 1))
        rng.shuffle(w1)
        rng.shuffle(w2)
        composed = [w1[w2[k] - 1] for k in range(d)]
        assert (perm_op(space, d, w1) @ perm_op(space, d, w2)).matrix == \
            perm_op(space, d, composed).matrix


def test_perm_rejects_non_permutation():
    space = build_space("sp", 1)
    with pytest.raises(SlotError):
        perm_op(space, 2, [1, 1])


# ----------------------------------------------------------------------
# contraction operators
# ----------------------------------------------------------------------
def test_contraction_isotropic_pair_is_killed():
    space = build_space("so-odd", 2)
    g = contraction_op(space, 2, 1, 2)
    src = {tensor_code(space, (1, 1)): Fraction(1)}
    assert g.matrix.apply(src) == {}


def test_contraction_expands_form_vector():
    space = build_space("so-even", 2)
    g = contraction_op(space, 2, 1, 2)
    src = {tensor_code(space, (1, -1)): Fraction(1)}
    expected = {}
    for p in space.indices:
        expected[tensor_code(space, (p, -p))] = Fraction(1)
    assert g.matrix.apply(src) == expected


@pytest.mark.parametrize("family,r", FORMED)
def test_contraction_square_loop_constant(family, r):
    # matrix-square oracle: gamma^2 = n * gamma for both families with
    # the displayed definition (the dual basis pairs to +1 slotwise)
    space = build_space(family, r)
    g = contraction_op(space, 2, 1, 2, check_basis_independence=True)
    assert g.matrix @ g.matrix == g.matrix.scale(space.n)


@pytest.mark.parametrize("family,r", FORMED)
def test_contraction_swap_relation(family, r):
    space = build_space(family, r)
    g = contraction_op(space, 2, 1, 2)
    s = transposition_op(space, 2, 1, 2)
    sign = -1 if family == "sp" else 1
    assert g.matrix @ s.matrix == g.matrix.scale(sign)
    assert s.matrix @ g.matrix == g.matrix.scale(sign)


def test_contraction_slot_errors():
    space = build_space("sp", 2)
    with pytest.raises(SlotError):
        contraction_op(space, 2, 1, 1)
    with pytest.raises(SlotError):
        contraction_op(space, 2, 0, 1)


def test_contraction_gl_unsupported():
    from dualitylab.forms import UnsupportedFamilyError
    with pytest.raises(UnsupportedFamilyError):
        contraction_op(build_space("gl", 2), 2, 1, 2)


# ----------------------------------------------------------------------
# slot operators
# ----------------------------------------------------------------------
def test_position_op_identity_slot():
    space = build_space("sp", 2)
    ident = SparseMatrix.identity(space.n)
    assert position_op(space, 3, 2, ident).matrix == \
        SparseMatrix.identity(space.n ** 3)


def test_position_ops_disjoint_slots_commute():
    space = build_space("so-odd", 1)
    rng = random.Random(1)
    X = random_lie_element(space, rng)
    Y = random_lie_element(space, rng)
    a = position_op(space, 2, 1, X)
    b = position_op(space, 2, 2, Y)
    assert a.commutes_with(b)


def test_position_powers_vanish_at_nilpotency_order():
    space = build_space("sp", 2)
    datum = build_nilpotent(space, Partition.of([2, 2]))
    e1 = position_op(space, 2, 1, datum.e)
    assert (e1 @ e1).matrix == position_op(space, 2, 1, datum.e.pow_int(2)).matrix
    assert (e1 @ e1).matrix.is_zero()  # largest part is 2


def test_power_tensor_op_matches_products():
    space = build_space("sp", 1)
    rng = random.Random(2)
    X = random_lie_element(space, rng)
    d = 3
    powers = [2, 0, 1]
    expected = identity_op(space, d).matrix
    for k, l in enumerate(powers, start=1):
        expected = expected @ position_op(space, d, k, X.pow_int(l)).matrix
    assert power_tensor_op(space, d, X, powers).matrix == expected
    assert power_tensor_op(space, d, X, [0, 0, 0]).matrix == \
        SparseMatrix.identity(space.n ** d)


# ----------------------------------------------------------------------
# derivation action
# ----------------------------------------------------------------------
def test_derivation_zero():
    space = build_space("sp", 1)
    assert derivation_action(space, 2, SparseMatrix.zeros(2, 2)).matrix.is_zero()


@pytest.mark.parametrize("family,r", [("so-odd", 2), ("sp", 2)])
def test_derivation_is_lie_homomorphism(family, r):
    space = build_space(family, r)
    rng = random.Random(3)
    for _ in range(5):
        X = random_lie_element(space, rng)
        Y = random_lie_element(space, rng)
        lhs = derivation_action(space, 2, X.commutator(Y)).matrix
        rhs = derivation_action(space, 2, X).matrix.commutator(
            derivation_action(space, 2, Y).matrix)
        assert lhs == rhs


@pytest.mark.parametrize("family,r", FORMED)
def test_equivariance_of_brauer_generators(family, r):
    space = build_space(family, r)
    s = transposition_op(space, 2, 1, 2)
    g = contraction_op(space, 2, 1, 2)
    for _, X in lie_basis(space):
        phi = derivation_action(space, 2, X)
        assert phi.commutes_with(s)
        assert phi.commutes_with(g)


# ----------------------------------------------------------------------
# split Casimir
# ----------------------------------------------------------------------
def _span_coefficients(space, target):
    s = transposition_op(space, 2, 1, 2).matrix.flatten()
    g = contraction_op(space, 2, 1, 2).matrix.flatten()
    entries = []
    for col, vec in enumerate((s, g)):
        for idx, v in vec.items():
            entries.append((idx, col, v))
    system = SparseMatrix.from_entries(space.n ** 4, 2, entries)
    sol = solve(system, target.flatten())
    if sol is None:
        return None
    return [sol.get(0, Fraction(0)), sol.get(1, Fraction(0))]


# measured ratio of the Killing Gram to the half-trace Gram
KILLING_RATIOS = {
    ("so-odd", 1): 2, ("so-odd", 2): 6, ("so-odd", 3): 10,
    ("so-even", 2): 4, ("so-even", 3): 8,
    ("sp", 1): 8, ("sp", 2): 12, ("sp", 3): 16,
}


@pytest.mark.parametrize("family,r", FORMED)
def test_casimir_pair_trace_coefficients(family, r):
    space = build_space(family, r)
    cp = casimir_pair_op(space, 2, 1, 2, "trace")
    assert _span_coefficients(space, cp.matrix) == [Fraction(1), Fraction(-1)]


@pytest.mark.parametrize("family,r", sorted(KILLING_RATIOS))
def test_casimir_pair_killing_scaling(family, r):
    space = build_space(family, r)
    basis = lie_basis(space)
    gram_t = pairing_gram(space, basis, "trace")
    gram_k = pairing_gram(space, basis, "killing")
    ratio = KILLING_RATIOS[(family, r)]
    assert gram_k == gram_t.scale(ratio)
    cp = casimir_pair_op(space, 2, 1, 2, "killing", basis=basis)
    coeffs = _span_coefficients(space, cp.matrix)
    assert coeffs == [Fraction(1, ratio), Fraction(-1, ratio)]


def test_casimir_pair_killing_degenerate_for_abelian():
    space = build_space("so-even", 1)  # one-dimensional abelian algebra
    with pytest.raises(DegenerateFormError):
        casimir_pair_op(space, 2, 1, 2, "killing")


def test_casimir_pair_basis_independent():
    space = build_space("sp", 2)
    basis = lie_basis(space)
    elements = list(basis.elements)
    elements[0] = elements[0] + elements[1].scale(3)
    recombined = LieBasis(space, list(basis.labels), list(reversed(elements)))
    a = casimir_pair_op(space, 2, 1, 2, "trace", basis=basis)
    b = casimir_pair_op(space, 2, 1, 2, "trace", basis=recombined)
    assert a.matrix == b.matrix


def test_casimir_pair_commutes_with_diagonal_action():
    space = build_space("so-odd", 2)
    cp = casimir_pair_op(space, 2, 1, 2, "trace")
    for _, X in lie_basis(space):
        assert cp.commutes_with(derivation_action(space, 2, X))


def test_casimir_op_scalar_on_sp2():
    # sp_2 ~ sl_2 acts irreducibly on V, so the Casimir is scalar there
    space = build_space("sp", 1)
    kappa = casimir_op(space, 1, 1, "trace")
    assert kappa.matrix == SparseMatrix.identity(2).scale(3)


def test_casimir_op_central_and_form_compatible():
    space = build_space("sp", 2)
    kappa = casimir_op(space, 2, 1, "trace")
    for _, X in lie_basis(space):
        assert kappa.commutes_with(derivation_action(space, 2, X))
    kappa_matrix = casimir_op(space, 1, 1, "trace").matrix
    assert iota(space, kappa_matrix) == kappa_matrix


# ----------------------------------------------------------------------
# operator dumps
# ----------------------------------------------------------------------
def test_operator_dump_roundtrip_and_determinism():
    space = build_space("sp", 2)
    g = contraction_op(space, 2, 1, 2)
    text1 = g.dumps()
    text2 = contraction_op(space, 2, 1, 2).dumps()
    assert text1 == text2
    assert "recipe=gamma(1,2)" in text1
    assert f"n={space.n} d=2" in text1
    loaded = load_operator_dump(text1, space, 2)
    assert loaded.matrix == g.matrix


def test_operator_dump_normalization_header():
    space = build_space("sp", 1)
    cp = casimir_pair_op(space, 2, 1, 2, "trace")
    text = cp.dumps(normalization="trace")
    assert "# normalization=trace" in text
