import random
from fractions import Fraction

import pytest

from dualitylab.fields import GF, QQ, default_primes
from dualitylab.forms import build_space, lie_basis
from dualitylab.nilpotent import Partition, build_nilpotent
from dualitylab.engine import (PrimeCollisionError, certify_closure_equals_commutant,
                               commutant, full_matrix_algebra, invariant_vectors,
                               reflection_matrix, span_closure, sylvester_matrix,
                               trace_monomial, trace_pairing_J)
from dualitylab.rref import kernel, rank
from dualitylab.sparse import SparseMatrix
from dualitylab.tensorops import (brauer_generators, contraction_op,
                                  derivation_action, identity_op, position_op,
                                  transposition_op)


def random_matrix(n, rng, density=0.5):
    entries = [(r, c, rng.randint(-3, 3)) for r in range(n) for c in range(n)
               if rng.random() < density]
    return SparseMatrix.from_entries(n, n, entries)


# ----------------------------------------------------------------------
# closures
# ----------------------------------------------------------------------
def test_closure_of_nothing_is_scalars():
    space = build_space("sp", 1)
    algebra = span_closure(space, 2, [])
    assert algebra.dim == 1
    assert algebra.contains_matrix(SparseMatrix.identity(4))


def test_brauer_closure_dimension_so5():
    space = build_space("so-odd", 2)
    algebra = span_closure(space, 2, brauer_generators(space, 2))
    # Brauer diagram count at two strands: (2*2 - 1)!! = 3
    assert algebra.dim == 3


def test_closure_idempotent():
    space = build_space("sp", 2)
    algebra = span_closure(space, 2, brauer_generators(space, 2))
    again = span_closure(
        space, 2,
        [identity_op(space, 2)] +
        [type(identity_op(space, 2))(space, 2, m, f"b{i}")
         for i, m in enumerate(algebra.matrices())])
    assert again.basis == algebra.basis


def test_closure_is_verified_closed():
    space = build_space("so-even", 2)
    algebra = span_closure(space, 2, brauer_generators(space, 2))
    assert algebra.verify_closed()


def test_closure_prefilter_matches_plain():
    space = build_space("sp", 2)
    datum = build_nilpotent(space, Partition.of([2, 1, 1]))
    gens = brauer_generators(space, 2) + \
        [position_op(space, 2, k, datum.e) for k in (1, 2)]
    plain = span_closure(space, 2, gens)
    filtered = span_closure(space, 2, gens,
                            prefilter_primes=default_primes(0)[:1])
    assert plain.basis == filtered.basis


def test_closure_mod_p_matches_rational_dimension():
    space = build_space("so-odd", 2)
    gens = brauer_generators(space, 2)
    rational = span_closure(space, 2, gens)
    for p in default_primes(3):
        modular = span_closure(space, 2, gens, field=GF(p))
        assert modular.dim == rational.dim


# ----------------------------------------------------------------------
# commutants
# ----------------------------------------------------------------------
def test_commutant_of_identity_is_everything():
    space = build_space("sp", 1)
    algebra = commutant(space, 2, [identity_op(space, 2)])
    assert algebra.dim == space.n ** 4
    assert algebra.basis == full_matrix_algebra(space, 2).basis


def test_commutant_of_diagonal_action_so5():
    space = build_space("so-odd", 2)
    phis = [derivation_action(space, 2, X) for _, X in lie_basis(space)]
    algebra = commutant(space, 2, phis)
    assert algebra.dim == 3


def test_commutant_is_closed_algebra():
    space = build_space("sp", 2)
    phis = [derivation_action(space, 2, X) for _, X in lie_basis(space)]
    algebra = commutant(space, 2, phis)
    assert algebra.contains_matrix(SparseMatrix.identity(space.n ** 2))
    assert algebra.verify_closed()


def test_bicommutant_containment():
    space = build_space("sp", 1)
    rng = random.Random(0)
    for _ in range(5):
        gens = [type(identity_op(space, 2))(space, 2, random_matrix(4, rng), f"g{k}")
                for k in range(2)]
        first = commutant(space, 2, gens)
        second = commutant(space, 2, first.matrices())
        for g in gens:
            assert second.contains_matrix(g.matrix)


def test_double_commutant_of_semisimple_action():
    # bicommutant of the diagonal Lie action is its unital closure
    space = build_space("sp", 2)
    phis = [derivation_action(space, 2, X) for _, X in lie_basis(space)]
    enveloping = span_closure(space, 2, phis)
    bicom = commutant(space, 2, commutant(space, 2, phis).matrices())
    assert bicom.basis == enveloping.basis


def test_sylvester_matrix_realizes_commutator():
    rng = random.Random(1)
    g = random_matrix(3, rng)
    syl = sylvester_matrix(g)
    for _ in range(5):
        T = random_matrix(3, rng)
        assert syl.apply(T.flatten()) == (g @ T - T @ g).flatten()


def test_commutant_prime_backend_agrees():
    space = build_space("so-even", 2)
    phis = [derivation_action(space, 2, X) for _, X in lie_basis(space)]
    rational = commutant(space, 2, phis)
    for p in default_primes(1):
        modular = commutant(space, 2, phis, field=GF(p))
        assert modular.dim == rational.dim


# ----------------------------------------------------------------------
# invariant vectors
# ----------------------------------------------------------------------
def test_invariants_degree_one_vanish():
    for family in ("so-odd", "so-even", "sp"):
        space = build_space(family, 2)
        assert invariant_vectors(space, 1).dim == 0


def test_invariants_degree_two_is_form_line():
    for family in ("so-odd", "so-even", "sp"):
        space = build_space(family, 2)
        inv = invariant_vectors(space, 2)
        assert inv.dim == 1
        # the invariant line is spanned by sum_p v_p (x) v^p
        from dualitylab.tensorops import tensor_code
        vec = {}
        for p in space.indices:
            coeff = space.dual_vector(p)
            ((pos, c),) = coeff.items()
            vec[tensor_code(space, (p, space.index_at(pos)))] = c
        assert inv.contains(vec)


def test_so4_pfaffian_excess_at_degree_four():
    space = build_space("so-even", 2)
    assert invariant_vectors(space, 4).dim == 4
    assert invariant_vectors(space, 4, orthogonal_filter=True).dim == 3


def test_so5_no_excess_at_even_degrees():
    space = build_space("so-odd", 2)
    for d in (2, 4):
        assert invariant_vectors(space, d).dim == \
            invariant_vectors(space, d, orthogonal_filter=True).dim


def test_so3_alternating_invariant_at_degree_three():
    # odd degree at dim V: the connected group keeps the alternating
    # invariant, the full group kills it
    space = build_space("so-odd", 1)
    assert invariant_vectors(space, 3).dim == 1
    assert invariant_vectors(space, 3, orthogonal_filter=True).dim == 0


def test_reflection_matrix_is_isometry_of_determinant_minus_one():
    from dualitylab.forms import iota
    for family, r in [("so-odd", 2), ("so-even", 2)]:
        space = build_space(family, r)
        refl = reflection_matrix(space)
        assert iota(space, refl) @ refl == SparseMatrix.identity(space.n)
        assert refl @ refl == SparseMatrix.identity(space.n)


# ----------------------------------------------------------------------
# trace pairing and monomials
# ----------------------------------------------------------------------
def test_pairing_identity_gives_trace_product():
    space = build_space("sp", 2)
    rng = random.Random(2)
    for _ in range(20):
        Xs = [random_matrix(space.n, rng) for _ in range(2)]
        assert trace_pairing_J(identity_op(space, 2), Xs) == \
            Xs[0].trace() * Xs[1].trace()


def test_pairing_swap_gives_product_trace():
    space = build_space("so-even", 2)
    rng = random.Random(3)
    s = transposition_op(space, 2, 1, 2)
    for _ in range(20):
        Xs = [random_matrix(space.n, rng) for _ in range(2)]
        assert trace_pairing_J(s, Xs) == (Xs[0] @ Xs[1]).trace()


def test_pairing_contraction_gives_adjoint_trace():
    # the contraction pairs through the form adjoint of the first slot
    from dualitylab.forms import iota
    space = build_space("sp", 2)
    rng = random.Random(4)
    g = contraction_op(space, 2, 1, 2)
    for _ in range(20):
        Xs = [random_matrix(space.n, rng) for _ in range(2)]
        assert trace_pairing_J(g, Xs) == (iota(space, Xs[0]) @ Xs[1]).trace()


def test_trace_monomial_basic():
    space = build_space("so-odd", 2)
    rng = random.Random(5)
    X1, X2 = (random_matrix(space.n, rng) for _ in range(2))
    assert trace_monomial(space, [(1, False)], [X1, X2]) == X1.trace()
    assert trace_monomial(space, [(1, False), (2, False)], [X1, X2]) == \
        (X1 @ X2).trace()
    # anti-involution plus trace cyclicity
    assert trace_monomial(space, [(1, True), (2, True)], [X1, X2]) == \
        (X2 @ X1).trace()


# ----------------------------------------------------------------------
# certification
# ----------------------------------------------------------------------
def test_certification_succeeds_on_brauer_duality():
    space = build_space("sp", 2)
    closure = span_closure(space, 2, brauer_generators(space, 2))
    phis = [derivation_action(space, 2, X).matrix for _, X in lie_basis(space)]
    cert = certify_closure_equals_commutant(
        closure, phis, default_primes(0),
        direct_rational_max_ambient=space.n ** 4)
    assert cert.equal and cert.rational_certified
    assert cert.prime_consistent
    assert set(cert.upper_dims.values()) == {closure.dim}


def test_certification_detects_strict_containment():
    # drop a generator so the closure is too small
    space = build_space("sp", 2)
    closure = span_closure(space, 2, [transposition_op(space, 2, 1, 2)])
    phis = [derivation_action(space, 2, X).matrix for _, X in lie_basis(space)]
    cert = certify_closure_equals_commutant(closure, phis, default_primes(0))
    assert not cert.equal


def test_certification_rejects_non_commuting_closure():
    space = build_space("sp", 1)
    closure = full_matrix_algebra(space, 2)
    phis = [derivation_action(space, 2, X).matrix for _, X in lie_basis(space)]
    cert = certify_closure_equals_commutant(closure, phis, default_primes(0))
    assert not cert.equal and cert.method == "containment"
