"""Exact-arithmetic verification engine for centralizer algebras on
tensor powers of classical formed spaces.

The package computes, over the rationals or word-size prime fields,
generated operator algebras, commutants, invariant vectors and trace
pairings on V^(x)d for the classical families, and verifies
centralizer-duality statements at desk scale through the `verify` CLI.
"""

from .fields import GF, QQ, default_primes
from .forms import FormedSpace, build_space, iota, lie_basis, theta_op, \
    trace_rank_one_product
from .nilpotent import (GradingData, NilpotentDatum, Partition,
                        build_nilpotent, centralizer_gl, centralizer_lie,
                        check_even_good, check_multiplicity_condition, chi,
                        grading_from_h, sl2_complete)
from .normality import load_normality_table
from .engine import (OperatorAlgebra, commutant, invariant_vectors,
                     span_closure, trace_monomial, trace_pairing_J)
from .rref import SubspaceBasis, kernel, rank, rref
from .scenarios import ScenarioConfig, list_scenarios, run_scenario
from .sparse import SparseMatrix
from .tensorops import (TensorOperator, casimir_op, casimir_pair_op,
                        contraction_op, derivation_action, perm_op,
                        position_op, power_tensor_op, transposition_op)

__version__ = "0.1.0"
