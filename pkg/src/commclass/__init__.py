"""Exact counts of simultaneous similarity classes of commuting matrix tuples over F_q."""

from .algebra import Subalgebra, center_of, centralizer_in, is_commutative, max_commutative_dim
from .branch import (
    BranchGraph,
    asymptotic_report,
    build_branch_graph,
    walk_count_classes,
    walk_count_tuples,
    witness_reachability,
)
from .counting import (
    brute_commuting_tuples,
    brute_simclasses_commuting,
    burnside_count,
    classes_by_partition,
)
from .errors import ConsistencyError, ScaleGuardError
from .field import FqContext, FqElement, fq_make
from .linalg import MatFq, VecSpan, commutator_nullspace, span_closure_product
from .witness import witness_even, witness_odd, witness_tuple

__version__ = "0.1.0"
