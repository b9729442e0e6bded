"""Divisor theory on graphs and rational metric graphs with a real structure.

The central objects are finite connected multigraphs carrying an involution
(a real structure), divisors on them, and the real refinements of the
classical chip-firing invariants: real rank, parity signatures, totally
real reductions on M-graphs, and real pencils of degree 2 on strong
M-graphs.  A metric layer handles rational edge lengths through
unit-subdivided models.
"""

from .errors import (
    BudgetExceeded,
    DanglingIncidence,
    Disconnected,
    EnumerationBudgetExceeded,
    GenusTooSmall,
    GraphValidationError,
    InadmissibleTriple,
    IncompatibleInvolution,
    IncompatibleOrientation,
    IrrationalPoint,
    NotEquivalent,
    NotInvolutive,
    NotMGraph,
    NotMMetricGraph,
    NotReal,
    NotRealEffective,
    NotStrongMGraph,
    PreconditionViolated,
    RealChipError,
    SearchExhausted,
)
from .graph import (
    InvariantReport,
    PlainGraph,
    RealGraph,
    SubgraphRef,
    check_invariant_bounds,
    contract_complement,
    delete_edges,
    edge_span,
    from_json,
    genus,
    genus_decomposition_check,
    graph_from_doc,
    graph_to_doc,
    induced_subgraph,
    invariants,
    real_locus,
    relabel,
    to_json,
    validate,
)
from .divisor import (
    DEFAULT_ENUMERATION_BUDGET,
    Divisor,
    PotentialFunction,
    ReducedForm,
    canonical_divisor,
    complete_linear_system,
    divisor_from_doc,
    divisor_to_doc,
    effective_divisors,
    is_q_reduced,
    laplacian,
    linearly_equivalent,
    potential_from_doc,
    potential_to_doc,
    q_reduce,
    rank,
    resolve_budget,
)
from .realdivisor import (
    ParitySignature,
    conjugate,
    conjugate_potential,
    find_real_g12,
    is_M_graph,
    is_real,
    is_real_potential,
    is_strong_M_graph,
    is_totally_real,
    parity_signature,
    real_effective_divisors,
    real_rank,
    real_witness,
    symmetrize,
    totally_real_reduction,
    vertex_pair_reduce,
)
from .builders import (
    PROFILES,
    edge_split,
    example1,
    example2,
    plain_banana,
    plain_cycle,
    random_real_graph,
    subdivide,
)
from .metric import (
    DEFAULT_MODEL_BUDGET,
    MetricWitness,
    ModelReduction,
    QDivisor,
    QMetricGraph,
    QPoint,
    edge_point,
    is_M_metric,
    is_strong_M_metric,
    metric_equivalent,
    metric_find_real_g12,
    metric_from_doc,
    metric_from_json,
    metric_invariants,
    metric_parity_signature,
    metric_rank,
    metric_real_rank,
    metric_to_doc,
    metric_to_json,
    metric_totally_real_reduction,
    qdivisor_from_doc,
    qdivisor_to_doc,
    qpoint_from_doc,
    qpoint_to_doc,
    reduce_to_model,
    resolve_model_budget,
    unit_metric,
    vertex_point,
)
from .properties import (
    PROPERTY_NAMES,
    FuzzReport,
    Violation,
    check_graph,
    expand_properties,
    run_trials,
    shrink,
)

__version__ = "0.1.0"
