"""Analysis of discrete-time imprecise Markov chains.

Build a :class:`TransitionModel` from per-state credal rows (vertex lists or
probability intervals), wrap it in an :class:`UpperTransitionOperator`, and
query limit behaviour: accessibility classification, limit upper/lower
expectations, and limit upper/lower expected time averages, with brute-force
oracles over compatible precise chains for desk-scale verification.
"""

from .errors import (
    CapExceeded,
    ClassNotClosed,
    ClassNotCommunicating,
    DimensionMismatch,
    DuplicateStateLabels,
    ImcergoError,
    IncoherentIntervals,
    IntervalRowsPresent,
    ModelLoadError,
    NoConvergence,
    NotStronglyConnected,
    PmfMassError,
    SchemaViolation,
)
from .model import (
    Gamble,
    IntervalNormalizationWarning,
    IntervalRow,
    Pmf,
    StateSpace,
    TransitionModel,
    VertexRow,
    load_gamble,
    load_gamble_file,
    load_model,
    load_model_file,
    row_can_confine,
    row_lower_expectation,
    row_upper_expectation,
)
from .operator import (
    AverageRecursionState,
    UpperTransitionOperator,
    apply_lower,
    apply_topical,
    apply_upper,
    average_recursion,
    average_trace,
    iterate_lower,
    iterate_upper,
)
from .graph import (
    AccessibilityGraph,
    AccessibilityReport,
    ClassDecomposition,
    build_graph,
    check_tca,
    check_tcr,
    classify,
    decompose,
    globally_reachable_states,
    to_dot,
)
from .ergodicity import (
    EigenEstimate,
    ErgodicityReport,
    estimate_eigenvalue,
    full_report,
    limit_upper_expectation,
    per_class_limit,
    weak_ergodic_limit,
)
from .oracle import (
    OracleResult,
    PreciseChain,
    ci_upper_average_bruteforce,
    enumerate_homogeneous,
    interval_polytope_vertices,
    precise_time_average,
    ri_limit_check,
    ri_upper_average,
    vertexize_model,
)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "AccessibilityGraph",
    "AccessibilityReport",
    "AverageRecursionState",
    "CapExceeded",
    "ClassDecomposition",
    "ClassNotClosed",
    "ClassNotCommunicating",
    "DimensionMismatch",
    "DuplicateStateLabels",
    "EigenEstimate",
    "ErgodicityReport",
    "Gamble",
    "ImcergoError",
    "IncoherentIntervals",
    "IntervalNormalizationWarning",
    "IntervalRow",
    "IntervalRowsPresent",
    "KERNEL_BACKEND",
    "ModelLoadError",
    "NoConvergence",
    "NotStronglyConnected",
    "OracleResult",
    "Pmf",
    "PmfMassError",
    "PreciseChain",
    "SchemaViolation",
    "StateSpace",
    "TransitionModel",
    "UpperTransitionOperator",
    "VertexRow",
    "apply_lower",
    "apply_topical",
    "apply_upper",
    "average_recursion",
    "average_trace",
    "build_graph",
    "check_tca",
    "check_tcr",
    "ci_upper_average_bruteforce",
    "classify",
    "decompose",
    "enumerate_homogeneous",
    "estimate_eigenvalue",
    "full_report",
    "globally_reachable_states",
    "interval_polytope_vertices",
    "iterate_lower",
    "iterate_upper",
    "limit_upper_expectation",
    "load_gamble",
    "load_gamble_file",
    "load_model",
    "load_model_file",
    "per_class_limit",
    "precise_time_average",
    "ri_limit_check",
    "ri_upper_average",
    "row_can_confine",
    "row_lower_expectation",
    "row_upper_expectation",
    "to_dot",
    "vertexize_model",
    "weak_ergodic_limit",
]
