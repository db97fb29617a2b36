"""Capability hypergraphs: closure, planning, safety audits, and mining."""

from __future__ import annotations

from .closure import (
    ClosureResult,
    ClosureStats,
    DerivationCertificate,
    Plan,
    Unreachable,
    certificate_for,
    closure,
    closure_rounds,
    extract_plan,
    verify_certificate,
)
from .discovery import (
    BoundaryEntry,
    Exact,
    GainEntry,
    LowerBoundExceeded,
    acquisition_distance,
    boundary,
    emergent,
    greedy_acquire,
    marginal_gain,
    near_miss_frontier,
)
from .dynamics import (
    DynamicState,
    InsertSafe,
    InsertUnsafe,
    delete_edge,
    dynamic_state,
    insert_edge,
    safe_to_insert,
)
from .mining import (
    Candidate,
    EvalInstance,
    MiningError,
    MiningReport,
    Trajectory,
    ViolationReport,
    evaluate_planners,
    mine_witnesses,
    wilson_interval,
)
from .model import (
    CapabilityHypergraph,
    CapabilitySet,
    Hyperedge,
    InvalidHypergraph,
    PairwiseGraph,
    UniverseMismatch,
    build_hypergraph,
    embed_graph,
    load_hypergraph,
    singleton_restriction,
)
from .reductions import (
    Gate,
    InvalidCircuit,
    InvalidInstance,
    MonotoneCircuit,
    TransversalInstance,
    cvp_to_instance,
    transversal_to_instance,
)
from .safety import (
    AlreadyReachable,
    AntichainB,
    AuditSurface,
    BudgetExceeded,
    ForbiddenGoal,
    NonExhaustiveAntichain,
    Safe,
    SafelyAcquirable,
    StructurallyUnsafe,
    Unsafe,
    UnsafeStart,
    UniverseTooLarge,
    audit_surface,
    classify_goal,
    coalition_gate,
    is_contained,
    maximal_safe_coalitions,
    minimal_unsafe_antichain,
)

__all__ = [
    "AlreadyReachable",
    "AntichainB",
    "AuditSurface",
    "BoundaryEntry",
    "BudgetExceeded",
    "Candidate",
    "CapabilityHypergraph",
    "CapabilitySet",
    "ClosureResult",
    "ClosureStats",
    "DerivationCertificate",
    "DynamicState",
    "EvalInstance",
    "Exact",
    "ForbiddenGoal",
    "GainEntry",
    "Gate",
    "Hyperedge",
    "InsertSafe",
    "InsertUnsafe",
    "InvalidCircuit",
    "InvalidHypergraph",
    "InvalidInstance",
    "LowerBoundExceeded",
    "MiningError",
    "MiningReport",
    "MonotoneCircuit",
    "NonExhaustiveAntichain",
    "PairwiseGraph",
    "Plan",
    "Safe",
    "SafelyAcquirable",
    "StructurallyUnsafe",
    "Trajectory",
    "TransversalInstance",
    "Unreachable",
    "Unsafe",
    "UnsafeStart",
    "UniverseMismatch",
    "UniverseTooLarge",
    "ViolationReport",
    "acquisition_distance",
    "audit_surface",
    "boundary",
    "build_hypergraph",
    "certificate_for",
    "classify_goal",
    "closure",
    "closure_rounds",
    "coalition_gate",
    "cvp_to_instance",
    "delete_edge",
    "dynamic_state",
    "embed_graph",
    "emergent",
    "evaluate_planners",
    "extract_plan",
    "greedy_acquire",
    "insert_edge",
    "is_contained",
    "load_hypergraph",
    "marginal_gain",
    "maximal_safe_coalitions",
    "mine_witnesses",
    "minimal_unsafe_antichain",
    "near_miss_frontier",
    "safe_to_insert",
    "singleton_restriction",
    "transversal_to_instance",
    "verify_certificate",
    "wilson_interval",
]
