"""Incremental closure maintenance under edge insertion and deletion.

A DynamicState snapshots a hypergraph, a base capability set, and the
cached closure of that base.  States are immutable values: every edit
returns a new state and never touches the old one, so speculative checks
are free.

Insertion exploits monotonicity: when the new edge's tail is already inside
the cached closure, the new closure equals the old hypergraph's closure of
base plus the new head, because once the head is absorbed the new edge can
never contribute again.  Deletion is not monotone in any useful way, so it
always recomputes from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass

from .closure import ClosureResult, ClosureStats, closure
from .model import (
    CapabilityHypergraph,
    CapabilitySet,
    InvalidHypergraph,
    UniverseMismatch,
    _assemble,
)


@dataclass(frozen=True)
class DynamicState:
    hypergraph: CapabilityHypergraph
    base: CapabilitySet
    closure_cache: ClosureResult


@dataclass(frozen=True)
class InsertSafe:
    pass


@dataclass(frozen=True)
class InsertUnsafe:
    """The forbidden vertices that would become reachable."""

    reached_forbidden: CapabilitySet


def dynamic_state(h: CapabilityHypergraph, base: CapabilitySet) -> DynamicState:
    return DynamicState(hypergraph=h, base=base, closure_cache=closure(h, base))


def _validate_edge(h: CapabilityHypergraph, tail: CapabilitySet, head: CapabilitySet) -> None:
    if tail.n != h.n or head.n != h.n:
        raise UniverseMismatch("edge universe does not match the hypergraph")
    if head.bits == 0:
        raise InvalidHypergraph("edge head must not be empty")
    if tail.bits & head.bits:
        raise InvalidHypergraph("edge tail and head must be disjoint")


def insert_edge(state: DynamicState, tail: CapabilitySet, head: CapabilitySet) -> DynamicState:
    """Add one edge, updating the cached closure incrementally.

    When the tail is not yet reached, the closure is unchanged.  When it
    is, the reached set is recomputed over the old hypergraph seeded with
    the old closure plus the head, and the cached trace is stitched as
    old trace, then the new edge, then the continuation firings that
    derive something new, so the cache stays a valid derivation for the
    new hypergraph from the unchanged base.  Inserting an exact duplicate
    of an existing edge is a no-op.
    """
    h = state.hypergraph
    _validate_edge(h, tail, head)
    if any(e.tail.bits == tail.bits and e.head.bits == head.bits for e in h.edges):
        return state
    pairs = [(e.tail.bits, e.head.bits) for e in h.edges]
    pairs.append((tail.bits, head.bits))
    new_h = _assemble(h.labels, pairs)
    new_edge_id = new_h.m - 1

    old = state.closure_cache
    reached_bits = old.reached.bits
    if tail.bits & ~reached_bits:
        return DynamicState(hypergraph=new_h, base=state.base, closure_cache=old)

    seeded = CapabilitySet(h.n, reached_bits | head.bits)
    continuation = closure(h, seeded)
    known = reached_bits | head.bits
    keep = {
        continuation.deriver[v]
        for v in continuation.reached
        if not (known >> v) & 1 and continuation.deriver[v] is not None
    }
    trace = (
        old.firing_trace
        + (new_edge_id,)
        + tuple(eid for eid in continuation.firing_trace if eid in keep)
    )
    deriver: list[int | None] = list(old.deriver)
    for v in head:
        if not (reached_bits >> v) & 1:
            deriver[v] = new_edge_id
    for v in continuation.reached:
        if not (known >> v) & 1:
            deriver[v] = continuation.deriver[v]
    stats = ClosureStats(
        pops=old.stats.pops + continuation.stats.pops,
        decrements=old.stats.decrements + continuation.stats.decrements,
    )
    cache = ClosureResult(
        initial=state.base,
        reached=continuation.reached,
        firing_trace=trace,
        deriver=tuple(deriver),
        stats=stats,
    )
    return DynamicState(hypergraph=new_h, base=state.base, closure_cache=cache)


def delete_edge(state: DynamicState, edge_id: int) -> DynamicState:
    """Remove one edge by id and recompute the closure from scratch.

    Later edge ids shift down by one: ids are positional.  Deletion can
    strand any part of the derivation structure, so no shortcut applies.
    """
    h = state.hypergraph
    if not 0 <= edge_id < h.m:
        raise InvalidHypergraph(f"unknown edge id {edge_id}; hypergraph has {h.m} edges")
    pairs = [(e.tail.bits, e.head.bits) for e in h.edges if e.edge_id != edge_id]
    new_h = _assemble(h.labels, pairs)
    return dynamic_state(new_h, state.base)


def safe_to_insert(
    state: DynamicState,
    forbidden: CapabilitySet,
    tail: CapabilitySet,
    head: CapabilitySet,
) -> InsertSafe | InsertUnsafe:
    """Evaluate a proposed edge without mutating the state.

    Uses the same shortcut as insert_edge: if the tail is outside the
    cached closure the edge cannot fire, so the closure and the verdict
    are unchanged; otherwise the old hypergraph seeded with the head
    decides which forbidden vertices would become reachable.
    """
    h = state.hypergraph
    _validate_edge(h, tail, head)
    if forbidden.n != h.n:
        raise UniverseMismatch(f"forbidden set universe {forbidden.n} != hypergraph universe {h.n}")
    reached_bits = state.closure_cache.reached.bits
    if tail.bits & ~reached_bits:
        return InsertSafe()
    seeded = CapabilitySet(h.n, reached_bits | head.bits)
    would_reach = closure(h, seeded).reached
    bad = would_reach.bits & forbidden.bits
    if bad:
        return InsertUnsafe(reached_forbidden=CapabilitySet(h.n, bad))
    return InsertSafe()
