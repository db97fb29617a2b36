"""Fixed point closure over a capability hypergraph, plans, and certificates.

The closure of an initial capability set is the least superset closed under
every edge: whenever a tail is contained, the head is absorbed.  `closure`
computes it with a counter based worklist in O(n + m * k) total work for
tail bound k; `closure_naive` recomputes it by round iteration straight from
the definition and exists as a cross-check oracle.

Worklist discipline: a FIFO queue seeded with the initial vertices in
ascending index order.  Axiom edges fire before the main loop in ascending
edge id order.  Within a single vertex pop, edges fire in ascending edge id
order, and newly derived head vertices enqueue in ascending index order, so
runs are fully deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .model import (
    CapabilityHypergraph,
    CapabilitySet,
    UniverseMismatch,
    iter_bits,
)


def _check_universe(h: CapabilityHypergraph, capset: CapabilitySet) -> None:
    if capset.n != h.n:
        raise UniverseMismatch(f"capability set universe {capset.n} != hypergraph universe {h.n}")


@dataclass(frozen=True)
class ClosureStats:
    """Work counters: pops is bounded by n, decrements by the sum of tail sizes."""

    pops: int
    decrements: int


@dataclass(frozen=True)
class ClosureResult:
    """Everything one closure run derived.

    deriver[v] is the id of the edge whose firing first added v, or None
    for vertices of the initial set (and vertices never reached).  Replaying
    firing_trace from `initial` re-derives `reached` exactly.
    """

    initial: CapabilitySet
    reached: CapabilitySet
    firing_trace: tuple[int, ...]
    deriver: tuple[int | None, ...]
    stats: ClosureStats


def closure(h: CapabilityHypergraph, initial: CapabilitySet) -> ClosureResult:
    """Worklist closure: each vertex is processed once, each edge counter
    is decremented at most once per tail member, and an edge fires exactly
    when its last missing tail vertex is processed."""
    _check_universe(h, initial)
    n = h.n
    reached = initial.bits
    counters = list(h.tail_sizes)
    trace: list[int] = []
    deriver: list[int | None] = [None] * n
    queue: deque[int] = deque(iter_bits(initial.bits))
    pops = 0
    decrements = 0

    def fire(edge_id: int) -> None:
        nonlocal reached
        trace.append(edge_id)
        new = h.edges[edge_id].head.bits & ~reached
        if not new:
            return
        reached |= new
        for v in iter_bits(new):
            deriver[v] = edge_id
            queue.append(v)

    for e in h.edges:
        if e.tail.bits == 0:
            fire(e.edge_id)
    while queue:
        v = queue.popleft()
        pops += 1
        for edge_id in h.tail_index[v]:
            counters[edge_id] -= 1
            decrements += 1
            if counters[edge_id] == 0:
                fire(edge_id)

    return ClosureResult(
        initial=initial,
        reached=CapabilitySet(n, reached),
        firing_trace=tuple(trace),
        deriver=tuple(deriver),
        stats=ClosureStats(pops=pops, decrements=decrements),
    )


def closure_rounds(h: CapabilityHypergraph, initial: CapabilitySet) -> list[CapabilitySet]:
    """Round iteration from the definition: C0 = initial and each next round
    absorbs the heads of all edges whose tails the current round contains.
    Returns [C0, C1, ..., Cfix]; the last entry is the closure."""
    _check_universe(h, initial)
    rounds = [initial]
    current = initial.bits
    while True:
        nxt = current
        for e in h.edges:
            if e.tail.bits & ~current == 0:
                nxt |= e.head.bits
        if nxt == current:
            return rounds
        rounds.append(CapabilitySet(h.n, nxt))
        current = nxt


def closure_naive(h: CapabilityHypergraph, initial: CapabilitySet) -> CapabilitySet:
    """Reference implementation used as a test oracle for `closure`."""
    return closure_rounds(h, initial)[-1]


@dataclass(frozen=True)
class Plan:
    """An ordered edge firing sequence that derives `achieved` from `initial`."""

    initial: CapabilitySet
    steps: tuple[int, ...]
    achieved: CapabilitySet


@dataclass(frozen=True)
class Unreachable:
    """Returned when some goal vertices are outside the closure."""

    missing: CapabilitySet


def _needed_edges(
    h: CapabilityHypergraph, result: ClosureResult, targets: CapabilitySet
) -> set[int]:
    """Backward prune: collect the derivers of the targets and, transitively,
    of every tail vertex those derivers require beyond the initial set."""
    needed: set[int] = set()
    visited = result.initial.bits
    stack = [v for v in targets if not (visited >> v) & 1]
    while stack:
        v = stack.pop()
        if (visited >> v) & 1:
            continue
        visited |= 1 << v
        edge_id = result.deriver[v]
        assert edge_id is not None
        needed.add(edge_id)
        for u in h.edges[edge_id].tail:
            if not (visited >> u) & 1:
                stack.append(u)
    return needed


def extract_plan(
    h: CapabilityHypergraph, initial: CapabilitySet, goal: CapabilitySet
) -> Plan | Unreachable:
    """Return a pruned plan for `goal`, or Unreachable listing what is missing.

    Steps keep their original firing order, so each step's tail is satisfied
    by the initial set plus the heads of earlier steps.  Edges that do not
    feed the goal are pruned.
    """
    _check_universe(h, goal)
    result = closure(h, initial)
    missing = goal.bits & ~result.reached.bits
    if missing:
        return Unreachable(missing=CapabilitySet(h.n, missing))
    needed = _needed_edges(h, result, goal)
    steps = tuple(eid for eid in result.firing_trace if eid in needed)
    return Plan(initial=initial, steps=steps, achieved=goal)


@dataclass(frozen=True)
class DerivationCertificate:
    """A replayable witness that `target` is derivable from `initial`.

    Verification is linear in the certificate: replay the fired edges in
    order, checking each tail, then check the target was produced.
    """

    initial: CapabilitySet
    fired: tuple[int, ...]
    target: int


def certificate_for(
    h: CapabilityHypergraph, initial: CapabilitySet, vertex: int
) -> DerivationCertificate | None:
    """Certificate for one vertex, or None when it is not reachable."""
    result = closure(h, initial)
    if vertex not in result.reached:
        return None
    needed = _needed_edges(h, result, CapabilitySet.of(h.n, [vertex]))
    fired = tuple(eid for eid in result.firing_trace if eid in needed)
    return DerivationCertificate(initial=initial, fired=fired, target=vertex)


def verify_certificate(h: CapabilityHypergraph, cert: DerivationCertificate) -> bool:
    """Replay a certificate against `h` without recomputing any closure.

    Rejects out of range or repeated edge ids, any step fired before its
    tail is available, and certificates whose replay never yields the
    target.
    """
    if cert.initial.n != h.n:
        return False
    if not 0 <= cert.target < h.n:
        return False
    if len(set(cert.fired)) != len(cert.fired):
        return False
    have = cert.initial.bits
    for edge_id in cert.fired:
        if not 0 <= edge_id < h.m:
            return False
        e = h.edges[edge_id]
        if e.tail.bits & ~have:
            return False
        have |= e.head.bits
    return bool(have >> cert.target & 1)
