"""Goal discovery: emergent capabilities, the near miss frontier, gains,
acquisition distance, and greedy acquisition.

Emergent capabilities are reachable only through joint composition: they sit
in the closure but not in the closure of the singleton restriction.  The
near miss frontier lists single capabilities whose acquisition is safe and
unlocks at least one new derivation.  Closure gain is submodular in the
acquired set, which is what makes greedy acquisition competitive.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable

from .closure import closure
from .model import (
    CapabilityHypergraph,
    CapabilitySet,
    InvalidHypergraph,
    singleton_restriction,
)


@dataclass(frozen=True)
class BoundaryEntry:
    """An edge exactly one tail vertex short of firing, and that vertex."""

    edge_id: int
    missing: int


@dataclass(frozen=True)
class GainEntry:
    vertex: int
    gain: int


@dataclass(frozen=True)
class Exact:
    distance: int


@dataclass(frozen=True)
class LowerBoundExceeded:
    """The true distance is strictly greater than the enumeration budget."""

    budget: int


def emergent(h: CapabilityHypergraph, initial: CapabilitySet) -> CapabilitySet:
    """Vertices reachable from `initial` but not via single-tail edges alone.

    Members are outside the initial set by construction, since the singleton
    restriction closure contains the initial set.
    """
    full = closure(h, initial).reached
    solo = closure(singleton_restriction(h), initial).reached
    return CapabilitySet(h.n, full.bits & ~initial.bits & ~solo.bits)


def boundary(h: CapabilityHypergraph, initial: CapabilitySet) -> list[BoundaryEntry]:
    """All edges whose tail misses exactly one vertex of the closure,
    in ascending edge id order."""
    reached = closure(h, initial).reached.bits
    entries = []
    for e in h.edges:
        miss = e.tail.bits & ~reached
        if miss and miss & (miss - 1) == 0:
            entries.append(BoundaryEntry(edge_id=e.edge_id, missing=miss.bit_length() - 1))
    return entries


def _frontier_bits(
    h: CapabilityHypergraph,
    reached_bits: int,
    forbidden_bits: int,
    close: Callable[[int], int],
) -> list[tuple[int, int]]:
    """Shared frontier core over raw bitmasks.

    `close` maps a seed mask to its closure mask (injected so callers can
    memoize).  Returns (vertex, witness edge id) pairs in ascending vertex
    order.  A vertex qualifies when it is the single missing tail member of
    some edge, it is not forbidden, its acquisition closure avoids the
    forbidden set, and that closure strictly exceeds reached | {vertex},
    meaning the acquisition actually unlocks a derivation.
    """
    candidates: dict[int, list[int]] = {}
    for e in h.edges:
        miss = e.tail.bits & ~reached_bits
        if miss and miss & (miss - 1) == 0:
            candidates.setdefault(miss.bit_length() - 1, []).append(e.edge_id)
    out = []
    for v in sorted(candidates):
        if (forbidden_bits >> v) & 1:
            continue
        extended = close(reached_bits | 1 << v)
        if extended & forbidden_bits:
            continue
        if extended == reached_bits | 1 << v:
            continue
        witness = min(
            eid for eid in candidates[v] if h.edges[eid].head.bits & ~reached_bits
        )
        out.append((v, witness))
    return out


def near_miss_frontier(
    h: CapabilityHypergraph, initial: CapabilitySet, forbidden: CapabilitySet
) -> list[tuple[int, int]]:
    """Safe one step acquisitions that strictly expand the closure.

    Each result pairs the vertex with a witnessing boundary edge: an edge
    the acquisition completes whose head is not already reached.  Vertices
    in the forbidden set, or whose acquisition makes a forbidden vertex
    reachable, are excluded.
    """
    reached = closure(h, initial).reached.bits

    def close(seed_bits: int) -> int:
        return closure(h, CapabilitySet(h.n, seed_bits)).reached.bits

    return _frontier_bits(h, reached, forbidden.bits, close)


def marginal_gain(
    h: CapabilityHypergraph,
    initial: CapabilitySet,
    vertex: int,
    forbidden: CapabilitySet | None = None,
) -> GainEntry:
    """Closure growth from acquiring one vertex.

    Plain variant counts every newly reachable vertex; with `forbidden`
    given, newly reachable forbidden vertices are not counted.  A vertex
    already in the closure gains nothing.
    """
    if not 0 <= vertex < h.n:
        raise InvalidHypergraph(f"capability id {vertex} out of range for universe of {h.n}")
    base = closure(h, initial).reached
    if vertex in base:
        return GainEntry(vertex=vertex, gain=0)
    extended = closure(h, initial.with_index(vertex)).reached
    if forbidden is None:
        gain = len(extended) - len(base)
    else:
        gain = (extended.bits & ~(base.bits | forbidden.bits)).bit_count()
    return GainEntry(vertex=vertex, gain=gain)


def acquisition_distance(
    h: CapabilityHypergraph,
    initial: CapabilitySet,
    goal: int,
    budget: int = 4,
) -> Exact | LowerBoundExceeded:
    """Minimum number of acquired capabilities before `goal` becomes derivable.

    Candidate sets are drawn from vertices outside the closure and never
    include the goal itself: the goal must be derived, not granted.  Sets
    are enumerated in ascending cardinality, lexicographic within each
    cardinality, and the search stops at `budget`, reporting that the true
    distance exceeds it.
    """
    if not 0 <= goal < h.n:
        raise InvalidHypergraph(f"capability id {goal} out of range for universe of {h.n}")
    reached = closure(h, initial).reached
    if goal in reached:
        return Exact(distance=0)
    pool = [v for v in range(h.n) if v not in reached and v != goal]
    for size in range(1, budget + 1):
        for combo in combinations(pool, size):
            seed = CapabilitySet(h.n, initial.bits | sum(1 << v for v in combo))
            if goal in closure(h, seed).reached:
                return Exact(distance=size)
    return LowerBoundExceeded(budget=budget)


def greedy_acquire(
    h: CapabilityHypergraph,
    initial: CapabilitySet,
    k: int,
    forbidden: CapabilitySet | None = None,
) -> list[GainEntry]:
    """Pick up to k acquisitions, each maximising marginal closure gain.

    Ties break on the lowest vertex index.  With `forbidden` given,
    forbidden vertices and vertices whose acquisition reaches a forbidden
    vertex are never candidates, and gains do not count forbidden vertices.
    Stops early when no candidate remains or every gain is zero.
    """
    chosen: list[GainEntry] = []
    current = initial
    for _ in range(k):
        base = closure(h, current).reached
        best: GainEntry | None = None
        for v in range(h.n):
            if v in base:
                continue
            if forbidden is not None and v in forbidden:
                continue
            extended = closure(h, current.with_index(v)).reached
            if forbidden is not None:
                if extended.bits & forbidden.bits:
                    continue
                gain = (extended.bits & ~(base.bits | forbidden.bits)).bit_count()
            else:
                gain = len(extended) - len(base)
            if best is None or gain > best.gain:
                best = GainEntry(vertex=v, gain=gain)
        if best is None or best.gain == 0:
            break
        chosen.append(best)
        current = current.with_index(best.vertex)
    return chosen
