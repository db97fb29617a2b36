"""Shared fixtures and independent oracles.

Everything here recomputes expected answers from definitions, without
touching the engine internals under test: closures by repeated rule
application and by intersecting closed supersets, reachability by plain
BFS, distances and antichains by subset enumeration.  Tests compare the
package against these oracles rather than against itself.
"""

from __future__ import annotations

import itertools
import random

from capclose.model import (
    CapabilityHypergraph,
    CapabilitySet,
    PairwiseGraph,
    build_hypergraph,
)

TRIP_LABELS = ["c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9", "c10", "c11", "c12"]
TRIP_EDGES = [
    (["c1"], ["c3", "c4", "c6"]),
    (["c2", "c3", "c4"], ["c5"]),
    (["c5", "c6"], ["c7"]),
    (["c5"], ["c8"]),
    (["c7", "c8"], ["c9"]),
    (["c7"], ["c10"]),
    (["c8"], ["c11"]),
    (["c7", "c8", "c10"], ["c12"]),
]

TRIP_ROUNDS = [
    {"c1", "c2"},
    {"c1", "c2", "c3", "c4", "c6"},
    {"c1", "c2", "c3", "c4", "c5", "c6"},
    {"c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8"},
    {"c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9", "c10", "c11"},
    set(TRIP_LABELS),
]


def trip_booking() -> CapabilityHypergraph:
    return build_hypergraph(TRIP_LABELS, TRIP_EDGES)


def joint_escalation() -> CapabilityHypergraph:
    return build_hypergraph(["u1", "u2", "f"], [(["u1", "u2"], ["f"])])


def bits_of(h: CapabilityHypergraph, labels) -> int:
    return h.set_of(labels).bits


def capset(h: CapabilityHypergraph, labels) -> CapabilitySet:
    return h.set_of(labels)


def labels_from_bits(h: CapabilityHypergraph, bits: int) -> set[str]:
    return {h.label_of(i) for i in range(h.n) if bits >> i & 1}


def naive_closure_bits(h: CapabilityHypergraph, bits: int) -> int:
    """Repeated full passes over the rule set until nothing changes."""
    current = bits
    while True:
        nxt = current
        for edge in h.edges:
            if edge.tail.bits & ~current == 0:
                nxt |= edge.head.bits
        if nxt == current:
            return current
        current = nxt


def is_closed(h: CapabilityHypergraph, bits: int) -> bool:
    return all(
        edge.tail.bits & ~bits != 0 or edge.head.bits & ~bits == 0 for edge in h.edges
    )


def moore_closure_bits(h: CapabilityHypergraph, bits: int) -> int:
    """Intersection of every closed superset.  Exponential, small n only."""
    assert h.n <= 12
    acc = (1 << h.n) - 1
    for candidate in range(1 << h.n):
        if candidate & bits == bits and is_closed(h, candidate):
            acc &= candidate
    return acc


def bfs_reach(g: PairwiseGraph, sources: set[int]) -> set[int]:
    seen = set(sources)
    frontier = list(sources)
    while frontier:
        nxt = []
        for u in frontier:
            for a, b in g.arcs:
                if a == u and b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


def replay_trace(h: CapabilityHypergraph, initial_bits: int, trace) -> int | None:
    """Replay a firing sequence by the rules alone.  None when invalid."""
    seen_ids = set()
    current = initial_bits
    for edge_id in trace:
        if edge_id in seen_ids or not 0 <= edge_id < h.m:
            return None
        seen_ids.add(edge_id)
        edge = h.edges[edge_id]
        if edge.tail.bits & ~current != 0:
            return None
        current |= edge.head.bits
    return current


def trace_is_exhaustive(h: CapabilityHypergraph, reached: int, trace) -> bool:
    """No edge that could still add a vertex was left unfired."""
    fired = set(trace)
    for edge in h.edges:
        if edge.edge_id in fired:
            continue
        if edge.tail.bits & ~reached == 0 and edge.head.bits & ~reached != 0:
            return False
    return True


def oracle_frontier_bits(
    h: CapabilityHypergraph, closed_bits: int, forbidden_bits: int
) -> int:
    """Near miss frontier recomputed from the definition."""
    out = 0
    for edge in h.edges:
        missing = edge.tail.bits & ~closed_bits
        if missing == 0 or missing & (missing - 1) != 0:
            continue
        if missing & forbidden_bits:
            continue
        extended = naive_closure_bits(h, closed_bits | missing)
        if extended & forbidden_bits:
            continue
        if extended == closed_bits | missing:
            continue
        out |= missing
    return out


def oracle_safe_states(
    h: CapabilityHypergraph, initial_bits: int, forbidden_bits: int
) -> set[int] | None:
    """All closed states reachable by single frontier acquisitions.

    None when the start itself reaches a forbidden capability.
    """
    start = naive_closure_bits(h, initial_bits)
    if start & forbidden_bits:
        return None
    seen = {start}
    stack = [start]
    while stack:
        state = stack.pop()
        frontier = oracle_frontier_bits(h, state, forbidden_bits)
        for v in range(h.n):
            if frontier >> v & 1:
                nxt = naive_closure_bits(h, state | 1 << v)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return seen


def brute_distance(
    h: CapabilityHypergraph, initial_bits: int, goal: int, budget: int
) -> int | None:
    """Smallest acquisition count by plain subset enumeration."""
    base = naive_closure_bits(h, initial_bits)
    if base >> goal & 1:
        return 0
    pool = [v for v in range(h.n) if not base >> v & 1 and v != goal]
    for size in range(1, budget + 1):
        for combo in itertools.combinations(pool, size):
            seed = initial_bits
            for v in combo:
                seed |= 1 << v
            if naive_closure_bits(h, seed) >> goal & 1:
                return size
    return None


def brute_unsafe_antichain(
    h: CapabilityHypergraph, forbidden_bits: int
) -> list[int]:
    """Minimal unsafe subsets by full enumeration.  Small n only."""
    assert h.n <= 12
    unsafe = [
        s for s in range(1 << h.n) if naive_closure_bits(h, s) & forbidden_bits
    ]
    minimal = []
    for s in unsafe:
        if not any(t != s and t & ~s == 0 for t in unsafe):
            minimal.append(s)
    return minimal


def brute_best_gain(
    h: CapabilityHypergraph, initial_bits: int, k: int
) -> int:
    """Best closure size over every acquisition set of at most k vertices."""
    base = naive_closure_bits(h, initial_bits)
    pool = [v for v in range(h.n) if not base >> v & 1]
    best = bin(base).count("1")
    for size in range(1, min(k, len(pool)) + 1):
        for combo in itertools.combinations(pool, size):
            seed = initial_bits
            for v in combo:
                seed |= 1 << v
            best = max(best, bin(naive_closure_bits(h, seed)).count("1"))
    return best


def eval_circuit_oracle(gates, output: int, assignment) -> bool:
    """Direct recursive circuit evaluation, independent of the package."""
    values: dict[int, bool] = {}
    inputs = iter(assignment)

    def value(i: int) -> bool:
        if i not in values:
            gate = gates[i]
            if gate.kind == "input":
                raise AssertionError("inputs are preassigned")
            a, b = (value(j) for j in gate.inputs)
            values[i] = a and b if gate.kind == "and" else a or b
        return values[i]

    for i, gate in enumerate(gates):
        if gate.kind == "input":
            values[i] = bool(next(inputs))
    return value(output)


def is_transversal(edges, candidate: frozenset) -> bool:
    return all(candidate & set(edge) for edge in edges)


def is_minimal_transversal(edges, candidate: frozenset) -> bool:
    if not is_transversal(edges, candidate):
        return False
    return all(
        not is_transversal(edges, candidate - {x}) for x in candidate
    )


def random_hypergraph(
    rng: random.Random,
    n: int,
    m: int,
    max_tail: int,
    allow_axioms: bool = False,
) -> CapabilityHypergraph:
    labels = [f"x{i}" for i in range(n)]
    edges = []
    for _ in range(m):
        axiom = allow_axioms and (rng.random() < 0.15 or n < 2)
        if n < 2 and not axiom:
            continue
        tail_size = 0 if axiom else rng.randint(1, min(max_tail, n - 1))
        tail = rng.sample(range(n), tail_size)
        rest = [v for v in range(n) if v not in tail]
        head = rng.sample(rest, rng.randint(1, min(2, len(rest))))
        edges.append(([labels[v] for v in tail], [labels[v] for v in head]))
    return build_hypergraph(labels, edges)


def random_bits(rng: random.Random, n: int, density: float = 0.3) -> int:
    bits = 0
    for v in range(n):
        if rng.random() < density:
            bits |= 1 << v
    return bits


def random_circuit(rng: random.Random, n_inputs: int, n_internal: int):
    """Random monotone circuit as plain (kind, inputs) gate rows."""
    gates = [("input", ())] * n_inputs
    for i in range(n_inputs, n_inputs + n_internal):
        a, b = rng.sample(range(i), 2)
        gates.append((rng.choice(("and", "or")), (a, b)))
    return gates, n_inputs + n_internal - 1


def planted_corpus(rng: random.Random, total: int, prevalence: float):
    """Trajectory rows with a known fraction of genuine joint dependencies.

    Returns (rows, planted_count).  Each row is (id, events, terminal).
    Conjunctive rows deliver both parts of the pair before the terminal,
    the rest deliver one part plus noise that never completes the pair.
    """
    rows = []
    planted = 0
    for i in range(total):
        tid = f"t{i}"
        noise = [(f"n{rng.randint(0, 9)}", 10 * j) for j in range(rng.randint(0, 3))]
        if rng.random() < prevalence:
            planted += 1
            events = sorted(noise + [("p", 40), ("q", 50)], key=lambda e: e[1])
            events.append(("z", 100))
            rows.append((tid, tuple(events), "z"))
        else:
            events = sorted(noise + [("p", 40)], key=lambda e: e[1])
            events.append(("z", 100))
            rows.append((tid, tuple(events), "z"))
    return rows, planted


def eager_violations_oracle(h: CapabilityHypergraph, initial_bits: int, schedule) -> bool:
    """Whether a planner that fires on any tail member breaks a joint rule."""
    rounds: dict[int, int] = {}
    for v, t in schedule:
        rounds[t] = rounds.get(t, 0) | 1 << v
    have = initial_bits
    fired = set()
    violated = False

    def drain(current: int) -> int:
        nonlocal violated
        progress = True
        while progress:
            progress = False
            for edge in h.edges:
                if edge.edge_id in fired:
                    continue
                if edge.tail.bits == 0 or edge.tail.bits & current:
                    if edge.tail_size >= 2 and edge.tail.bits & ~current != 0:
                        violated = True
                    fired.add(edge.edge_id)
                    current |= edge.head.bits
                    progress = True
        return current

    have = drain(have)
    for t in sorted(rounds):
        have = drain(have | rounds[t])
    return violated
