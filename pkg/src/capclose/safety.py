"""Safety containment, minimal unsafe coalitions, gating, audits, and goal
classification.

A capability set is contained when its closure avoids every forbidden
vertex.  Containment is not compositional: individually contained agents
can jointly reach a forbidden capability, so coalition checks must consult
the antichain of minimal unsafe sets rather than per-agent verdicts.  The
safe region is downward closed and intersection closed, which is what makes
that antichain a sound and complete gate once it is exhaustive.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .closure import DerivationCertificate, certificate_for, closure
from .discovery import GainEntry, _frontier_bits, emergent, near_miss_frontier
from .model import (
    CapabilityHypergraph,
    CapabilitySet,
    InvalidHypergraph,
    UniverseMismatch,
)

MAX_UNIVERSE_FOR_ANTICHAIN = 24


class NonExhaustiveAntichain(ValueError):
    """Raised when a coalition gate is asked to trust a partial antichain."""


class UnsafeStart(ValueError):
    """Raised when an operation requires a contained initial set and is not given one."""


class ForbiddenGoal(ValueError):
    """Raised when the classification goal is itself forbidden."""


class UniverseTooLarge(ValueError):
    """Raised when antichain enumeration would scan more subsets than allowed."""


def is_contained(
    h: CapabilityHypergraph, initial: CapabilitySet, forbidden: CapabilitySet
) -> bool:
    """True when the closure of `initial` avoids every forbidden vertex."""
    if forbidden.n != h.n:
        raise UniverseMismatch(f"forbidden set universe {forbidden.n} != hypergraph universe {h.n}")
    return closure(h, initial).reached.bits & forbidden.bits == 0


@dataclass(frozen=True)
class AntichainB:
    """The minimal unsafe sets for a forbidden specification.

    Every member reaches a forbidden vertex while each of its proper
    subsets is contained; no member contains another.  `exhaustive` is True
    only when the enumeration provably covered every unsafe set.
    """

    forbidden: CapabilitySet
    sets: tuple[CapabilitySet, ...]
    exhaustive: bool


def minimal_unsafe_antichain(
    h: CapabilityHypergraph,
    forbidden: CapabilitySet,
    max_card: int | None = None,
    force: bool = False,
) -> AntichainB:
    """Enumerate minimal unsafe sets level by level up to `max_card`.

    Candidates of each cardinality are scanned in lexicographic order;
    supersets of already found members are pruned, so anything unsafe that
    survives the pruning is minimal by construction.  The result is marked
    exhaustive only when `max_card` reaches the universe size or no unsafe
    set exists at all; minimal unsafe sets can skip cardinality levels, so
    no cheaper stabilisation rule is sound.

    Refuses universes larger than MAX_UNIVERSE_FOR_ANTICHAIN unless `force`
    is set: the scan visits up to 2**n subsets.
    """
    if forbidden.n != h.n:
        raise UniverseMismatch(f"forbidden set universe {forbidden.n} != hypergraph universe {h.n}")
    n = h.n
    if n > MAX_UNIVERSE_FOR_ANTICHAIN and not force:
        raise UniverseTooLarge(
            f"universe of {n} exceeds the antichain enumeration cap of "
            f"{MAX_UNIVERSE_FOR_ANTICHAIN}; pass force=True to override"
        )
    if max_card is None:
        max_card = n
    if max_card < 0:
        raise InvalidHypergraph("max_card must be non-negative")

    if closure(h, CapabilitySet.full(n)).reached.bits & forbidden.bits == 0:
        return AntichainB(forbidden=forbidden, sets=(), exhaustive=True)

    member_bits: list[int] = []
    for card in range(0, min(max_card, n) + 1):
        for combo in combinations(range(n), card):
            bits = 0
            for v in combo:
                bits |= 1 << v
            if any(mb & bits == mb for mb in member_bits):
                continue
            if closure(h, CapabilitySet(n, bits)).reached.bits & forbidden.bits:
                member_bits.append(bits)
    return AntichainB(
        forbidden=forbidden,
        sets=tuple(CapabilitySet(n, bits) for bits in member_bits),
        exhaustive=max_card >= n,
    )


@dataclass(frozen=True)
class Safe:
    pass


@dataclass(frozen=True)
class Unsafe:
    """witness is the minimal unsafe set the coalition's pooled capabilities cover."""

    witness: CapabilitySet


def coalition_gate(antichain: AntichainB, agents: Sequence[CapabilitySet]) -> Safe | Unsafe:
    """Decide whether pooled agent capabilities cover any minimal unsafe set.

    Sound and complete only for an exhaustive antichain, so anything else
    is rejected outright.  The check never recomputes a closure: it is pure
    subset testing against the antichain, which is the point of computing
    the antichain offline.
    """
    if not antichain.exhaustive:
        raise NonExhaustiveAntichain(
            "coalition gate requires an exhaustive antichain; recompute with max_card = n"
        )
    union = 0
    for a in agents:
        if a.n != antichain.forbidden.n:
            raise UniverseMismatch(
                f"agent universe {a.n} != antichain universe {antichain.forbidden.n}"
            )
        union |= a.bits
    for member in antichain.sets:
        if member.bits & ~union == 0:
            return Unsafe(witness=member)
    return Safe()


def maximal_safe_coalitions(
    h: CapabilityHypergraph,
    forbidden: CapabilitySet,
    agents: Sequence[CapabilitySet],
) -> list[tuple[int, ...]]:
    """All inclusion maximal index sets whose pooled capabilities stay contained.

    Requires each agent to be individually contained.  Enumerates coalitions
    by descending size; a coalition dominated by an already collected safe
    coalition is skipped, so everything collected is maximal.
    """
    for i, a in enumerate(agents):
        if not is_contained(h, a, forbidden):
            raise UnsafeStart(f"agent {i} is not contained on its own")
    collected: list[frozenset[int]] = []
    out: list[tuple[int, ...]] = []
    for size in range(len(agents), -1, -1):
        for combo in combinations(range(len(agents)), size):
            members = frozenset(combo)
            if any(members < bigger for bigger in collected):
                continue
            union = 0
            for i in combo:
                union |= agents[i].bits
            if closure(h, CapabilitySet(h.n, union)).reached.bits & forbidden.bits == 0:
                collected.append(members)
                out.append(combo)
    out.sort()
    return out


@dataclass(frozen=True)
class AuditSurface:
    """What an overseer should look at for a contained initial set.

    safe_emergent: emergent capabilities outside the forbidden set, each
    with a replayable derivation certificate.  frontier: safe one step
    acquisitions paired with their witnessing boundary edge.  top_gains:
    the k best candidates by forbidden filtered closure gain, excluding
    candidates whose acquisition reaches a forbidden vertex.
    """

    safe_emergent: CapabilitySet
    certificates: Mapping[int, DerivationCertificate]
    frontier: tuple[tuple[int, int], ...]
    top_gains: tuple[GainEntry, ...]


def audit_surface(
    h: CapabilityHypergraph,
    initial: CapabilitySet,
    forbidden: CapabilitySet,
    top_k: int,
) -> AuditSurface:
    if not is_contained(h, initial, forbidden):
        raise UnsafeStart("initial set already reaches a forbidden capability")
    reached = closure(h, initial).reached
    emg = emergent(h, initial)
    safe_emergent = CapabilitySet(h.n, emg.bits & ~forbidden.bits)
    certificates = {}
    for v in safe_emergent:
        cert = certificate_for(h, initial, v)
        assert cert is not None
        certificates[v] = cert
    frontier = tuple(near_miss_frontier(h, initial, forbidden))
    gains: list[GainEntry] = []
    for v in range(h.n):
        if v in reached or v in forbidden:
            continue
        extended = closure(h, initial.with_index(v)).reached
        if extended.bits & forbidden.bits:
            continue
        gains.append(
            GainEntry(vertex=v, gain=(extended.bits & ~(reached.bits | forbidden.bits)).bit_count())
        )
    gains.sort(key=lambda g: (-g.gain, g.vertex))
    return AuditSurface(
        safe_emergent=safe_emergent,
        certificates=certificates,
        frontier=frontier,
        top_gains=tuple(gains[:top_k]),
    )


@dataclass(frozen=True)
class AlreadyReachable:
    pass


@dataclass(frozen=True)
class SafelyAcquirable:
    """path lists the acquired vertices in order; every prefix stays contained."""

    path: tuple[int, ...]


@dataclass(frozen=True)
class StructurallyUnsafe:
    """The frontier step search space was exhausted without reaching the goal."""

    states_explored: int


@dataclass(frozen=True)
class BudgetExceeded:
    states_explored: int


def classify_goal(
    h: CapabilityHypergraph,
    initial: CapabilitySet,
    forbidden: CapabilitySet,
    goal: int,
    state_budget: int = 100_000,
) -> AlreadyReachable | SafelyAcquirable | StructurallyUnsafe | BudgetExceeded:
    """Classify a goal vertex for a contained initial set.

    Breadth first search over capability states where each successor adds
    one frontier vertex: a safe acquisition that unlocks at least one new
    derivation.  Closures are memoized by state, states are deduplicated,
    and exploration stops at `state_budget` materialised states.  The
    search either finds the goal already reachable, returns the acquisition
    path that reaches it, proves the frontier step space exhausted, or
    gives up at the budget.
    """
    if not 0 <= goal < h.n:
        raise InvalidHypergraph(f"capability id {goal} out of range for universe of {h.n}")
    if goal in forbidden:
        raise ForbiddenGoal(f"goal {h.label_of(goal)!r} is forbidden")
    if not is_contained(h, initial, forbidden):
        raise UnsafeStart("initial set already reaches a forbidden capability")

    memo: dict[int, int] = {}

    def close(seed_bits: int) -> int:
        reached = memo.get(seed_bits)
        if reached is None:
            reached = closure(h, CapabilitySet(h.n, seed_bits)).reached.bits
            memo[seed_bits] = reached
        return reached

    start = initial.bits
    if close(start) >> goal & 1:
        return AlreadyReachable()

    parents: dict[int, tuple[int, int] | None] = {start: None}
    queue: deque[int] = deque([start])
    explored = 1

    def path_to(state: int) -> tuple[int, ...]:
        steps: list[int] = []
        cursor = state
        while True:
            link = parents[cursor]
            if link is None:
                return tuple(reversed(steps))
            cursor, vertex = link
            steps.append(vertex)

    while queue:
        state = queue.popleft()
        reached = close(state)
        for v, _witness in _frontier_bits(h, reached, forbidden.bits, close):
            successor = state | 1 << v
            if successor in parents:
                continue
            explored += 1
            if explored > state_budget:
                return BudgetExceeded(states_explored=explored)
            parents[successor] = (state, v)
            if close(successor) >> goal & 1:
                return SafelyAcquirable(path=path_to(successor))
            queue.append(successor)
    return StructurallyUnsafe(states_explored=explored)


def antichain_doc(h: CapabilityHypergraph, antichain: AntichainB) -> dict:
    """Render an antichain to its JSON document form, labels by index order."""
    return {
        "forbidden": h.labels_of(antichain.forbidden),
        "exhaustive": antichain.exhaustive,
        "minimal_unsafe": [h.labels_of(member) for member in antichain.sets],
    }


def parse_antichain_doc(doc: dict) -> tuple[tuple[str, ...], bool, tuple[tuple[str, ...], ...]]:
    """Parse the persisted antichain form: (forbidden labels, exhaustive, members).

    Standalone on purpose: the coalition gate runs without the hypergraph.
    """
    if not isinstance(doc, dict):
        raise InvalidHypergraph("antichain document must be a JSON object")
    forbidden = doc.get("forbidden")
    exhaustive = doc.get("exhaustive")
    members = doc.get("minimal_unsafe")
    if not isinstance(forbidden, list) or not isinstance(members, list) or not isinstance(exhaustive, bool):
        raise InvalidHypergraph(
            'antichain document needs "forbidden", "exhaustive", and "minimal_unsafe"'
        )
    return (
        tuple(forbidden),
        exhaustive,
        tuple(tuple(member) for member in members),
    )
