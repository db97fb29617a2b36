"""Core domain model: capability universes, hyperedges, and hypergraphs.

A capability hypergraph is a finite universe of labelled capabilities plus
composition rules (directed hyperedges).  An edge fires once every capability
in its tail is available, at which point every capability in its head becomes
available too.  An edge with an empty tail is an axiom: it fires
unconditionally.

Capabilities are interned to dense integer indices at construction time;
labels are presentation only.  Sets of capabilities are stored as integer
bitmasks, so subset tests and unions in the solvers are single int ops.
Every value in this module is immutable after construction and safe to share
between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator


class InvalidHypergraph(ValueError):
    """Raised when labels or edges fail validation."""


class UniverseMismatch(ValueError):
    """Raised when values built over different universes are combined."""


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the set bit positions of a mask in ascending order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


@dataclass(frozen=True)
class CapabilitySet:
    """An immutable set of capability indices over a universe of size `n`.

    Backed by an int bitmask.  All binary operations require both operands
    to share the same universe size and raise UniverseMismatch otherwise.
    """

    n: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InvalidHypergraph("universe size must be non-negative")
        if self.bits < 0 or self.bits >> self.n:
            raise InvalidHypergraph("capability id out of range for universe")

    @classmethod
    def of(cls, n: int, indices: Iterable[int]) -> CapabilitySet:
        mask = 0
        for i in indices:
            if not 0 <= i < n:
                raise InvalidHypergraph(f"capability id {i} out of range for universe of {n}")
            mask |= 1 << i
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> CapabilitySet:
        return cls(n, (1 << n) - 1)

    def _check(self, other: CapabilitySet) -> None:
        if self.n != other.n:
            raise UniverseMismatch(f"universe sizes differ: {self.n} != {other.n}")

    def __contains__(self, index: int) -> bool:
        return 0 <= index < self.n and bool(self.bits >> index & 1)

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __or__(self, other: CapabilitySet) -> CapabilitySet:
        self._check(other)
        return CapabilitySet(self.n, self.bits | other.bits)

    def __and__(self, other: CapabilitySet) -> CapabilitySet:
        self._check(other)
        return CapabilitySet(self.n, self.bits & other.bits)

    def __sub__(self, other: CapabilitySet) -> CapabilitySet:
        self._check(other)
        return CapabilitySet(self.n, self.bits & ~other.bits)

    def issubset(self, other: CapabilitySet) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: CapabilitySet) -> bool:
        self._check(other)
        return self.bits & other.bits == 0

    def with_index(self, index: int) -> CapabilitySet:
        """Return a copy with one more capability added."""
        if not 0 <= index < self.n:
            raise InvalidHypergraph(f"capability id {index} out of range for universe of {self.n}")
        return CapabilitySet(self.n, self.bits | 1 << index)

    def indices(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.bits))


@dataclass(frozen=True)
class Hyperedge:
    """A composition rule: `tail` jointly enables everything in `head`.

    `edge_id` is the edge's position in its owning hypergraph.  Tail and
    head are disjoint and the head is never empty; an empty tail marks an
    axiom edge.
    """

    edge_id: int
    tail: CapabilitySet
    head: CapabilitySet

    @property
    def tail_size(self) -> int:
        return len(self.tail)

    @property
    def is_axiom(self) -> bool:
        return self.tail.bits == 0


@dataclass(frozen=True)
class CapabilityHypergraph:
    """Immutable capability hypergraph with per-vertex tail incidence index.

    `tail_index[v]` lists the ids of edges whose tail contains vertex v, and
    `tail_sizes[e]` caches each edge's tail cardinality; both are derived
    from `edges` and excluded from equality.  Construct through
    build_hypergraph, embed_graph, or load_hypergraph rather than directly.
    """

    labels: tuple[str, ...]
    edges: tuple[Hyperedge, ...]
    tail_index: tuple[tuple[int, ...], ...] = field(compare=False, repr=False)
    tail_sizes: tuple[int, ...] = field(compare=False, repr=False)
    label_index: dict[str, int] = field(compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        return len(self.edges)

    def index_of(self, label: str) -> int:
        try:
            return self.label_index[label]
        except KeyError:
            raise InvalidHypergraph(f"unknown capability label {label!r}") from None

    def label_of(self, index: int) -> str:
        if not 0 <= index < self.n:
            raise InvalidHypergraph(f"capability id {index} out of range for universe of {self.n}")
        return self.labels[index]

    def set_of(self, labels: Iterable[str]) -> CapabilitySet:
        return CapabilitySet.of(self.n, (self.index_of(lb) for lb in labels))

    def labels_of(self, capset: CapabilitySet) -> list[str]:
        if capset.n != self.n:
            raise UniverseMismatch(f"universe sizes differ: {capset.n} != {self.n}")
        return [self.labels[i] for i in capset]

    def export(self) -> dict:
        """Render to the canonical JSON document form.

        Vertices appear in first-seen order, edges in normalised order,
        and tails/heads sorted by vertex index, so the output is
        byte-stable for structurally equal hypergraphs.
        """
        return {
            "vertices": list(self.labels),
            "edges": [
                {"tail": self.labels_of(e.tail), "head": self.labels_of(e.head)}
                for e in self.edges
            ],
        }


def _assemble(labels: tuple[str, ...], pairs: Iterable[tuple[int, int]]) -> CapabilityHypergraph:
    """Build a hypergraph from interned labels and (tail_bits, head_bits) pairs.

    Normalisation: exact duplicate edges are dropped, first occurrence wins,
    and edge ids are assigned in that surviving order.
    """
    n = len(labels)
    seen: set[tuple[int, int]] = set()
    edges: list[Hyperedge] = []
    for tail_bits, head_bits in pairs:
        if tail_bits >> n or head_bits >> n or tail_bits < 0 or head_bits < 0:
            raise InvalidHypergraph("edge references capability id out of range")
        if head_bits == 0:
            raise InvalidHypergraph("edge head must not be empty")
        if tail_bits & head_bits:
            raise InvalidHypergraph("edge tail and head must be disjoint")
        key = (tail_bits, head_bits)
        if key in seen:
            continue
        seen.add(key)
        edges.append(
            Hyperedge(
                edge_id=len(edges),
                tail=CapabilitySet(n, tail_bits),
                head=CapabilitySet(n, head_bits),
            )
        )
    incidence: list[list[int]] = [[] for _ in range(n)]
    for e in edges:
        for v in e.tail:
            incidence[v].append(e.edge_id)
    return CapabilityHypergraph(
        labels=labels,
        edges=tuple(edges),
        tail_index=tuple(tuple(ids) for ids in incidence),
        tail_sizes=tuple(e.tail_size for e in edges),
        label_index={lb: i for i, lb in enumerate(labels)},
    )


def build_hypergraph(
    labels: Iterable[str],
    raw_edges: Iterable[tuple[Iterable[str], Iterable[str]]],
) -> CapabilityHypergraph:
    """Validate labels and label-level edges, intern, and assemble.

    Labels must be unique non-empty strings; their order becomes the index
    order.  Each raw edge is a (tail labels, head labels) pair.  Rejects
    unknown labels, empty heads, and tail/head overlap (which also covers
    heads contained in tails) instead of silently dropping them.
    """
    label_tuple = tuple(labels)
    index: dict[str, int] = {}
    for lb in label_tuple:
        if not isinstance(lb, str) or not lb:
            raise InvalidHypergraph(f"capability label must be a non-empty string, got {lb!r}")
        if lb in index:
            raise InvalidHypergraph(f"duplicate capability label {lb!r}")
        index[lb] = len(index)

    def to_bits(side: Iterable[str]) -> int:
        mask = 0
        for lb in side:
            if lb not in index:
                raise InvalidHypergraph(f"unknown capability label {lb!r}")
            mask |= 1 << index[lb]
        return mask

    pairs = [(to_bits(tail), to_bits(head)) for tail, head in raw_edges]
    return _assemble(label_tuple, pairs)


@dataclass(frozen=True)
class PairwiseGraph:
    """A plain directed graph, the degenerate one-to-one rule system."""

    n: int
    arcs: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arcs", frozenset(self.arcs))
        for u, v in self.arcs:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidHypergraph(f"arc ({u}, {v}) out of range for {self.n} vertices")
            if u == v:
                raise InvalidHypergraph(f"self-loop ({u}, {v}) not allowed")


def embed_graph(g: PairwiseGraph, labels: Iterable[str] | None = None) -> CapabilityHypergraph:
    """Embed a pairwise graph as a hypergraph of singleton edges.

    Each arc (u, v) becomes the edge ({u}, {v}), so closure coincides with
    plain reachability.  Labels default to v0..v{n-1}.
    """
    label_tuple = tuple(labels) if labels is not None else tuple(f"v{i}" for i in range(g.n))
    if len(label_tuple) != g.n:
        raise InvalidHypergraph(f"expected {g.n} labels, got {len(label_tuple)}")
    validated = build_hypergraph(label_tuple, [])
    pairs = [(1 << u, 1 << v) for u, v in sorted(g.arcs)]
    return _assemble(validated.labels, pairs)


def singleton_restriction(h: CapabilityHypergraph) -> CapabilityHypergraph:
    """Keep only edges whose tail has exactly one member.

    Axiom edges do not survive the restriction: a tail of size one is
    required verbatim.  Edge ids are re-assigned densely in the surviving
    order.
    """
    pairs = [(e.tail.bits, e.head.bits) for e in h.edges if e.tail_size == 1]
    return _assemble(h.labels, pairs)


def load_hypergraph(doc: dict) -> CapabilityHypergraph:
    """Build a hypergraph from a parsed JSON document.

    Expected shape: {"vertices": [...], "edges": [{"tail": [...], "head": [...]}]}.
    """
    if not isinstance(doc, dict):
        raise InvalidHypergraph("hypergraph document must be a JSON object")
    vertices = doc.get("vertices")
    edges = doc.get("edges")
    if not isinstance(vertices, list) or not isinstance(edges, list):
        raise InvalidHypergraph('hypergraph document needs "vertices" and "edges" lists')
    raw_edges = []
    for entry in edges:
        if not isinstance(entry, dict) or "tail" not in entry or "head" not in entry:
            raise InvalidHypergraph('each edge needs "tail" and "head" label lists')
        raw_edges.append((entry["tail"], entry["head"]))
    return build_hypergraph(vertices, raw_edges)
