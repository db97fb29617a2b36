from __future__ import annotations

import random

import pytest

import support
from capclose.model import (
    CapabilitySet,
    InvalidHypergraph,
    PairwiseGraph,
    UniverseMismatch,
    build_hypergraph,
    embed_graph,
    load_hypergraph,
    singleton_restriction,
)


class TestCapabilitySet:
    def test_of_and_contains(self):
        s = CapabilitySet.of(5, [0, 3])
        assert 0 in s and 3 in s
        assert 1 not in s and 5 not in s and -1 not in s
        assert len(s) == 2
        assert list(s) == [0, 3]
        assert s.indices() == (0, 3)

    def test_full_and_empty(self):
        assert CapabilitySet.full(3).bits == 0b111
        assert not CapabilitySet(3)
        assert CapabilitySet.of(3, [1])

    def test_set_algebra(self):
        a = CapabilitySet.of(4, [0, 1])
        b = CapabilitySet.of(4, [1, 2])
        assert (a | b).indices() == (0, 1, 2)
        assert (a & b).indices() == (1,)
        assert (a - b).indices() == (0,)
        assert a.issubset(a | b)
        assert not a.issubset(b)
        assert a.isdisjoint(CapabilitySet.of(4, [3]))
        assert not a.isdisjoint(b)
        assert a.with_index(3).indices() == (0, 1, 3)

    def test_universe_mismatch(self):
        a = CapabilitySet.of(4, [0])
        b = CapabilitySet.of(5, [0])
        for op in (lambda: a | b, lambda: a & b, lambda: a - b,
                   lambda: a.issubset(b), lambda: a.isdisjoint(b)):
            with pytest.raises(UniverseMismatch):
                op()

    def test_out_of_range(self):
        with pytest.raises(InvalidHypergraph):
            CapabilitySet.of(3, [3])
        with pytest.raises(InvalidHypergraph):
            CapabilitySet(3, 1 << 3)
        with pytest.raises(InvalidHypergraph):
            CapabilitySet.of(3, [0]).with_index(5)


class TestBuildHypergraph:
    def test_basic_shape(self, trip):
        assert trip.n == 12
        assert trip.m == 8
        assert trip.index_of("c1") == 0
        assert trip.label_of(11) == "c12"
        assert trip.edges[1].tail.indices() == (1, 2, 3)
        assert trip.edges[1].head.indices() == (4,)
        assert trip.tail_sizes == (1, 3, 2, 1, 2, 1, 1, 3)

    def test_tail_index(self, trip):
        c5 = trip.index_of("c5")
        assert trip.tail_index[c5] == (2, 3)

    def test_duplicate_label_rejected(self):
        with pytest.raises(InvalidHypergraph):
            build_hypergraph(["a", "a"], [])

    def test_empty_label_rejected(self):
        with pytest.raises(InvalidHypergraph):
            build_hypergraph(["a", ""], [])

    def test_unknown_label_rejected(self):
        with pytest.raises(InvalidHypergraph):
            build_hypergraph(["a"], [(["b"], ["a"])])

    def test_empty_head_rejected(self):
        with pytest.raises(InvalidHypergraph):
            build_hypergraph(["a", "b"], [(["a"], [])])

    def test_overlapping_tail_head_rejected(self):
        with pytest.raises(InvalidHypergraph):
            build_hypergraph(["a", "b"], [(["a", "b"], ["b"])])

    def test_axiom_edge_allowed(self):
        h = build_hypergraph(["a", "b"], [([], ["a"])])
        assert h.edges[0].is_axiom
        assert h.edges[0].tail_size == 0

    def test_exact_duplicates_collapse_first_wins(self):
        h = build_hypergraph(
            ["a", "b", "c"],
            [(["a"], ["b"]), (["a"], ["c"]), (["a"], ["b"])],
        )
        assert h.m == 2
        assert h.edges[0].head.indices() == (1,)
        assert h.edges[1].head.indices() == (2,)

    def test_label_order_is_index_order(self):
        h = build_hypergraph(["z", "a", "m"], [])
        assert [h.index_of(lb) for lb in ("z", "a", "m")] == [0, 1, 2]

    def test_set_of_and_labels_of_roundtrip(self, trip):
        s = trip.set_of(["c2", "c7"])
        assert trip.labels_of(s) == ["c2", "c7"]
        with pytest.raises(InvalidHypergraph):
            trip.set_of(["c2", "nope"])
        with pytest.raises(UniverseMismatch):
            trip.labels_of(CapabilitySet.of(3, [0]))


class TestExportLoad:
    def test_roundtrip(self, trip):
        doc = trip.export()
        again = load_hypergraph(doc)
        assert again == trip
        assert again.export() == doc

    def test_export_sorts_sides_by_index(self):
        h = build_hypergraph(["b", "a", "c"], [(["c", "a"], ["b"])])
        doc = h.export()
        assert doc["vertices"] == ["b", "a", "c"]
        assert doc["edges"] == [{"tail": ["a", "c"], "head": ["b"]}]

    def test_load_rejects_malformed(self):
        with pytest.raises(InvalidHypergraph):
            load_hypergraph([])
        with pytest.raises(InvalidHypergraph):
            load_hypergraph({"vertices": ["a"]})
        with pytest.raises(InvalidHypergraph):
            load_hypergraph({"vertices": ["a"], "edges": [{"tail": ["a"]}]})


class TestPairwiseGraph:
    def test_validation(self):
        with pytest.raises(InvalidHypergraph):
            PairwiseGraph(2, frozenset({(0, 0)}))
        with pytest.raises(InvalidHypergraph):
            PairwiseGraph(2, frozenset({(0, 2)}))

    def test_embed_structure(self):
        g = PairwiseGraph(3, frozenset({(0, 1), (1, 2)}))
        h = embed_graph(g)
        assert h.labels == ("v0", "v1", "v2")
        assert h.m == 2
        assert all(e.tail_size == 1 and len(e.head) == 1 for e in h.edges)

    def test_embed_custom_labels(self):
        g = PairwiseGraph(2, frozenset({(1, 0)}))
        h = embed_graph(g, ["left", "right"])
        assert h.edges[0].tail.indices() == (1,)
        with pytest.raises(InvalidHypergraph):
            embed_graph(g, ["only-one"])

    def test_embed_matches_bfs(self):
        rng = random.Random(7)
        for _ in range(50):
            n = rng.randint(1, 6)
            arcs = frozenset(
                (u, v)
                for u in range(n)
                for v in range(n)
                if u != v and rng.random() < 0.3
            )
            g = PairwiseGraph(n, arcs)
            h = embed_graph(g)
            for src_bits in range(1 << n):
                sources = {v for v in range(n) if src_bits >> v & 1}
                expect = support.bfs_reach(g, sources)
                got = support.naive_closure_bits(h, src_bits)
                assert {v for v in range(n) if got >> v & 1} == expect


class TestSingletonRestriction:
    def test_keeps_only_unit_tails(self, trip):
        r = singleton_restriction(trip)
        assert r.m == 4
        assert [e.tail.indices() for e in r.edges] == [(0,), (4,), (6,), (7,)]
        assert [e.edge_id for e in r.edges] == [0, 1, 2, 3]

    def test_axiom_edges_do_not_survive(self):
        h = build_hypergraph(["a", "b"], [([], ["a"]), (["a"], ["b"])])
        r = singleton_restriction(h)
        assert r.m == 1
        assert r.edges[0].tail.indices() == (0,)
