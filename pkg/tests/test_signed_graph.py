import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csg.signed_graph import (
    EmptyGraphError,
    IngestError,
    SignedEdge,
    SignedGraph,
    common_neighbors,
    edge_counts,
    ingest,
    ingest_file,
    parse_records,
    read_graph,
    to_edge_list_text,
    write_graph,
)

from oracles import brute_common, random_signed_graph


def test_symmetrized_duplicates_merge():
    g, rep, _ = ingest([(0, 1, 3.0), (1, 0, 5.0)])
    assert g.edges == (SignedEdge(0, 1, 1),)
    assert rep.duplicates_merged == 1 and rep.conflicts == 0


def test_conflicting_orientations_dropped():
    with pytest.raises(EmptyGraphError):
        ingest([(0, 1, 2.0), (1, 0, -4.0)])
    g, rep, _ = ingest([(0, 1, 2.0), (1, 0, -4.0), (1, 2, -1.0)])
    assert rep.conflicts == 1
    assert edge_counts(g) == (1, 0, 1)


def test_zero_weight_and_self_loops_dropped():
    g, rep, id_map = ingest([(5, 5, 1), (5, 9, 0), (9, 7, -3), (7, 5, 2)])
    assert rep.dropped_self_loops == 1
    assert rep.dropped_zero_weight == 1
    # first appearance order over the raw stream: 5, 9, 7
    assert id_map == [5, 9, 7]
    assert g.sign(1, 2) == -1 and g.sign(0, 2) == 1


def test_parse_errors_name_the_line():
    with pytest.raises(IngestError, match="line 3"):
        parse_records(["# header", "1 2 1", "1 x 1"])
    with pytest.raises(IngestError, match="line 1"):
        parse_records(["1 2"])
    with pytest.raises(EmptyGraphError):
        ingest([])


def test_csv_with_trailing_columns(tmp_path):
    p = tmp_path / "raw.csv"
    p.write_text("7188,1,10,1407470400\n430,1,-1,1376539200\n3134,1,10,1369713600\n")
    g, rep, id_map = ingest_file(p)
    assert edge_counts(g) == (3, 2, 1)
    assert rep.to_text().startswith("edges_in=3\n")
    assert id_map[:2] == [7188, 1]


def test_edge_counts_examples():
    assert edge_counts(SignedGraph(3, [])) == (0, 0, 0)
    assert edge_counts(SignedGraph(3, [(0, 1, 1), (1, 2, -1)])) == (2, 1, 1)


def test_common_neighbors_examples():
    tri = SignedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    assert common_neighbors(tri, 0, 1) == [(2, 1, 1)]
    path = SignedGraph(3, [(0, 1, 1), (1, 2, 1)])
    assert common_neighbors(path, 0, 2) == [(1, 1, 1)]
    assert common_neighbors(SignedGraph(4, [(0, 1, 1), (2, 3, -1)]), 0, 3) == []
    with pytest.raises(ValueError):
        common_neighbors(tri, 1, 1)


def test_common_neighbors_match_set_intersection():
    rng = np.random.default_rng(3)
    g = random_signed_graph(rng, 200, 0.08)
    for u in range(0, 200, 7):
        for v in range(u + 1, 200, 5):
            assert common_neighbors(g, u, v) == brute_common(g, u, v)


def test_common_neighbors_all_pairs_small():
    rng = np.random.default_rng(11)
    g = random_signed_graph(rng, 40, 0.3)
    for u in range(40):
        for v in range(40):
            if u != v:
                assert common_neighbors(g, u, v) == brute_common(g, u, v)


@st.composite
def graphs(draw, max_n=30):
    n = draw(st.integers(2, max_n))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.sampled_from([1, -1])),
                          max_size=4 * n))
    return SignedGraph(n, [(u, v, s) for u, v, s in pairs if u != v])


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_structural_invariants(g):
    total = 0
    for u in range(g.n):
        adj = g.adjacency(u)
        ids = [v for v, _ in adj]
        assert ids == sorted(set(ids)) and u not in ids
        for v, s in adj:
            assert (u, s) in g.adjacency(v)
        total += len(adj)
    assert total == 2 * g.m
    t, p, q = edge_counts(g)
    assert p + q == t == len(g.edges)
    assert np.array_equal(np.diff(g.indptr), [g.degree(u) for u in range(g.n)])


@settings(max_examples=40, deadline=None)
@given(graphs())
def test_text_round_trip(tmp_path_factory, g):
    path = tmp_path_factory.mktemp("rt") / "g.txt"
    write_graph(g, path)
    assert read_graph(path) == g
    lines = to_edge_list_text(g).splitlines()
    keys = [tuple(map(int, ln.split()[:2])) for ln in lines]
    assert keys == sorted(keys) and all(u < v for u, v in keys)


def test_reingest_preserves_structure(tmp_path):
    rng = np.random.default_rng(0)
    g = random_signed_graph(rng, 30, 0.2)
    recs = parse_records(to_edge_list_text(g).splitlines())
    g2, rep, id_map = ingest(recs)
    # only ids change; mapping back reproduces the same edges
    back = {(min(id_map[e.u], id_map[e.v]), max(id_map[e.u], id_map[e.v]), e.sign) for e in g2.edges}
    assert back == {(e.u, e.v, e.sign) for e in g.edges}
    assert rep.conflicts == 0


def test_write_graph_sidecars(tmp_path):
    g, rep, id_map = ingest([(10, 20, 1), (20, 30, -2)])
    write_graph(g, tmp_path / "g.txt", id_map=id_map, report=rep)
    assert (tmp_path / "g.txt.idmap").read_text() == "0 10\n1 20\n2 30\n"
    assert "conflicts=0" in (tmp_path / "g.txt.report").read_text()


def test_canonical_edge_validation():
    with pytest.raises(ValueError):
        SignedEdge(2, 1, 1)
    with pytest.raises(ValueError):
        SignedEdge(1, 2, 0)
    with pytest.raises(ValueError):
        SignedGraph(2, [(0, 0, 1)])
