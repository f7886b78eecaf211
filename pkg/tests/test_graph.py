import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sst

from ualab import graph
from ualab.graph import AttachmentGraph, SimpleGraphView, generate
from ualab.structure import is_connected

params = st.tuples(st.integers(1, 60), st.integers(1, 5), st.integers(0, 2**64 - 1))


def test_single_vertex():
    g = generate(1, 3, 9)
    assert g.n == 1 and g.simple.edge_count == 0


def test_two_vertices_forced():
    g = generate(2, 2, 123)
    assert g.selections_of(2) == [1, 1]
    assert g.simple.edge_count == 1


def test_k1_is_recursive_tree():
    sv = generate(1000, 1, 7).simple
    assert sv.edge_count == 999
    assert is_connected(sv)


def test_dedup_of_repeats():
    g = AttachmentGraph(2, 3, 0, np.array([[1, 1, 1]]))
    assert g.simple.adjacency(1) == [2] and g.simple.adjacency(2) == [1]
    assert g.simple.edge_count == 1


def test_hand_triangle():
    g = AttachmentGraph(3, 2, 0, np.array([[1, 1], [1, 2]]))
    assert g.simple.edge_count == 3
    assert g.simple.edges() == [(1, 2), (1, 3), (2, 3)]


@settings(max_examples=60, deadline=None)
@given(params)
def test_generation_invariants(p):
    n, k, seed = p
    g = generate(n, k, seed)
    assert g == generate(n, k, seed)
    sv = g.simple
    for u in range(2, n + 1):
        assert all(1 <= v < u for v in g.selections_of(u))
    assert int(sv.degrees.sum()) == 2 * sv.edge_count
    assert sv.edge_count == k * (n - 1) - g.duplicates
    assert sv.edge_count <= k * (n - 1)
    assert np.array_equal(sv.degrees, g.out_degrees + g.in_degrees)
    assert g.in_degrees[-1] == 0 and sv.degrees[-1] <= k
    # symmetric, loop-free, sorted rows
    for i in range(n):
        row = sv.neighbors0(i)
        assert i not in row
        assert np.all(np.diff(row) > 0)
        for w in row.tolist():
            assert sv.has_edge(w + 1, i + 1)


@settings(max_examples=40, deadline=None)
@given(params)
def test_serialize_round_trip(p):
    g = generate(*p)
    assert graph.deserialize(graph.serialize(g)) == g


def test_degree_records():
    recs = graph.degree_records(generate(2, 3, 5))
    assert recs[0] == graph.DegreeRecord(1, 0, 1, 1)
    assert recs[1].d_in == 0


def test_mean_in_and_out_degree_agree():
    g = generate(10**4, 3, 2)
    distinct = 1 - g.duplicates / (3 * (g.n - 1))
    for arr in (g.in_degrees, g.out_degrees):
        assert abs(arr.mean() - 3 * distinct) <= 0.05 * 3 * distinct
    assert g.in_degrees.sum() == g.out_degrees.sum()


def test_header_only_graph():
    g = graph.deserialize("ua 1 3 42\n")
    assert g.n == 1 and g.k == 3 and g.seed == 42


@pytest.mark.parametrize(
    "text, exc, line",
    [
        ("ua 2 1 0\n2: 5\n", graph.SelectionOutOfRangeError, 2),
        ("ua 2 1 0\n2: 0\n", graph.SelectionOutOfRangeError, 2),
        ("ub 2 1 0\n2: 1\n", graph.MalformedHeaderError, 1),
        ("", graph.MalformedHeaderError, 1),
        ("ua 3 1 0\n2: 1\n", graph.MalformedLineError, 3),
        ("ua 2 2 0\n2: 1\n", graph.WrongListLengthError, 2),
        ("ua 2 1 0\n3: 1\n", graph.MalformedLineError, 2),
        ("ua 2 1 0\n2:1\n", graph.MalformedLineError, 2),
    ],
)
def test_deserialize_errors(text, exc, line):
    with pytest.raises(exc) as info:
        graph.deserialize(text)
    assert info.value.line == line


def test_out_of_range_message():
    with pytest.raises(graph.GraphFormatError, match="selection out of range"):
        graph.deserialize("ua 2 1 0\n2: 5\n")


def test_from_edges_validation():
    with pytest.raises(ValueError):
        SimpleGraphView.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        SimpleGraphView.from_edges(3, [(1, 4)])
    sv = SimpleGraphView.from_edges(3, [(1, 2), (2, 1), (3, 2)])
    assert sv.edge_count == 2


def test_first_selection_uniform():
    # u's first choice over many graphs should be uniform on [1, u-1]
    trials = 50_000
    firsts = np.empty((trials, 3), dtype=np.int64)
    for t in range(trials):
        firsts[t] = generate(200, 2, t).selections[[0, 8, 98], 0]
    assert np.all(firsts[:, 0] == 1)
    for j, u in ((1, 10), (2, 100)):
        counts = np.bincount(firsts[:, j], minlength=u)[1:u]
        assert sst.chisquare(counts).pvalue > 0.01
