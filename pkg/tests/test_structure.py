import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ualab import rng
from ualab.graph import AttachmentGraph, SimpleGraphView, generate
from ualab.structure import (
    INFINITE,
    DiameterBounds,
    diameter,
    is_connected,
    min_degree,
    special_set,
    structure_report,
    vertex_connectivity,
)


def _nx(sv):
    g = nx.Graph()
    g.add_nodes_from(range(1, sv.n + 1))
    g.add_edges_from(sv.edges())
    return g


def _brute_kappa(sv):
    g = _nx(sv)
    for size in range(sv.n - 1):
        for cut in itertools.combinations(range(1, sv.n + 1), size):
            h = g.subgraph(set(g) - set(cut))
            if h.number_of_nodes() >= 2 and not nx.is_connected(h):
                return size
    return sv.n - 1


def test_min_degree_edge_cases():
    assert min_degree(generate(1, 2, 0).simple) == 0
    assert min_degree(generate(2, 4, 0).simple) == 1


def test_special_set_hand_example():
    assert special_set(generate(2, 2, 0)) == [2]
    with pytest.raises(ValueError):
        special_set(generate(5, 1, 0))


def test_special_set_definition():
    g = generate(2000, 3, 4)
    expect = [v for v in range(1, g.n + 1) if len(g.out_neighbors(v)) == 2 and not g.in_neighbors(v)]
    assert special_set(g) == expect


def test_connectivity_small_named():
    assert vertex_connectivity(SimpleGraphView.from_edges(4, itertools.combinations(range(1, 5), 2))) == 3
    assert vertex_connectivity(SimpleGraphView.from_edges(6, [(1, v) for v in range(2, 7)])) == 1
    assert vertex_connectivity(SimpleGraphView.from_edges(4, [(1, 2), (3, 4)])) == 0
    with pytest.raises(ValueError):
        vertex_connectivity(generate(1, 1, 0).simple)


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 9), st.integers(1, 4), st.integers(0, 2**64 - 1))
def test_connectivity_matches_separator_oracle(n, k, seed):
    sv = generate(n, k, seed).simple
    kappa = vertex_connectivity(sv, method="flow")
    assert kappa == _brute_kappa(sv)
    assert kappa <= min_degree(sv)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 9), st.floats(0.1, 0.95), st.integers(0, 2**32))
def test_connectivity_on_dense_random_graphs(n, q, seed):
    gen = np.random.default_rng(seed)
    edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if gen.random() < q]
    sv = SimpleGraphView.from_edges(n, edges)
    assert vertex_connectivity(sv) == _brute_kappa(sv)


@pytest.mark.parametrize("seed", range(12))
def test_certificate_path_agrees_with_flow_and_networkx(seed):
    n = 70 + 13 * seed
    sv = generate(n, 2 + seed % 3, rng.mix_seed(99, seed)).simple
    auto = vertex_connectivity(sv)
    assert auto == vertex_connectivity(sv, method="flow")
    assert auto == nx.node_connectivity(_nx(sv))


def test_certificate_refuted_on_glued_graph():
    # two copies joined through a single cut vertex: kappa = 1 < delta
    a = generate(80, 3, 1).simple.edges()
    b = [(u + 80, v + 80) for u, v in generate(80, 3, 2).simple.edges()]
    sv = SimpleGraphView.from_edges(160, a + b + [(1, 81)])
    assert vertex_connectivity(sv) == 1


def test_diameter_examples():
    assert diameter(SimpleGraphView.from_edges(3, [(1, 2), (2, 3)])) == 2
    assert diameter(SimpleGraphView.from_edges(4, [(1, 2), (3, 4)])) == INFINITE
    assert diameter(generate(1, 1, 0).simple) == 0


def test_diameter_lower_bound_from_degree():
    sv = generate(10**4, 2, 3).simple
    d = diameter(sv)
    assert d >= math.log(sv.n) / math.log(sv.degrees.max()) - 1


def test_diameter_bounds_bracket_exact():
    sv = generate(3000, 3, 8).simple
    exact = diameter(sv)
    b = diameter(sv, exact_limit=100, with_upper=True)
    assert isinstance(b, DiameterBounds)
    assert b.lower <= exact <= b.upper
    assert diameter(sv, exact_limit=100).upper is None


def test_structure_report_dict():
    rep = structure_report(generate(300, 3, 1))
    d = rep.as_dict()
    assert d["is_connected"] and d["connectivity"] <= d["min_degree"]
    assert set(d) == {"min_degree", "special_set", "connectivity", "diameter", "is_connected"}


def test_min_degree_whp_range():
    vals = [min_degree(generate(10**5, 3, rng.mix_seed(3, i)).simple) for i in range(60)]
    assert sum(v in (2, 3) for v in vals) >= 0.99 * len(vals)


def test_connected_component_count():
    g = AttachmentGraph(4, 1, 0, np.array([[1], [1], [3]]))
    assert is_connected(g.simple)
