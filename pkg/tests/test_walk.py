import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ualab.expansion import conductance_exact
from ualab.graph import SimpleGraphView, generate
from ualab.structure import is_connected
from ualab.walk import (
    bound_violations,
    mixing_profile,
    profile_csv,
    sinclair_jerrum_bound,
    stationary,
    step_distribution,
    transition_matrix,
    tv_distance,
)

K2 = SimpleGraphView.from_edges(2, [(1, 2)])
C4 = SimpleGraphView.from_edges(4, [(1, 2), (2, 3), (3, 4), (4, 1)])


def test_stationary_examples():
    assert stationary(K2).pi.tolist() == [0.5, 0.5]
    star = SimpleGraphView.from_edges(4, [(1, 2), (1, 3), (1, 4)])
    assert stationary(star).pi == pytest.approx([0.5, 1 / 6, 1 / 6, 1 / 6])


def test_step_examples():
    assert step_distribution(C4, 2, 0, lazy=True).distribution.tolist() == [0, 1, 0, 0]
    assert step_distribution(K2, 1, 1, lazy=False).distribution.tolist() == [0, 1]
    far = step_distribution(C4, 1, 200, lazy=True).distribution
    assert tv_distance(far, np.full(4, 0.25)) < 1e-9


def test_disconnected_rejected():
    with pytest.raises(ValueError):
        step_distribution(SimpleGraphView.from_edges(4, [(1, 2), (3, 4)]), 1, 3, lazy=True)


def test_tv_examples():
    assert tv_distance([0.5, 0.5], [0.5, 0.5]) == 0
    assert tv_distance([1, 0], [0, 1]) == 1
    assert tv_distance([0.5, 0.5], [0.75, 0.25]) == 0.25
    with pytest.raises(ValueError):
        tv_distance([0.5, 0.6], [0.5, 0.5])


def test_bound_examples():
    assert sinclair_jerrum_bound(0.2, 0.05, 0.3, 0) == pytest.approx(0.5)
    assert sinclair_jerrum_bound(0.2, 0.1, 0.0, 50) == sinclair_jerrum_bound(0.2, 0.1, 0.0, 0)
    assert sinclair_jerrum_bound(0.25, 0.25, 1.0, 8) == pytest.approx((7 / 8) ** 8)


def test_c4_profile():
    rows = mixing_profile(C4, 1, 64, 0.5)
    assert rows[-1].bound == pytest.approx((1 - 1 / 32) ** 64)
    assert rows[-1].max_dev <= rows[-1].bound
    assert rows[0].max_dev == pytest.approx(0.75)
    assert profile_csv(rows[:2]).splitlines()[0] == "t,max_dev,bound"


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 24), st.integers(1, 3), st.integers(0, 2**64 - 1))
def test_walk_invariants(n, k, seed):
    sv = generate(n, k, seed).simple
    if not is_connected(sv):
        return
    pi = stationary(sv).pi
    p = transition_matrix(sv, lazy=True)
    assert tv_distance(pi @ p.toarray(), pi) < 1e-12
    x = step_distribution(sv, 1, 0, True).distribution
    pt = p.T.tocsr()
    prev = math.inf
    for _ in range(60):
        x = pt @ x
        assert abs(x.sum() - 1) < 1e-12 and x.min() >= -1e-15
        d = tv_distance(x, pi)
        assert d <= prev + 1e-12
        prev = d


@pytest.mark.parametrize("g", [nx.cycle_graph(7), nx.complete_graph(5), nx.hypercube_graph(3), nx.petersen_graph()])
def test_bound_on_regular_graphs(g):
    g = nx.convert_node_labels_to_integers(g, 1)
    sv = SimpleGraphView.from_edges(g.number_of_nodes(), g.edges())
    assert bound_violations(sv, conductance_exact(sv), 300) == []


def test_nonlazy_deviation_reported_only():
    # bipartite graph: the plain walk never mixes, which the lazy chain fixes
    rows = mixing_profile(C4, 1, 40, conductance_exact(C4), lazy=False)
    assert rows[-1].max_dev > 0.2
    assert mixing_profile(C4, 1, 40, conductance_exact(C4))[-1].max_dev < 1e-3
