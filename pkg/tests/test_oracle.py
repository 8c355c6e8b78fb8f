from itertools import combinations
from math import log2

import pytest
from hypothesis import given, settings, strategies as st

from graphcodes.errors import ResourceError, UsageError
from graphcodes.graphcore import LabeledGraph, PatternGraph, n_slots
from graphcodes.oracle import (
    PredicateSpec,
    count_bad_graphs,
    exact_DF,
    exact_MF,
    family_avoids,
    family_is_good,
    greedy_rate_lower_bound,
    has_spanning_tree_with_leaves,
    max_clique,
    run_oracle,
)

CONNECTED = PredicateSpec("connected")
K3 = PredicateSpec("contains", PatternGraph.complete(3))

SUITE = [
    CONNECTED,
    K3,
    PredicateSpec("contains", PatternGraph.path(3)),
    PredicateSpec("copies", PatternGraph.complete(2), k=3),
    PredicateSpec("disjoint", PatternGraph.complete(2), k=2),
    PredicateSpec("tree-leaves", leaves=2),
    PredicateSpec("tree-leaves", leaves=3),
    PredicateSpec("ktt", t=2),
]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_connected_matches_closed_form(n):
    assert exact_MF(n, CONNECTED).M_exact == 2 ** (n - 1)


def test_connected_n3_witness_and_dual():
    res = exact_MF(3, CONNECTED)
    assert {g.bits for g in res.witness_family} == {0, 0b011, 0b101, 0b110}
    assert exact_DF(3, CONNECTED).D_exact == 2


def test_triangle_n3():
    assert exact_MF(3, K3).M_exact == 2
    assert exact_DF(3, K3).D_exact == 4


@pytest.mark.parametrize("pred", SUITE, ids=lambda p: p.describe())
@pytest.mark.parametrize("n", [2, 3, 4])
def test_product_bound_and_witnesses(n, pred):
    res = run_oracle(n, pred)
    assert res.M_exact * res.D_exact <= 2 ** n_slots(n)
    assert res.product_bound_holds
    assert family_is_good(res.witness_family, pred)
    assert family_avoids(res.dual_witness, pred)
    assert res.M_exact >= 2 ** greedy_rate_lower_bound(n, pred, res.bad_count) - 1e-9


def test_bad_counts():
    assert count_bad_graphs(3, K3) == 7
    assert count_bad_graphs(4, K3) == 41
    assert count_bad_graphs(3, CONNECTED) == 4


def test_greedy_bounds():
    assert greedy_rate_lower_bound(3, K3) == 0
    assert greedy_rate_lower_bound(4, K3) == pytest.approx(6 - log2(42))
    assert 2 ** greedy_rate_lower_bound(4, K3) == pytest.approx(1.5238, abs=1e-3)
    assert greedy_rate_lower_bound(3, PredicateSpec("ktt", t=1), bad=0) == 3


def test_always_true_predicate_has_singleton_dual():
    pred = PredicateSpec("copies", PatternGraph.complete(2), k=1)
    assert exact_DF(3, pred).D_exact == 1


def test_tree_leaf_predicate():
    assert has_spanning_tree_with_leaves(LabeledGraph.complete(4), 3)
    assert not has_spanning_tree_with_leaves(LabeledGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)]), 3)


def test_predicate_validation():
    with pytest.raises(UsageError):
        PredicateSpec("colourful")
    with pytest.raises(UsageError):
        PredicateSpec("contains")
    with pytest.raises(ResourceError):
        exact_MF(6, CONNECTED)


def test_budget_reports_best():
    with pytest.raises(ResourceError) as exc:
        exact_MF(5, CONNECTED, budget=50)
    assert exc.value.best >= 1


def brute_clique(adj):
    n = len(adj)
    for size in range(n, 0, -1):
        for sub in combinations(range(n), size):
            if all(adj[a] >> b & 1 for a, b in combinations(sub, 2)):
                return size
    return 0


@settings(max_examples=80)
@given(st.integers(1, 11).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2 ** n_slots(n) - 1))))
def test_max_clique_matches_brute_force(args):
    n, bits = args
    adj = list(LabeledGraph(n, bits).adjacency)
    clique = max_clique(adj)
    assert all(adj[a] >> b & 1 for a, b in combinations(clique, 2))
    assert len(clique) == brute_clique(adj)
