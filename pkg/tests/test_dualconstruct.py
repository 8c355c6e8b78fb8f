from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import pytest

from graphcodes.dualconstruct import (
    BipartitePattern,
    DrcParams,
    build_kcopy_blocker,
    build_kdisjoint_blocker,
    delta_for_c,
    drc_embed,
    dual_bound,
    expected_ktt_copies,
    extremal_graph,
    ktt_copies,
    random_graph,
    random_ktt_free,
    turan_ex_bruteforce,
    verify_embedding,
)
from graphcodes.errors import NotFoundError, ResourceError, UsageError
from graphcodes.graphcore import (
    LabeledGraph,
    PatternGraph,
    complete_bipartite,
    contains_Kst,
    contains_copy,
    count_copies,
    max_disjoint_copies,
)
from graphcodes.rng import substream

K2, K3 = PatternGraph.complete(2), PatternGraph.complete(3)


def test_dual_bound_examples():
    assert dual_bound(LabeledGraph.empty(5)).dual_log_bound == 10
    rep = dual_bound(complete_bipartite(3, 3), lambda g: contains_copy(g, K3), "contains K3")
    assert rep.dual_log_bound == 6 and rep.consistent
    assert rep.witness_checks["subgraphs_checked"] == 2**9
    full = dual_bound(LabeledGraph.complete(4), lambda g: contains_copy(g, K3), "contains K3")
    assert full.dual_log_bound == 0 and not full.consistent


def test_dual_bound_drops_by_one_per_edge():
    g = LabeledGraph.from_edges(6, [(0, 1), (2, 3)])
    for u, v in combinations(range(6), 2):
        if not g.has_edge(u, v):
            assert dual_bound(g.add_edge(u, v)).dual_log_bound == dual_bound(g).dual_log_bound - 1


@pytest.mark.parametrize("n,ex", [(3, 2), (4, 4), (5, 6), (6, 9), (7, 12), (8, 16)])
def test_turan_triangle(n, ex):
    assert turan_ex_bruteforce(n, K3) == ex == n * n // 4


def test_turan_small_patterns():
    assert all(turan_ex_bruteforce(n, K2) == 0 for n in range(2, 9))
    # ex(n, P3) = floor(n/2): a matching is all a P3-free graph can be
    assert [turan_ex_bruteforce(n, PatternGraph.path(3)) for n in range(2, 9)] == [1, 1, 2, 2, 3, 3, 4]
    # ex(n, C4) for n = 4..7 (Zarankiewicz-type values)
    assert [turan_ex_bruteforce(n, PatternGraph.cycle(4)) for n in range(4, 8)] == [4, 6, 7, 9]
    with pytest.raises(ResourceError):
        turan_ex_bruteforce(11, K3)


def test_extremal_graph_is_free():
    for pat in (K3, PatternGraph.cycle(4), PatternGraph.path(4)):
        g = extremal_graph(7, pat)
        assert not contains_copy(g, pat)
        assert g.edge_count == turan_ex_bruteforce(7, pat)


def test_kcopy_blocker_examples():
    rep = build_kcopy_blocker(6, K3, 1)
    assert rep.edge_count == 9 and rep.witness_checks["copies"] == 0 and rep.consistent
    assert build_kcopy_blocker(5, K2, 1).edge_count == 0
    with pytest.raises(UsageError):
        build_kcopy_blocker(5, K3, 0)


def test_kcopy_k2_triangle_stays_at_turan():
    # any 6-vertex graph with 10 edges has >= 3 triangles, so nothing can be added
    rep = build_kcopy_blocker(6, K3, 2)
    assert rep.edge_count == 9 and rep.witness_checks["copies"] < 2 and rep.consistent
    for u, v in combinations(range(6), 2):
        if not rep.host.has_edge(u, v):
            assert count_copies(rep.host.add_edge(u, v), K3) == 3


def test_kcopy_blocker_adds_edges_when_possible():
    # one edge inside the 3-side of K_{2,3} makes exactly 2 triangles
    rep = build_kcopy_blocker(5, K3, 3)
    assert rep.edge_count == 7 and count_copies(rep.host, K3) == 2


def test_kdisjoint_blocker_examples():
    rep = build_kdisjoint_blocker(8, K3, 2)
    assert rep.edge_count == 19 == 0 + 7 + 12
    assert rep.witness_checks["max_disjoint_copies"] == 1 and rep.consistent
    base = build_kdisjoint_blocker(6, K3, 1)
    assert base.edge_count == 9 and max_disjoint_copies(base.host, K3)[0] == 0
    edges = build_kdisjoint_blocker(6, K2, 3)
    assert edges.witness_checks["max_disjoint_copies"] == max_disjoint_copies(edges.host, K2)[0] == 2
    with pytest.raises(UsageError):
        build_kdisjoint_blocker(4, K3, 5)


@pytest.mark.parametrize("n,k", [(7, 2), (8, 3), (9, 2)])
def test_kdisjoint_closed_form(n, k):
    rep = build_kdisjoint_blocker(n, K3, k)
    rest = n - k + 1
    assert rep.edge_count == comb(k - 1, 2) + (k - 1) * rest + rest * rest // 4
    assert max_disjoint_copies(rep.host, K3)[0] <= k - 1


def test_expected_copies_formula():
    assert expected_ktt_copies(16, 2, 0.25) == pytest.approx(21.328125)
    exact = Fraction(1, 2) * comb(16, 4) * comb(4, 2) * Fraction(1, 4) ** 4
    assert float(exact) == expected_ktt_copies(16, 2, 0.25)


def test_delta_for_c_identity():
    c, n = 2.0, 1024
    t = c * np.log2(n)
    assert delta_for_c(c) ** t == pytest.approx(n ** -2.0)


def test_ktt_copies_matches_contains():
    g = complete_bipartite(2, 3)
    assert len(ktt_copies(g, 2)) == 3
    assert contains_Kst(g, 2, 2)


def test_random_ktt_free_small():
    rep = random_ktt_free(16, 2, 0.25, seed=1)
    checks = rep.witness_checks
    assert not contains_Kst(rep.host, 2, 2)
    assert rep.edge_count >= 0.25 * 120 - checks["x_observed"]
    assert rep == random_ktt_free(16, 2, 0.25, seed=1)
    with pytest.raises(UsageError):
        random_ktt_free(5, 3, 0.25)


def test_random_ktt_free_not_found():
    with pytest.raises(NotFoundError) as exc:
        random_ktt_free(12, 2, 0.5, seed=0, retries=0)
    assert exc.value.stats["history"] == []


def test_drc_on_complete_graph():
    pat = BipartitePattern.caterpillar(3)
    emb = drc_embed(LabeledGraph.complete(30), pat, DrcParams(0.9, 2, 2, 6, 3))
    assert verify_embedding(LabeledGraph.complete(30), pat, emb)


def test_drc_rejects_sparse_host():
    with pytest.raises(UsageError):
        drc_embed(LabeledGraph.empty(30), BipartitePattern.caterpillar(3), DrcParams(0.5, 2, 2, 6, 3))


def test_drc_random_graph():
    g = random_graph(400, 0.5, substream(5, "host"))
    pat = BipartitePattern.caterpillar(5)
    emb = drc_embed(g, pat, DrcParams(0.49, 3, 2, 10, 5), seed=2)
    assert verify_embedding(g, pat, emb)
    assert pat.left_degree() <= 2 and pat.is_connected() and pat.order == 10


def test_verify_embedding_catches_bad_map():
    pat = BipartitePattern(1, 1, ((0, 0),))
    from graphcodes.dualconstruct import Embedding
    assert not verify_embedding(LabeledGraph.empty(3), pat, Embedding([0], [1], 0, 1))
    assert not verify_embedding(LabeledGraph.complete(3), pat, Embedding([0], [0], 0, 1))
