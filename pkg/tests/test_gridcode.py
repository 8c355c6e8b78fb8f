import json

import pytest

from graphcodes.errors import NotFoundError, UsageError
from graphcodes.graphcore import LabeledGraph
from graphcodes.gridcode import (
    GridFamily,
    GridSpec,
    grid_graph,
    neighborhood_bound_check,
    search_grid_family,
    verify_grid_family,
)


@pytest.fixture(scope="module")
def family33():
    return search_grid_family(GridSpec(3, 3), 4, seed=0)


@pytest.mark.parametrize("m,n", [(3, 3), (3, 4), (4, 5)])
def test_grid_is_4_regular(m, n):
    g = grid_graph(m, n)
    assert g.n == m * n and g.edge_count == 2 * m * n
    assert set(g.degrees()) == {4}


def test_grid_adjacency_rule():
    spec = GridSpec(3, 4)
    g = spec.host()
    for v in range(12):
        r, c = spec.coords(v)
        nbrs = {spec.vertex(r, c + 1), spec.vertex(r, c - 1), spec.vertex(r + 1, c), spec.vertex(r - 1, c)}
        assert set(g.neighbors(v)) == nbrs


def test_grid_too_small():
    with pytest.raises(UsageError):
        grid_graph(2, 3)


def test_search_finds_16(family33):
    assert len(family33.members) == 16
    ok, lines = verify_grid_family(family33)
    assert ok and len(lines) == 120
    assert len(family33.linear_basis) == 4


def test_bound_holds_at_every_probe(family33):
    for r in range(3):
        for c in range(3):
            assert neighborhood_bound_check(family33, (r, c)) == (True, None)


def test_no_seventeenth_member(family33):
    host = family33.spec.host()
    extra = GridFamily(family33.spec, family33.members + [host])
    ok, pair = neighborhood_bound_check(extra)
    assert not ok and pair is not None


def test_neighborhood_check_duplicates_and_size():
    spec = GridSpec(3, 3)
    g = spec.host()
    ok, pair = neighborhood_bound_check(GridFamily(spec, [g, g]))
    assert not ok and pair == (0, 1)
    big = GridFamily(spec, [LabeledGraph(9, 1 << i) for i in range(17)])
    assert not neighborhood_bound_check(big)[0]


def test_verify_small_families():
    spec = GridSpec(3, 3)
    empty = LabeledGraph.empty(9)
    assert not verify_grid_family(GridFamily(spec, [empty, empty.add_edge(0, 1)]))[0]
    cycle = [0, 1, 2, 5, 8, 7, 4, 3, 6]
    ham = LabeledGraph.from_edges(9, [(cycle[i], cycle[(i + 1) % 9]) for i in range(9)])
    assert ham.issubset(spec.host())
    assert verify_grid_family(GridFamily(spec, [empty, ham]))[0]
    assert not verify_grid_family(GridFamily(spec, [empty, LabeledGraph.complete(9)]))[0]


def test_dim_edge_cases():
    spec = GridSpec(3, 3)
    fam = search_grid_family(spec, 0)
    assert fam.members == [LabeledGraph.empty(9)] and verify_grid_family(fam)[0]
    with pytest.raises(NotFoundError, match="16"):
        search_grid_family(spec, 5)


def test_budget_exhaustion():
    with pytest.raises(NotFoundError) as exc:
        search_grid_family(GridSpec(3, 3), 4, budget=5)
    assert exc.value.stats["target"] == 15


def test_search_is_deterministic(family33):
    again = search_grid_family(GridSpec(3, 3), 4, seed=0)
    assert again.dumps() == family33.dumps()


def test_roster_round_trip(family33):
    back = GridFamily.from_json(json.loads(family33.dumps()))
    assert back.members == family33.members and back.linear_basis == family33.linear_basis
    with pytest.raises(UsageError):
        GridFamily.from_json({**family33.to_json(), "format_version": 7})
