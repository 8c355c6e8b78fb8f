import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphcodes import bincode
from graphcodes.errors import InfeasibleError, UsageError, VerificationError
from graphcodes.factorize import kotzig_p1f
from graphcodes.graphcore import LabeledGraph, path_graph, popcount, spanning_tree_leaf_count
from graphcodes.treecode import (
    augment_to_leaves,
    build_hamming_treecode,
    build_treecode,
    check_certificate,
    export_roster,
    hamming_leaf_range,
    load_generator,
    sample_pairs,
    verify_family,
    verify_pair,
)
from util import check_tree, random_augment_instance


@pytest.fixture(scope="module")
def code37():
    return build_treecode(37, 3, kotzig_p1f(37))


def test_augment_worked_example():
    res = augment_to_leaves([0, 1, 2, 3, 4], [(0, 2)], 3)
    assert res.tree.edges() == [(0, 2), (1, 2), (2, 3), (3, 4)]
    assert spanning_tree_leaf_count(res.tree) == 3


def test_augment_two_leaves_returns_path():
    path = [3, 1, 4, 0, 2]
    res = augment_to_leaves(path, [(3, 4), (0, 1)], 2)
    assert res.tree == path_graph(5, path) and res.chords == []


def test_augment_drops_chord_at_last_vertex():
    res = augment_to_leaves([0, 1, 2, 3, 4, 5], [(1, 5), (0, 3)], 3)
    assert res.chords == [(0, 3)]


def test_augment_usage_errors():
    with pytest.raises(UsageError):
        augment_to_leaves([0, 1, 1], [], 2)
    with pytest.raises(UsageError):
        augment_to_leaves([0, 1, 2, 3], [(0, 2), (2, 3)], 3)
    with pytest.raises(UsageError):
        augment_to_leaves([0, 1, 2, 3], [(1, 2)], 3)


def test_augment_exhaustion_is_internal_error():
    with pytest.raises(VerificationError):
        augment_to_leaves([0, 1, 2, 3, 4, 5], [(0, 2)], 4)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_augment_random_n21_l5(seed):
    rng = np.random.default_rng(seed)
    n, path = 21, [int(v) for v in rng.permutation(21)]
    pos = {v: i for i, v in enumerate(path)}
    chords = []
    while len(chords) < 10:
        free, chords = [int(v) for v in rng.permutation(n)], []
        while len(chords) < 10 and free:
            u = free.pop()
            w = next((w for w in free if abs(pos[w] - pos[u]) > 1), None)
            if w is not None:
                free.remove(w)
                chords.append((u, w))
    res = augment_to_leaves(path, chords, 5)
    allowed = path_graph(n, path) | LabeledGraph.from_edges(n, chords)
    assert check_tree(n, res.tree, 5, allowed)
    assert all(r["removed"] <= 3 for r in res.rounds)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_augment_random_instances(seed):
    n, path, chords, leaves = random_augment_instance(np.random.default_rng(seed))
    res = augment_to_leaves(path, chords, leaves)
    allowed = path_graph(n, path) | LabeledGraph.from_edges(n, chords)
    assert check_tree(n, res.tree, leaves, allowed)
    assert [r["leaves"] for r in res.rounds] == list(range(3, leaves + 1))


def test_build_37(code37):
    assert code37.family_size == 2**35
    assert code37.parts_needed <= 128
    assert code37.h_code.size >= code37.parts_needed
    assert bincode.verify_min_distance(code37.h_code) >= 4


def test_same_part_means_codeword(code37):
    rng = np.random.default_rng(1)
    for _ in range(200):
        a, b = (code37.index_from_rank(int(x)) for x in rng.integers(0, code37.family_size, 2))
        if a != b and code37.part(a) == code37.part(b):
            assert popcount(a ^ b) >= 4
    # distinct parts carry H words at distance >= 3l - 5
    layers = [code37.h_layer(p).bits for p in range(code37.parts_needed)]
    assert min(popcount(x ^ y) for i, x in enumerate(layers) for y in layers[i + 1:]) >= 4


def test_member_examples(code37):
    assert code37.member(0) == code37.h_layer(code37.part(0))
    g = code37.member(0b11)
    assert code37.system.matchings[0].issubset(g) and code37.system.matchings[1].issubset(g)
    assert code37.member(0b11) == code37.member(0b11)
    with pytest.raises(UsageError):
        code37.member(0b1)


def test_same_and_cross_part_certificates(code37):
    word = next(w for w in code37.part_code.basis if popcount(w) % 2 == 0)
    same = verify_pair(code37, 0, word)
    assert same.extra_source.startswith("matching")
    cross = verify_pair(code37, 0, 0b11)
    assert code37.part(0) != code37.part(0b11)
    assert cross.extra_source == "reserved matching"
    diff = code37.member(0) ^ code37.member(0b11)
    assert check_certificate(diff, cross.tree, 3) is None
    with pytest.raises(UsageError):
        verify_pair(code37, 6, 6)


def test_sampled_pairs_verify(code37):
    certs, failures = verify_family(code37, 200, seed=3)
    assert len(certs) == 200 and not failures
    assert sample_pairs(code37, 20, 9) == sample_pairs(code37, 20, 9)


def test_greedy_coloring_infeasible_at_13():
    with pytest.raises(InfeasibleError) as exc:
        build_treecode(13, 3, coloring="greedy")
    assert "67" in str(exc.value)
    assert bincode.exhaustive_A(6, 4) == 4


def test_degenerate_two_leaf_family():
    params = build_treecode(5, 2)
    roster = export_roster(params)
    assert len(roster) == 8
    for i in range(8):
        for j in range(i + 1, 8):
            a, b = params.index_from_rank(i), params.index_from_rank(j)
            assert check_certificate(roster[i] ^ roster[j], verify_pair(params, a, b).tree, 2) is None


def test_syndrome_n17_exhaustive_sample():
    params = build_treecode(17, 3)
    certs, failures = verify_family(params, 300, seed=0)
    assert len(certs) == 300 and not failures


def test_build_usage_errors():
    with pytest.raises(UsageError):
        build_treecode(6, 3)
    with pytest.raises(UsageError):
        build_treecode(7, 1)
    with pytest.raises(UsageError):
        build_treecode(7, 3, coloring="rainbow")


def test_hamming_variant():
    params = build_hamming_treecode(5, 6)
    assert params.n == 31 and params.family_size == 2**25
    certs, failures = verify_family(params, 100, seed=2)
    assert len(certs) == 100 and not failures
    assert hamming_leaf_range(5) == (3, 6)
    with pytest.raises(UsageError, match=r"\(n\+9\)/6"):
        build_hamming_treecode(5, 7)
    with pytest.raises(UsageError):
        build_hamming_treecode(2, 3)


def test_generator_round_trip(code37):
    data = code37.to_json("hcode.json")
    again = load_generator(data, code37.h_code)
    assert again.member(0b1111) == code37.member(0b1111)
    with pytest.raises(UsageError):
        load_generator({**data, "format_version": 2})
