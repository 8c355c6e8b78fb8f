"""Shared helpers for the test modules."""

import numpy as np

from graphcodes.graphcore import LabeledGraph, spanning_tree_leaf_count


def random_augment_instance(rng: np.random.Generator, max_n: int = 51):
    """Random Hamiltonian path, vertex-disjoint chord set E_A and a feasible leaf target."""
    n = int(rng.integers(4, max_n + 1))
    path = [int(v) for v in rng.permutation(n)]
    pos = {v: i for i, v in enumerate(path)}
    free = [int(v) for v in rng.permutation(n)]
    chords = []
    want = int(rng.integers(0, n // 2 + 1))
    while len(free) >= 2 and len(chords) < want:
        u = free.pop()
        partner = next((w for w in free if abs(pos[w] - pos[u]) > 1), None)
        if partner is None:
            continue
        free.remove(partner)
        chords.append((u, partner))
    leaves = int(rng.integers(2, max(2, (len(chords) + 5) // 3) + 1))
    return n, path, chords, leaves


def check_tree(n, tree: LabeledGraph, leaves: int, allowed: LabeledGraph) -> bool:
    return tree.issubset(allowed) and spanning_tree_leaf_count(tree) == leaves
