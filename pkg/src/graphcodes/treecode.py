"""Graph families whose pairwise symmetric differences contain a spanning tree
with exactly ``leaves`` leaves.

Two variants share one pipeline:

gv-partition
    Matchings M_0..M_{n-1} come from a perfect 1-factorization of K_{n+1} with
    the top vertex deleted; M_{n-1} is reserved.  Members are indexed by the
    even-weight subsets S of {0..n-2}: member(S) is the union of M_i (i in S)
    plus a layer H_part(S) of reserved-matching edges.  Indices in the same part
    differ in at least four matchings; different parts carry H-layers that
    differ in at least 3*leaves - 5 edges.

hamming
    n = 2^k - 1 and the indices are the even-weight words of the Hamming code,
    so any two members differ in at least three whole matchings.

Every pair difference then holds a Hamiltonian path (two matchings) plus a set
of vertex-disjoint extra edges, and :func:`augment_to_leaves` turns that into
the required tree.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import bincode
from .bincode import BinaryCode
from .errors import InfeasibleError, UsageError, VerificationError
from .factorize import (
    OneFactorization,
    RestrictedMatchingSystem,
    hamiltonian_path_order,
    is_prime,
    p1f_for_order,
    restrict_to_n,
)
from .graphcore import LabeledGraph, _iter_bits, edge_index, popcount, spanning_tree_leaf_count
from .rng import substream

FORMAT_VERSION = 1
GREEDY_COLORING_MAX_N = 17


# ---------------------------------------------------------------------------
# leaf augmentation

@dataclass
class AugmentResult:
    tree: LabeledGraph
    chords: list[tuple[int, int]]
    rounds: list[dict] = field(default_factory=list)


def augment_to_leaves(
    path: list[int],
    extra_edges: list[tuple[int, int]],
    leaves: int,
    n: Optional[int] = None,
) -> AugmentResult:
    """Grow a Hamiltonian path into a spanning tree with exactly ``leaves`` leaves.

    ``path`` lists the vertices v_1..v_n in path order; ``extra_edges`` must be
    vertex-disjoint non-path edges; 3*leaves - 5 of them always suffice, and
    running out early raises VerificationError.  The edge at v_n is discarded first, then each round takes the
    extra edge {v_i, v_j} (i < j) with the smallest i, adds it, deletes the
    path edge {v_i, v_{i+1}} and drops every extra edge meeting v_{i+1} or
    v_{j-1}.
    """
    n = len(path) if n is None else n
    if len(path) != n or len(set(path)) != n or not all(0 <= v < n for v in path):
        raise UsageError("path must list every vertex exactly once")
    if leaves < 2:
        raise UsageError("a spanning tree has at least two leaves")
    if n < 2:
        raise UsageError("need at least two vertices")
    pos = {v: i for i, v in enumerate(path)}
    touched: set[int] = set()
    chords: dict[int, int] = {}
    for u, v in extra_edges:
        if u == v or u in touched or v in touched:
            raise UsageError("extra edges must be pairwise vertex-disjoint")
        touched.update((u, v))
        i, j = sorted((pos[u], pos[v]))
        if j == i + 1:
            raise UsageError(f"extra edge {u}-{v} is a path edge")
        chords[i] = j

    # path positions: tree edges as position pairs, degrees by position
    tree_edges = {(i, i + 1) for i in range(n - 1)}
    deg = [2] * n
    deg[0] = deg[-1] = 1
    leaf_count = 2
    # partner lookup by position, both directions
    mate: dict[int, int] = {}
    for i, j in chords.items():
        mate[i], mate[j] = j, i

    def drop(p: int) -> int:
        if p in mate:
            q = mate.pop(p)
            del mate[q]
            return 1
        return 0

    drop(n - 1)
    result = AugmentResult(LabeledGraph.empty(n), [])
    for rnd in range(leaves - 2):
        if not mate:
            raise VerificationError(f"ran out of extra edges in round {rnd + 1}")
        i = min(mate)
        j = mate[i]
        before = leaf_count
        removed = drop(i)
        tree_edges.add((i, j))
        if (i, i + 1) not in tree_edges:
            raise VerificationError(f"path edge at position {i} already deleted")
        tree_edges.remove((i, i + 1))
        for p, delta in ((i + 1, -1), (j, +1)):
            old = deg[p]
            deg[p] = old + delta
            leaf_count += (deg[p] == 1) - (old == 1)
        removed += drop(i + 1)
        removed += drop(j - 1)
        result.chords.append((path[i], path[j]))
        result.rounds.append({"i": i, "j": j, "leaves": leaf_count, "removed": removed})
        if leaf_count != before + 1:
            raise VerificationError(f"round {rnd + 1} changed the leaf count by {leaf_count - before}")
        if removed > 3:
            raise VerificationError(f"round {rnd + 1} consumed {removed} extra edges")
    result.tree = LabeledGraph.from_edges(n, ((path[a], path[b]) for a, b in tree_edges))
    return result


# ---------------------------------------------------------------------------
# family parameters

@dataclass
class PairCertificate:
    i: int
    j: int
    tree: LabeledGraph
    path_matchings: tuple[int, int]
    extra_edges_used: list[tuple[int, int]]
    extra_source: str
    leaves: int

    def to_json(self) -> dict:
        return {
            "i": format(self.i, "x"),
            "j": format(self.j, "x"),
            "tree": self.tree.to_line(),
            "path_matchings": list(self.path_matchings),
            "extra_edges_used": [list(e) for e in self.extra_edges_used],
            "extra_source": self.extra_source,
            "leaves": self.leaves,
        }


@dataclass
class TreeCodeParams:
    variant: str
    n: int
    leaves: int
    system: RestrictedMatchingSystem
    prime_p: Optional[int]
    coloring: str
    index_bits: int
    reserved: Optional[int] = None
    h_code: Optional[BinaryCode] = None
    part_code: Optional[BinaryCode] = None
    index_code: Optional[BinaryCode] = None
    part_ids: tuple[int, ...] = ()
    greedy_colors: Optional[np.ndarray] = None
    seed: int = 0
    h_order: str = "lexicographic"
    _matching_bits: tuple[int, ...] = field(default=(), repr=False)
    _h_layers: tuple[int, ...] = field(default=(), repr=False)

    def __post_init__(self):
        self._matching_bits = tuple(m.bits for m in self.system.matchings)
        if self.h_code is not None:
            reserved_edges = sorted(_iter_bits(self._matching_bits[self.reserved]))
            layers = []
            for word in self.h_code.words[: len(self.part_ids)]:
                layers.append(sum(1 << reserved_edges[b] for b in _iter_bits(word)))
            self._h_layers = tuple(layers)

    # -- index space --------------------------------------------------
    @property
    def log2_family_size(self) -> int:
        if self.variant == "hamming":
            return self.index_code.dimension
        return self.index_bits - 1

    @property
    def family_size(self) -> int:
        return 1 << self.log2_family_size

    @property
    def parts_needed(self) -> int:
        return len(self.part_ids) if self.part_ids else 1

    def index_from_rank(self, r: int) -> int:
        """Map 0 <= r < family_size onto a member index."""
        if not 0 <= r < self.family_size:
            raise UsageError("rank out of range")
        if self.variant == "hamming":
            x = 0
            for b in _iter_bits(r):
                x ^= self.index_code.basis[b]
            return x
        parity = popcount(r) & 1
        return r | parity << (self.index_bits - 1)

    def check_index(self, s: int) -> None:
        if s < 0 or s >> self.index_bits:
            raise UsageError(f"index {s:#x} does not fit in {self.index_bits} bits")
        if self.variant == "hamming":
            if bincode.syndrome(self.index_code, s):
                raise UsageError(f"index {s:#x} is not an even-weight Hamming codeword")
        elif popcount(s) & 1:
            raise UsageError(f"index {s:#x} has odd weight")

    def part(self, s: int) -> int:
        """Rank of the part containing index s (0 when there is no H layer)."""
        if self.coloring == "syndrome":
            sid = bincode.syndrome(self.part_code, s)
            return bisect_left(self.part_ids, sid)
        if self.coloring == "greedy":
            return int(self.greedy_colors[s])
        return 0

    def matching_union(self, s: int) -> int:
        bits = 0
        for b in _iter_bits(s):
            bits |= self._matching_bits[b]
        return bits

    def h_layer(self, part: int) -> LabeledGraph:
        return LabeledGraph(self.n, self._h_layers[part] if self._h_layers else 0)

    def member(self, s: int) -> LabeledGraph:
        self.check_index(s)
        bits = self.matching_union(s)
        if self._h_layers:
            bits |= self._h_layers[self.part(s)]
        return LabeledGraph(self.n, bits)

    # -- persistence --------------------------------------------------
    def to_json(self, h_code_file: Optional[str] = None) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "variant": self.variant,
            "n": self.n,
            "leaves": self.leaves,
            "prime_p": self.prime_p,
            "coloring": self.coloring,
            "h_order": self.h_order,
            "h_code_file": h_code_file,
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# builders

def _matching_system(n: int, factorization: Optional[OneFactorization]) -> tuple[RestrictedMatchingSystem, Optional[int]]:
    if factorization is None:
        factorization = p1f_for_order(n + 1)
    if factorization.order != n + 1:
        raise UsageError(f"need a factorization of K_{n + 1}, got K_{factorization.order}")
    prime = n if is_prime(n) else None
    return restrict_to_n(factorization), prime


def greedy_part_coloring(index_bits: int) -> np.ndarray:
    """Greedy coloring of even subsets where S ~ S' iff |S xor S'| = 2 (ascending S)."""
    size = 1 << index_bits
    colors = np.full(size, -1, dtype=np.int32)
    pairs = [(1 << a) | (1 << b) for a in range(index_bits) for b in range(a + 1, index_bits)]
    for s in range(size):
        if popcount(s) & 1:
            continue
        taken = {int(colors[s ^ p]) for p in pairs}
        c = 0
        while c in taken:
            c += 1
        colors[s] = c
    return colors


def build_treecode(
    n: int,
    leaves: int,
    factorization: Optional[OneFactorization] = None,
    coloring: str = "syndrome",
    seed: int = 0,
    h_order: str = "lexicographic",
) -> TreeCodeParams:
    """Family of 2^(n-2) graphs on n vertices (n odd) with leaves-leaf tree differences."""
    if n < 5 or n % 2 == 0:
        raise UsageError("n must be an odd integer >= 5")
    if leaves < 2:
        raise UsageError("leaf count must be at least 2")
    system, prime = _matching_system(n, factorization)
    index_bits = n - 1
    if leaves == 2:
        # two matchings already give a Hamiltonian path; no H layer needed
        return TreeCodeParams("gv-partition", n, 2, system, prime, "none", index_bits, reserved=n - 1, seed=seed)
    if coloring not in ("syndrome", "greedy"):
        raise UsageError(f"unknown coloring {coloring!r}")

    part_code = None
    greedy_colors = None
    if coloring == "syndrome":
        part_code = bincode.even_d4_linear(index_bits)
        # syndromes of even subsets: the span of the syndromes of {0, b}
        gens = [bincode.syndrome(part_code, 1 | 1 << b) for b in range(1, index_bits)]
        part_ids = tuple(sorted(bincode.span(bincode.rref(gens)[0])))
    else:
        if n > GREEDY_COLORING_MAX_N:
            raise UsageError(f"greedy coloring is limited to n <= {GREEDY_COLORING_MAX_N}")
        greedy_colors = greedy_part_coloring(index_bits)
        part_ids = tuple(range(int(greedy_colors.max()) + 1))

    h_len = (n - 1) // 2
    d = 3 * leaves - 5
    parts = len(part_ids)
    if d > h_len:
        raise InfeasibleError(
            f"H-layer distance {d} exceeds the reserved matching size {h_len}; parts needed {parts}, words available 0"
        )
    h_code = bincode.gv_greedy(h_len, d, h_order, target=parts, seed=seed)
    if h_code.size < parts:
        delta_bound = (n - 1) * (n - 2) // 2 + 1
        raise InfeasibleError(
            f"need {parts} H-layer words of length {h_len} at distance {d} "
            f"(Δ+1 partition bound {delta_bound}), greedy code has only {h_code.size}"
        )
    return TreeCodeParams(
        "gv-partition", n, leaves, system, prime, coloring, index_bits,
        reserved=n - 1, h_code=h_code, part_code=part_code, part_ids=part_ids,
        greedy_colors=greedy_colors, seed=seed, h_order=h_order,
    )


def hamming_leaf_range(k: int) -> tuple[int, int]:
    n = (1 << k) - 1
    return 3, (n + 9) // 6


def build_hamming_treecode(
    k: int, leaves: int, factorization: Optional[OneFactorization] = None
) -> TreeCodeParams:
    """Family of 2^(n-k-1) graphs, n = 2^k - 1, indexed by even Hamming codewords."""
    if k < 2:
        raise UsageError("k must be at least 2")
    n = (1 << k) - 1
    lo, hi = hamming_leaf_range(k)
    if not lo <= leaves <= hi:
        raise UsageError(f"leaf count must lie in [3, (n+9)/6] = [{lo}, {(n + 9) / 6:.3f}] for n={n}")
    system, prime = _matching_system(n, factorization)
    index_code = bincode.even_weight_hamming_code(k)
    return TreeCodeParams(
        "hamming", n, leaves, system, prime, "none", n, index_code=index_code,
    )


def load_generator(data: dict, h_code: Optional[BinaryCode] = None) -> TreeCodeParams:
    if data.get("format_version") != FORMAT_VERSION:
        raise UsageError(f"unsupported generator format {data.get('format_version')!r}")
    if data["variant"] == "hamming":
        k = (data["n"] + 1).bit_length() - 1
        params = build_hamming_treecode(k, data["leaves"])
    else:
        params = build_treecode(
            data["n"], data["leaves"], coloring=data["coloring"] if data["leaves"] > 2 else "syndrome",
            seed=data.get("seed", 0), h_order=data.get("h_order", "lexicographic"),
        )
    if h_code is not None and params.h_code is not None:
        if tuple(h_code.words[: params.parts_needed]) != tuple(params.h_code.words[: params.parts_needed]):
            raise UsageError("stored H code does not match the rebuilt one")
    return params


# ---------------------------------------------------------------------------
# pair certificates

def check_certificate(diff: LabeledGraph, tree: LabeledGraph, leaves: int) -> Optional[str]:
    """Independent check; returns None when the tree is valid, else the reason."""
    if not tree.issubset(diff):
        return "tree is not contained in the symmetric difference"
    count = spanning_tree_leaf_count(tree)
    if count is None:
        return "not a spanning tree"
    if count != leaves:
        return f"tree has {count} leaves, expected {leaves}"
    return None


def verify_pair(params: TreeCodeParams, i: int, j: int) -> PairCertificate:
    if i == j:
        raise UsageError("a pair needs two distinct members")
    diff = params.member(i) ^ params.member(j)
    mats = list(_iter_bits(i ^ j))
    need_third = params.leaves >= 3
    same_part = params.part(i) == params.part(j)
    system = params.system
    if params.variant == "hamming" or same_part or not need_third:
        if need_third and len(mats) < 3:
            raise VerificationError(f"indices {i:#x},{j:#x} differ in only {len(mats)} matchings")
        a, b = mats[0], mats[1]
        extra = system.matchings[mats[2]].edges() if need_third else []
        source = f"matching {mats[2]}" if need_third else "none"
    else:
        a, b = mats[0], mats[1]
        layer = params.h_layer(params.part(i)) ^ params.h_layer(params.part(j))
        extra = layer.edges()
        source = "reserved matching"
    path = hamiltonian_path_order(system.matchings[a] | system.matchings[b])
    try:
        res = augment_to_leaves(path, extra, params.leaves)
    except (UsageError, VerificationError) as exc:
        raise VerificationError(
            f"augmentation failed for pair ({i:#x},{j:#x}): {exc}; path matchings {a},{b}; "
            f"extra from {source}: {extra}"
        ) from exc
    problem = check_certificate(diff, res.tree, params.leaves)
    if problem:
        raise VerificationError(
            f"certificate for pair ({i:#x},{j:#x}) rejected: {problem}; path {path}; chords {res.chords}"
        )
    return PairCertificate(i, j, res.tree, (a, b), res.chords, source, params.leaves)


def sample_pairs(params: TreeCodeParams, count: int, seed: int) -> list[tuple[int, int]]:
    """Uniform distinct member pairs (by rank), sorted for deterministic output."""
    size = params.family_size
    rng = substream(seed, "pairs", params.variant, params.n, params.leaves)
    pairs = set()
    total = size * (size - 1) // 2
    if count >= total:
        return [(params.index_from_rank(a), params.index_from_rank(b)) for a in range(size) for b in range(a + 1, size)]
    while len(pairs) < count:
        a, b = (int(x) for x in rng.integers(0, size, 2))
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    return [(params.index_from_rank(a), params.index_from_rank(b)) for a, b in sorted(pairs)]


def verify_family(params: TreeCodeParams, samples: int, seed: int) -> tuple[list[PairCertificate], list[str]]:
    certs, failures = [], []
    for i, j in sample_pairs(params, samples, seed):
        try:
            certs.append(verify_pair(params, i, j))
        except VerificationError as exc:
            failures.append(str(exc))
    return certs, failures


def export_roster(params: TreeCodeParams, limit: int = 1 << 16) -> list[LabeledGraph]:
    if params.family_size > limit:
        raise UsageError(f"family of size 2^{params.log2_family_size} is too large to list")
    return [params.member(params.index_from_rank(r)) for r in range(params.family_size)]


def dumps_certificates(certs: list[PairCertificate]) -> str:
    return json.dumps([c.to_json() for c in certs], indent=None)


__all__ = [
    "AugmentResult",
    "PairCertificate",
    "TreeCodeParams",
    "augment_to_leaves",
    "build_hamming_treecode",
    "build_treecode",
    "check_certificate",
    "edge_index",
    "export_roster",
    "greedy_part_coloring",
    "load_generator",
    "sample_pairs",
    "verify_family",
    "verify_pair",
]
