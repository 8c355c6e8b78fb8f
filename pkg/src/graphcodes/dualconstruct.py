"""Blocker hosts and the dual bound they give.

If no two subgraphs of a host H have a symmetric difference in the class F,
the 2^e(H) subgraphs of H form an F-free family, so D_F(n) >= 2^e(H) and

    log2 M_F(n) <= C(n,2) - e(H).

This module builds such hosts for "at least k copies", "k disjoint copies" and
"contains K_{t,t}", computes small Turán numbers exhaustively, and carries out
the dependent-random-choice embedding of sparse bipartite patterns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Callable, Optional

import numpy as np

from .errors import NotFoundError, ResourceError, UsageError
from .graphcore import (
    LabeledGraph,
    PatternGraph,
    _iter_bits,
    _pack_bits,
    contains_Kst,
    contains_copy,
    count_copies,
    edge_index,
    iter_embeddings,
    iter_Kst,
    max_disjoint_copies,
    n_slots,
    popcount,
    turan_graph,
)
from .rng import substream


@dataclass
class BlockerReport:
    host: LabeledGraph
    predicate: str
    edge_count: int
    dual_log_bound: int
    witness_checks: dict = field(default_factory=dict)
    consistent: bool = True

    def to_json(self) -> dict:
        return {
            "format_version": 1,
            "predicate": self.predicate,
            "host": self.host.to_line(),
            "edge_count": self.edge_count,
            "dual_log_bound": self.dual_log_bound,
            "consistent": self.consistent,
            "witness_checks": self.witness_checks,
        }


def dual_bound(
    host: LabeledGraph,
    predicate: Optional[Callable[[LabeledGraph], bool]] = None,
    description: str = "",
    exhaustive_edges: int = 12,
) -> BlockerReport:
    """Dual bound C(n,2) - e(H), optionally checking that the predicate fails on H.

    All predicates used here are monotone, so failing on H means failing on every
    subgraph (and every XOR of two subgraphs, which is again a subgraph).  For
    small hosts the subgraphs are also checked one by one.
    """
    report = BlockerReport(host, description, host.edge_count, n_slots(host.n) - host.edge_count)
    if predicate is None:
        return report
    fails_on_host = not predicate(host)
    checks = {"host_violates_predicate": fails_on_host}
    if host.edge_count <= exhaustive_edges:
        edges = list(_iter_bits(host.bits))
        bad = 0
        for mask in range(1 << len(edges)):
            bits = sum(1 << edges[b] for b in _iter_bits(mask))
            bad += predicate(LabeledGraph(host.n, bits))
        checks["subgraphs_checked"] = 1 << len(edges)
        checks["subgraphs_satisfying_predicate"] = bad
        fails_on_host = fails_on_host and bad == 0
    report.witness_checks = checks
    report.consistent = fails_on_host
    return report


# ---------------------------------------------------------------------------
# Turán numbers

def _creates_copy(adj: list[int], pattern: PatternGraph, u: int, v: int) -> bool:
    """Does the graph with adjacency ``adj`` (already containing uv) hold a copy through uv?"""
    for a, b in pattern.graph.edges():
        for x, y in ((u, v), (v, u)):
            if next(iter_embeddings(pattern.graph, adj, fixed={a: x, b: y}), None) is not None:
                return True
    return False


def _greedy_free(n: int, pattern: PatternGraph) -> int:
    adj = [0] * n
    bits = 0
    for i, (u, v) in enumerate(combinations(range(n), 2)):
        adj[u] |= 1 << v
        adj[v] |= 1 << u
        if _creates_copy(adj, pattern, u, v):
            adj[u] &= ~(1 << v)
            adj[v] &= ~(1 << u)
        else:
            bits |= 1 << i
    return bits


@lru_cache(maxsize=256)
def _extremal(n: int, pattern_bits: int, pattern_n: int, budget: int) -> tuple[int, int]:
    pattern = PatternGraph(LabeledGraph(pattern_n, pattern_bits))
    if pattern.e == 0:
        raise UsageError("the pattern needs at least one edge")
    if n < pattern.v:
        return n_slots(n), (1 << n_slots(n)) - 1
    # deleting a vertex leaves an L-free graph: ex(n) <= n * ex(n-1) / (n-2), and a
    # graph with e edges has minimum degree >= e - ex(n-1)
    upper = n_slots(n)
    prev = 0
    if n >= 3:
        prev, _ = _extremal(n - 1, pattern_bits, pattern_n, budget)
        upper = min(upper, n * prev // (n - 2))
    if pattern.graph.edge_count == n_slots(pattern.v):
        best_bits = turan_graph(n, pattern.v - 1).bits
    else:
        best_bits = _greedy_free(n, pattern)
    best = popcount(best_bits)
    if best >= upper and not contains_copy(LabeledGraph(n, best_bits), pattern):
        return best, best_bits
    pairs = list(combinations(range(n), 2))
    total = len(pairs)
    # undecided[i][w]: slots at index >= i that touch w
    undecided = [[0] * n for _ in range(total + 1)]
    for i in range(total - 1, -1, -1):
        undecided[i] = undecided[i + 1][:]
        for w in pairs[i]:
            undecided[i][w] += 1
    adj = [0] * n
    deg = [0] * n
    nodes = 0

    class _Done(Exception):
        pass

    def rec(i: int, bits: int, count: int):
        nonlocal best, best_bits, nodes
        if count + (total - i) <= best:
            return
        dmin = best + 1 - prev
        rem = undecided[i]
        if any(deg[w] + rem[w] < dmin for w in range(n)):
            return
        if i == total:
            best, best_bits = count, bits
            if best >= upper:
                raise _Done
            return
        nodes += 1
        if nodes > budget:
            raise ResourceError(f"ex({n}, L) search exceeded {budget} nodes", best=best)
        u, v = pairs[i]
        adj[u] |= 1 << v
        adj[v] |= 1 << u
        if not _creates_copy(adj, pattern, u, v):
            deg[u] += 1
            deg[v] += 1
            rec(i + 1, bits | 1 << i, count + 1)
            deg[u] -= 1
            deg[v] -= 1
        adj[u] &= ~(1 << v)
        adj[v] &= ~(1 << u)
        rec(i + 1, bits, count)

    try:
        rec(0, 0, 0)
    except _Done:
        pass
    if contains_copy(LabeledGraph(n, best_bits), pattern):
        raise AssertionError("extremal witness contains the pattern")
    return best, best_bits


def turan_ex_bruteforce(n: int, pattern: PatternGraph, budget: int = 2_000_000) -> int:
    """Exact ex(n, L) by branch and bound over edge inclusion (n <= 10)."""
    if n > 10:
        raise ResourceError("exhaustive Turán numbers are limited to n <= 10")
    return _extremal(n, pattern.graph.bits, pattern.v, budget)[0]


def extremal_graph(n: int, pattern: PatternGraph, budget: int = 2_000_000) -> LabeledGraph:
    """An L-free graph with ex(n, L) edges: Turán graph for cliques, else search."""
    if pattern.e == n_slots(pattern.v):
        return turan_graph(n, pattern.v - 1)
    if n > 10:
        raise ResourceError("extremal graphs for non-complete patterns need n <= 10")
    return LabeledGraph(n, _extremal(n, pattern.graph.bits, pattern.v, budget)[1])


# ---------------------------------------------------------------------------
# blockers

def build_kcopy_blocker(n: int, pattern: PatternGraph, k: int) -> BlockerReport:
    """Extremal L-free graph plus greedily added edges while fewer than k copies remain."""
    if k <= 0:
        raise UsageError("k must be positive")
    host = extremal_graph(n, pattern)
    start = host.edge_count
    for u, v in combinations(range(n), 2):
        if host.has_edge(u, v):
            continue
        cand = host.add_edge(u, v)
        if count_copies(cand, pattern) < k:
            host = cand
    copies = count_copies(host, pattern)
    report = dual_bound(host, None, f"at least {k} copies of {pattern.name or 'L'}")
    report.witness_checks = {"copies": copies, "extremal_start_edges": start, "added_edges": host.edge_count - start}
    report.consistent = copies < k
    return report


def kdisjoint_edge_formula(n: int, k: int, ex_rest: int) -> int:
    return comb(k - 1, 2) + (k - 1) * (n - k + 1) + ex_rest


def build_kdisjoint_blocker(n: int, pattern: PatternGraph, k: int) -> BlockerReport:
    """Clique on the first k-1 vertices, fully joined to an extremal L-free graph on the rest."""
    if k < 1 or k - 1 >= n:
        raise UsageError(f"need 1 <= k <= n, got k={k}, n={n}")
    s = k - 1
    rest = extremal_graph(n - s, pattern)
    edges = [(u, v) for u, v in combinations(range(s), 2)]
    edges += [(u, v) for u in range(s) for v in range(s, n)]
    edges += [(u + s, v + s) for u, v in rest.edges()]
    host = LabeledGraph.from_edges(n, edges)
    formula = kdisjoint_edge_formula(n, k, rest.edge_count)
    packing, exact = max_disjoint_copies(host, pattern)
    report = dual_bound(host, None, f"{k} vertex-disjoint copies of {pattern.name or 'L'}")
    report.witness_checks = {
        "max_disjoint_copies": packing,
        "exact": exact,
        "closed_form_edges": formula,
        "ex_rest": rest.edge_count,
    }
    report.consistent = packing <= k - 1 and host.edge_count == formula
    return report


# ---------------------------------------------------------------------------
# random K_{t,t}-free hosts

def random_graph(n: int, p: float, rng: np.random.Generator) -> LabeledGraph:
    flat = (rng.random(n_slots(n)) < p).astype(np.uint8)
    return LabeledGraph(n, _pack_bits(flat))


def expected_ktt_copies(n: int, t: int, delta: float) -> float:
    """E[X] = 1/2 * C(n,2t) * C(2t,t) * delta^(t^2) for G(n, delta)."""
    return 0.5 * comb(n, 2 * t) * comb(2 * t, t) * delta ** (t * t)


def ktt_copies(g: LabeledGraph, t: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Every copy of K_{t,t} as (A, B) with min(A) < min(B)."""
    out = []
    for a, common in iter_Kst(g, t, t):
        cand = [v for v in _iter_bits(common) if v > a[0]]
        for b in combinations(cand, t):
            out.append((a, b))
    return out


def delta_for_c(c: float) -> float:
    """The edge density 2^(-2/c) paired with t = c log2 n."""
    return 2.0 ** (-2.0 / c)


def random_ktt_free(
    n: int, t: int, delta: float, seed: int = 0, retries: int = 20
) -> BlockerReport:
    """Sample G(n, delta), delete one edge per K_{t,t} copy, accept if dense enough.

    Copies are handled in lexicographic order of their vertex sets; an intact
    copy loses its lexicographically smallest edge.
    """
    if not 0 < delta < 1:
        raise UsageError("delta must lie in (0, 1)")
    if t < 1 or 2 * t > n:
        raise UsageError(f"K_{{{t},{t}}} needs 2t <= n")
    target = delta * n_slots(n)
    expected = expected_ktt_copies(n, t, delta)
    history = []
    for attempt in range(retries):
        g = random_graph(n, delta, substream(seed + attempt, "gnp", n, t))
        copies = ktt_copies(g, t)
        copies.sort(key=lambda ab: (tuple(sorted(ab[0] + ab[1])), ab[0]))
        bits = g.bits
        deleted = 0
        for a, b in copies:
            slots = sorted(edge_index(x, y, n) for x in a for y in b)
            if all(bits >> s & 1 for s in slots):
                bits &= ~(1 << slots[0])
                deleted += 1
        host = LabeledGraph(n, bits)
        free = not contains_Kst(host, t, t)
        ok = free and host.edge_count >= target - len(copies)
        history.append({"retry": attempt, "sampled_edges": g.edge_count, "copies": len(copies),
                        "deleted": deleted, "final_edges": host.edge_count, "ktt_free": free})
        if ok:
            report = dual_bound(host, None, f"contains K_{t},{t}")
            report.witness_checks = {
                "ktt_free": free,
                "retry": attempt,
                "x_observed": len(copies),
                "deleted_edges": deleted,
                "sampled_edges": g.edge_count,
                "expected_x": expected,
                "edge_target": target - len(copies),
            }
            return report
    raise NotFoundError(f"no accepted K_{t},{t}-free graph in {retries} retries", {"history": history})


# ---------------------------------------------------------------------------
# dependent random choice

@dataclass(frozen=True)
class DrcParams:
    alpha: float
    t: int
    r: int
    m: int
    u: int
    eps: Optional[float] = None

    def slack(self, n: int) -> float:
        return self.alpha**self.t * n - comb(n, self.r) * (self.m / n) ** self.t


@dataclass(frozen=True)
class BipartitePattern:
    """Bipartite graph on A = {0..a-1}, B = {0..b-1}; edges are (a_index, b_index)."""

    a: int
    b: int
    edges: tuple[tuple[int, int], ...]

    @property
    def order(self) -> int:
        return self.a + self.b

    def left_degree(self) -> int:
        return max((sum(1 for x, _ in self.edges if x == i) for i in range(self.a)), default=0)

    def is_connected(self) -> bool:
        adj = [0] * self.order
        for x, y in self.edges:
            adj[x] |= 1 << (self.a + y)
            adj[self.a + y] |= 1 << x
        seen, frontier = 1, 1
        while frontier:
            nxt = 0
            for v in _iter_bits(frontier):
                nxt |= adj[v]
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.order) - 1

    @classmethod
    def caterpillar(cls, b: int) -> "BipartitePattern":
        """B_0 - A_0 - B_1 - A_1 - ... - B_{b-1} - A_{b-1}: 2b vertices, left degrees <= 2."""
        edges = [(i, i) for i in range(b)] + [(i, i + 1) for i in range(b - 1)]
        return cls(b, b, tuple(sorted(edges)))


@dataclass
class Embedding:
    phi_a: list[int]
    phi_b: list[int]
    retry: int
    u_size: int


def drc_embed(
    g: LabeledGraph,
    pattern: BipartitePattern,
    params: DrcParams,
    seed: int = 0,
    retries: int = 10,
    subset_budget: int = 5_000_000,
) -> Embedding:
    n = g.n
    if not 0 < params.alpha < 1:
        raise UsageError("alpha must lie in (0, 1)")
    if g.edge_count < params.alpha / 2 * n * n:
        raise UsageError(f"host has {g.edge_count} edges, fewer than alpha/2 n^2 = {params.alpha / 2 * n * n:.1f}")
    if params.slack(n) < params.u:
        raise UsageError("alpha^t n - C(n,r) (m/n)^t >= u does not hold")
    if not pattern.is_connected():
        raise UsageError("pattern must be connected")
    if pattern.left_degree() > params.r:
        raise UsageError(f"pattern has a left vertex with more than r={params.r} neighbors")
    if params.m < pattern.order or params.u < pattern.b:
        raise UsageError("need m >= |V(L)| and u >= |B|")
    adj = g.adjacency
    full = (1 << n) - 1
    b_nbrs = [[y for x, y in pattern.edges if x == i] for i in range(pattern.a)]

    def common(vs) -> int:
        c = full
        for v in vs:
            c &= adj[v]
        return c

    for attempt in range(retries):
        rng = substream(seed + attempt, "drc", n)
        sample = rng.integers(0, n, params.t).tolist()
        u_set = common(sample)
        members = list(_iter_bits(u_set))
        if comb(len(members), params.r) > subset_budget:
            raise ResourceError("too many r-subsets of U to prune")
        for s in combinations(members, params.r):
            if all(u_set >> v & 1 for v in s) and popcount(common(s)) < params.m:
                u_set &= ~(1 << s[-1])
        good = list(_iter_bits(u_set))
        if len(good) < pattern.b:
            continue
        phi_b = good[: pattern.b]
        used = sum(1 << v for v in phi_b)
        phi_a: list[int] = []
        for i in range(pattern.a):
            cand = common(phi_b[y] for y in b_nbrs[i]) & ~used
            if not cand:
                break
            v = (cand & -cand).bit_length() - 1
            phi_a.append(v)
            used |= 1 << v
        else:
            emb = Embedding(phi_a, phi_b, attempt, len(good))
            if not verify_embedding(g, pattern, emb):
                raise AssertionError("embedding failed its edge check")
            return emb
    raise NotFoundError(f"no embedding found in {retries} retries")


def verify_embedding(g: LabeledGraph, pattern: BipartitePattern, emb: Embedding) -> bool:
    image = emb.phi_a + emb.phi_b
    if len(set(image)) != len(image):
        return False
    return all(g.has_edge(emb.phi_a[x], emb.phi_b[y]) for x, y in pattern.edges)


def log2_dual_limit(report: BlockerReport) -> float:
    """Rate upper bound (C(n,2) - e(H)) / C(n,2)."""
    total = n_slots(report.host.n)
    return report.dual_log_bound / total if total else 0.0


__all__ = [
    "BipartitePattern",
    "BlockerReport",
    "DrcParams",
    "Embedding",
    "build_kcopy_blocker",
    "build_kdisjoint_blocker",
    "delta_for_c",
    "drc_embed",
    "dual_bound",
    "expected_ktt_copies",
    "extremal_graph",
    "kdisjoint_edge_formula",
    "ktt_copies",
    "random_graph",
    "random_ktt_free",
    "turan_ex_bruteforce",
    "verify_embedding",
]
