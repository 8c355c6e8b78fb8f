"""Labeled graphs on {0..n-1} stored as a bitset over the C(n,2) edge slots.

Edge {u,v} with u < v lives at bit ``u*(2n-u-1)/2 + (v-u-1)``, i.e. pairs are
numbered lexicographically.  Vertices are 0-based everywhere.

A graph is an immutable value; every operation here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import ResourceError, UsageError

#: default node budget for exhaustive embedding searches
EMBED_BUDGET = 5_000_000


def n_slots(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(u: int, v: int, n: int) -> int:
    """Canonical slot of edge {u, v}; symmetric in its arguments."""
    if not (0 <= u < n and 0 <= v < n) or u == v:
        raise UsageError(f"edge ({u},{v}) is not a pair of distinct vertices of [0,{n})")
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


@lru_cache(maxsize=128)
def _pair_table(n: int) -> tuple:
    return tuple(combinations(range(n), 2))


def edge_pair(i: int, n: int) -> tuple[int, int]:
    """Inverse of :func:`edge_index`."""
    if not 0 <= i < n_slots(n):
        raise UsageError(f"edge slot {i} out of range for n={n}")
    if n <= 256:
        return _pair_table(n)[i]
    # row u starts at u*(2n-u-1)/2; walk rows (only used for large n)
    u = 0
    start = 0
    while start + (n - u - 1) <= i:
        start += n - u - 1
        u += 1
    return u, u + 1 + (i - start)


def _iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class LabeledGraph:
    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise UsageError("a graph needs at least one vertex")
        if self.bits < 0 or self.bits >> n_slots(self.n):
            raise UsageError("edge bitset has bits outside the C(n,2) slots")

    # -- construction -------------------------------------------------
    @classmethod
    def empty(cls, n: int) -> "LabeledGraph":
        return cls(n, 0)

    @classmethod
    def complete(cls, n: int) -> "LabeledGraph":
        return cls(n, (1 << n_slots(n)) - 1)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "LabeledGraph":
        bits = 0
        for u, v in edges:
            bits |= 1 << edge_index(u, v, n)
        return cls(n, bits)

    @classmethod
    def from_adjacency(cls, adj: np.ndarray) -> "LabeledGraph":
        """Build from a symmetric 0/1 matrix (only the upper triangle is read)."""
        n = adj.shape[0]
        iu = np.triu_indices(n, 1)
        flat = np.asarray(adj[iu], dtype=np.uint8)
        return cls(n, _pack_bits(flat))

    # -- views --------------------------------------------------------
    def edges(self) -> list[tuple[int, int]]:
        return [edge_pair(i, self.n) for i in _iter_bits(self.bits)]

    @property
    def edge_count(self) -> int:
        return popcount(self.bits)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.bits >> edge_index(u, v, self.n) & 1)

    def add_edge(self, u: int, v: int) -> "LabeledGraph":
        return LabeledGraph(self.n, self.bits | 1 << edge_index(u, v, self.n))

    def remove_edge(self, u: int, v: int) -> "LabeledGraph":
        return LabeledGraph(self.n, self.bits & ~(1 << edge_index(u, v, self.n)))

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        """Neighbor bitmask per vertex (bit w of ``adjacency[v]`` set iff v~w)."""
        n = self.n
        if n > 64:
            return _adjacency_numpy(self)
        adj = [0] * n
        table = _pair_table(n)
        for i in _iter_bits(self.bits):
            u, v = table[i]
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return tuple(adj)

    def degrees(self) -> tuple[int, ...]:
        return tuple(popcount(a) for a in self.adjacency)

    def neighbors(self, v: int) -> list[int]:
        return list(_iter_bits(self.adjacency[v]))

    def issubset(self, other: "LabeledGraph") -> bool:
        _same_order(self, other)
        return self.bits & ~other.bits == 0

    def relabel(self, mapping: dict[int, int] | list[int], n: Optional[int] = None) -> "LabeledGraph":
        """Image of this graph under a vertex map, placed on ``n`` vertices."""
        n = self.n if n is None else n
        return LabeledGraph.from_edges(n, ((mapping[u], mapping[v]) for u, v in self.edges()))

    # -- algebra ------------------------------------------------------
    def __xor__(self, other: "LabeledGraph") -> "LabeledGraph":
        return symdiff(self, other)

    def __or__(self, other: "LabeledGraph") -> "LabeledGraph":
        _same_order(self, other)
        return LabeledGraph(self.n, self.bits | other.bits)

    def __and__(self, other: "LabeledGraph") -> "LabeledGraph":
        _same_order(self, other)
        return LabeledGraph(self.n, self.bits & other.bits)

    # -- text format --------------------------------------------------
    def to_hex(self) -> str:
        width = -(-n_slots(self.n) // 4)
        return format(self.bits, f"0{width}x") if width else ""

    def to_line(self) -> str:
        return f"n={self.n} edges={self.to_hex()}"

    @classmethod
    def from_line(cls, line: str) -> "LabeledGraph":
        try:
            head, tail = line.strip().split()
            if not head.startswith("n=") or not tail.startswith("edges="):
                raise ValueError
            n = int(head[2:])
            digits = tail[6:]
        except ValueError:
            raise UsageError(f"malformed graph line: {line!r}") from None
        if len(digits) != -(-n_slots(n) // 4):
            raise UsageError(f"graph line for n={n} needs {-(-n_slots(n) // 4)} hex digits")
        return cls(n, int(digits, 16) if digits else 0)

    def __repr__(self):
        if self.n <= 12:
            return f"LabeledGraph(n={self.n}, edges={self.edges()})"
        return f"LabeledGraph(n={self.n}, e={self.edge_count})"


def _same_order(g: LabeledGraph, h: LabeledGraph) -> None:
    if g.n != h.n:
        raise UsageError(f"graphs live on different vertex sets ({g.n} vs {h.n})")


def _pack_bits(flat: np.ndarray) -> int:
    packed = np.packbits(flat, bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _adjacency_numpy(g: LabeledGraph) -> tuple[int, ...]:
    n = g.n
    m = n_slots(n)
    raw = g.bits.to_bytes((m + 7) // 8, "little")
    flat = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:m].astype(bool)
    mat = np.zeros((n, n), dtype=bool)
    iu = np.triu_indices(n, 1)
    mat[iu] = flat
    mat |= mat.T
    rows = np.packbits(mat, axis=1, bitorder="little")
    return tuple(int.from_bytes(r.tobytes(), "little") for r in rows)


def symdiff(g: LabeledGraph, h: LabeledGraph) -> LabeledGraph:
    _same_order(g, h)
    return LabeledGraph(g.n, g.bits ^ h.bits)


# ---------------------------------------------------------------------------
# standard graphs

def path_graph(n: int, order: Optional[list[int]] = None) -> LabeledGraph:
    order = list(range(n)) if order is None else order
    return LabeledGraph.from_edges(n, zip(order, order[1:]))


def cycle_graph(n: int) -> LabeledGraph:
    return LabeledGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> LabeledGraph:
    return LabeledGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_bipartite(s: int, t: int) -> LabeledGraph:
    return LabeledGraph.from_edges(s + t, [(i, s + j) for i in range(s) for j in range(t)])


def turan_graph(n: int, parts: int) -> LabeledGraph:
    """Complete balanced ``parts``-partite graph; parts are contiguous label blocks."""
    if parts < 1:
        raise UsageError("Turán graph needs at least one part")
    sizes = [n // parts + (1 if i < n % parts else 0) for i in range(parts)]
    block = []
    for p, size in enumerate(sizes):
        block += [p] * size
    return LabeledGraph.from_edges(
        n, [(u, v) for u, v in combinations(range(n), 2) if block[u] != block[v]]
    )


# ---------------------------------------------------------------------------
# connectivity and trees

def component_mask(adj: tuple[int, ...] | list[int], start: int, within: int = -1) -> int:
    """Bitmask of the vertices reachable from ``start`` (restricted to ``within``)."""
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        for v in _iter_bits(frontier):
            nxt |= adj[v]
        nxt &= within & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def is_spanning_connected(g: LabeledGraph) -> bool:
    """All n vertices in one component; an isolated vertex makes this False."""
    return component_mask(g.adjacency, 0) == (1 << g.n) - 1


def spanning_tree_leaf_count(t: LabeledGraph) -> Optional[int]:
    """Number of leaves if ``t`` is a spanning tree, otherwise None."""
    if t.edge_count != t.n - 1 or not is_spanning_connected(t):
        return None
    if t.n == 1:
        return 0
    return sum(1 for d in t.degrees() if d == 1)


# ---------------------------------------------------------------------------
# patterns and embeddings

@dataclass(frozen=True)
class PatternGraph:
    graph: LabeledGraph
    name: str = field(default="", compare=False)

    @property
    def v(self) -> int:
        return self.graph.n

    @property
    def e(self) -> int:
        return self.graph.edge_count

    @cached_property
    def chi(self) -> int:
        return chromatic_number(self)

    @cached_property
    def automorphisms(self) -> int:
        return _count_embeddings(self.graph, self.graph.adjacency, EMBED_BUDGET)

    @classmethod
    def complete(cls, k: int) -> "PatternGraph":
        return cls(LabeledGraph.complete(k), f"K{k}")

    @classmethod
    def path(cls, k: int) -> "PatternGraph":
        return cls(path_graph(k), f"P{k}")

    @classmethod
    def cycle(cls, k: int) -> "PatternGraph":
        return cls(cycle_graph(k), f"C{k}")

    @classmethod
    def bipartite(cls, s: int, t: int) -> "PatternGraph":
        return cls(complete_bipartite(s, t), f"K{s},{t}")

    @classmethod
    def parse(cls, text: str) -> "PatternGraph":
        """Parse ``K3``, ``P4``, ``C5``, ``K2,3`` or a graph line."""
        s = text.strip()
        try:
            if s.startswith("n="):
                return cls(LabeledGraph.from_line(s), s)
            kind, rest = s[0].upper(), s[1:]
            if kind == "K" and "," in rest:
                a, b = rest.split(",")
                return cls.bipartite(int(a), int(b))
            ctor = {"K": cls.complete, "P": cls.path, "C": cls.cycle}[kind]
            return ctor(int(rest))
        except (KeyError, ValueError, IndexError):
            raise UsageError(f"cannot parse pattern {text!r}") from None


def _embedding_order(pattern: LabeledGraph) -> list[int]:
    # BFS per component, highest degree first, so most vertices have a mapped neighbor
    adj = pattern.adjacency
    deg = pattern.degrees()
    order: list[int] = []
    placed = 0
    while len(order) < pattern.n:
        root = max((v for v in range(pattern.n) if not placed >> v & 1), key=lambda v: deg[v])
        queue = [root]
        placed |= 1 << root
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in sorted(_iter_bits(adj[v] & ~placed), key=lambda w: -deg[w]):
                placed |= 1 << w
                queue.append(w)
    return order


def iter_embeddings(
    pattern: LabeledGraph,
    host_adj: tuple[int, ...] | list[int],
    budget: int = EMBED_BUDGET,
    fixed: Optional[dict[int, int]] = None,
) -> Iterator[tuple[int, ...]]:
    """Yield injective edge-preserving maps pattern -> host as tuples phi[pattern_vertex].

    ``fixed`` pins some pattern vertices in advance.  Raises ResourceError once
    more than ``budget`` search nodes have been visited.
    """
    host_n = len(host_adj)
    padj = pattern.adjacency
    order = _embedding_order(pattern)
    fixed = fixed or {}
    if fixed:
        order = [v for v in order if v in fixed] + [v for v in order if v not in fixed]
    phi = [-1] * pattern.n
    all_host = (1 << host_n) - 1
    nodes = 0

    def rec(depth: int, used: int):
        nonlocal nodes
        if depth == len(order):
            yield tuple(phi)
            return
        x = order[depth]
        cand = all_host & ~used
        for y in _iter_bits(padj[x]):
            if phi[y] >= 0:
                cand &= host_adj[phi[y]]
        if x in fixed:
            cand &= 1 << fixed[x]
        for h in _iter_bits(cand):
            nodes += 1
            if nodes > budget:
                raise ResourceError(f"embedding enumeration exceeded {budget} nodes")
            phi[x] = h
            yield from rec(depth + 1, used | 1 << h)
            phi[x] = -1

    yield from rec(0, 0)


def _count_embeddings(pattern: LabeledGraph, host_adj, budget: int) -> int:
    return sum(1 for _ in iter_embeddings(pattern, host_adj, budget))


def count_copies(g: LabeledGraph, pattern: PatternGraph, budget: int = EMBED_BUDGET) -> int:
    """Exact number of subgraphs of ``g`` isomorphic to the pattern."""
    if pattern.v > g.n:
        return 0
    return _count_embeddings(pattern.graph, g.adjacency, budget) // pattern.automorphisms


def copy_vertex_sets(g: LabeledGraph, pattern: PatternGraph, budget: int = EMBED_BUDGET) -> list[int]:
    """Distinct vertex sets (as bitmasks) that carry at least one copy."""
    if pattern.v > g.n:
        return []
    seen = set()
    for phi in iter_embeddings(pattern.graph, g.adjacency, budget):
        mask = 0
        for h in phi:
            mask |= 1 << h
        seen.add(mask)
    return sorted(seen)


def contains_copy(g: LabeledGraph, pattern: PatternGraph, budget: int = EMBED_BUDGET) -> bool:
    if pattern.v > g.n:
        return False
    return next(iter_embeddings(pattern.graph, g.adjacency, budget), None) is not None


def greedy_disjoint(sets: list[int]) -> list[int]:
    chosen: list[int] = []
    used = 0
    for s in sets:
        if not s & used:
            chosen.append(s)
            used |= s
    return chosen


def max_disjoint_copies(
    g: LabeledGraph, pattern: PatternGraph, exact_budget: int = 200_000
) -> tuple[int, bool]:
    """Maximum number of vertex-disjoint copies.

    Returns ``(count, exact)``.  When the branch and bound runs out of budget the
    count is the better of the greedy packing and the best packing seen so far,
    and ``exact`` is False.
    """
    sets = copy_vertex_sets(g, pattern)
    if not sets:
        return 0, True
    best = len(greedy_disjoint(sets))
    ceiling = g.n // pattern.v
    if best == ceiling:
        return best, True
    by_vertex: dict[int, list[int]] = {}
    for s in sets:
        by_vertex.setdefault((s & -s).bit_length() - 1, []).append(s)
    nodes = 0

    class _Out(Exception):
        pass

    def free_count(used: int, lo: int) -> int:
        return popcount(((1 << g.n) - 1) & ~used & ~((1 << lo) - 1))

    def rec(v: int, used: int, count: int):
        nonlocal best, nodes
        nodes += 1
        if nodes > exact_budget:
            raise _Out
        while v < g.n and (used >> v & 1 or v not in by_vertex):
            v += 1
        if v >= g.n:
            best = max(best, count)
            return
        if count + free_count(used, v) // pattern.v <= best:
            return
        for s in by_vertex[v]:
            if not s & used:
                rec(v + 1, used | s, count + 1)
                if best == ceiling:
                    return
        # leave v uncovered
        rec(v + 1, used | 1 << v, count)

    try:
        rec(0, 0, 0)
    except _Out:
        return best, False
    return best, True


def contains_Kst(g: LabeledGraph, s: int, t: int, budget: int = 10_000_000) -> bool:
    """True iff g has K_{s,t} as a subgraph (s-side enumerated, t-side by common neighbors)."""
    if s > t:
        s, t = t, s
    if s < 1:
        raise UsageError("K_{s,t} needs s >= 1")
    return next(iter_Kst(g, s, t, budget), None) is not None


def iter_Kst(g: LabeledGraph, s: int, t: int, budget: int = 10_000_000) -> Iterator[tuple[tuple, int]]:
    """Yield ``(A, common)``: every s-set A with at least t common neighbors."""
    adj = g.adjacency
    full = (1 << g.n) - 1
    steps = 0

    def rec(start: int, chosen: list[int], common: int):
        nonlocal steps
        if popcount(common) < t:
            return
        if len(chosen) == s:
            yield tuple(chosen), common
            return
        for v in range(start, g.n):
            steps += 1
            if steps > budget:
                raise ResourceError(f"K_{{s,t}} enumeration exceeded {budget} steps")
            chosen.append(v)
            yield from rec(v + 1, chosen, common & adj[v])
            chosen.pop()

    yield from rec(0, [], full)


def chromatic_number(pattern: PatternGraph | LabeledGraph, max_vertices: int = 10) -> int:
    """Exact chromatic number by trying k = 1, 2, ... colors with backtracking."""
    g = pattern.graph if isinstance(pattern, PatternGraph) else pattern
    if g.n > max_vertices:
        raise ResourceError(f"chromatic number search limited to {max_vertices} vertices")
    if g.edge_count == 0:
        return 1
    adj = g.adjacency
    order = sorted(range(g.n), key=lambda v: -popcount(adj[v]))
    for k in range(2, g.n + 1):
        colors = [-1] * g.n

        def ok(i: int, used: int) -> bool:
            if i == g.n:
                return True
            v = order[i]
            forbidden = {colors[w] for w in _iter_bits(adj[v]) if colors[w] >= 0}
            # symmetry: a vertex may open at most one new color
            for c in range(min(k, used + 1)):
                if c not in forbidden:
                    colors[v] = c
                    if ok(i + 1, max(used, c + 1)):
                        return True
                    colors[v] = -1
            return False

        if ok(0, 0):
            return k
    return g.n
