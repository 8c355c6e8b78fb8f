"""Exact M_F(n) and D_F(n) for tiny n.

Graphs on n vertices are the vectors of GF(2)^C(n,2).  Two graphs are
compatible when their XOR satisfies the predicate, so compatibility only
depends on the XOR: the compatibility graph is a Cayley graph and a maximum
F-good family can be assumed to contain the empty graph.  That reduces M_F(n)
to a maximum clique among the nonzero graphs satisfying the predicate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import log2
from time import monotonic
from typing import Optional

from .errors import ResourceError, UsageError
from .graphcore import (
    LabeledGraph,
    PatternGraph,
    contains_Kst,
    contains_copy,
    count_copies,
    is_spanning_connected,
    max_disjoint_copies,
    n_slots,
    popcount,
    spanning_tree_leaf_count,
)

KINDS = ("connected", "contains", "copies", "disjoint", "tree-leaves", "ktt")


@dataclass(frozen=True)
class PredicateSpec:
    kind: str
    pattern: Optional[PatternGraph] = None
    k: int = 1
    leaves: int = 2
    t: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown predicate kind {self.kind!r}; choose from {KINDS}")
        if self.kind in ("contains", "copies", "disjoint") and self.pattern is None:
            raise UsageError(f"predicate {self.kind!r} needs a pattern graph")

    def __call__(self, g: LabeledGraph) -> bool:
        kind = self.kind
        if kind == "connected":
            return is_spanning_connected(g)
        if kind == "contains":
            return contains_copy(g, self.pattern)
        if kind == "copies":
            return count_copies(g, self.pattern) >= self.k
        if kind == "disjoint":
            return max_disjoint_copies(g, self.pattern)[0] >= self.k
        if kind == "tree-leaves":
            return has_spanning_tree_with_leaves(g, self.leaves)
        return contains_Kst(g, self.t, self.t)

    def describe(self) -> str:
        name = self.pattern.name if self.pattern is not None else ""
        return {
            "connected": "spanning connected",
            "contains": f"contains {name}",
            "copies": f">= {self.k} copies of {name}",
            "disjoint": f">= {self.k} disjoint copies of {name}",
            "tree-leaves": f"spanning tree with exactly {self.leaves} leaves",
            "ktt": f"contains K{self.t},{self.t}",
        }[self.kind]


def has_spanning_tree_with_leaves(g: LabeledGraph, leaves: int) -> bool:
    """Brute force over (n-1)-edge subsets; fine for n <= 6."""
    edges = g.edges()
    n = g.n
    if n == 1:
        return leaves == 0
    for sub in combinations(edges, n - 1):
        if spanning_tree_leaf_count(LabeledGraph.from_edges(n, sub)) == leaves:
            return True
    return False


@dataclass
class OracleResult:
    n: int
    predicate: str
    M_exact: Optional[int] = None
    witness_family: list[LabeledGraph] = field(default_factory=list)
    D_exact: Optional[int] = None
    dual_witness: list[LabeledGraph] = field(default_factory=list)
    bad_count: Optional[int] = None

    @property
    def product_bound_holds(self) -> Optional[bool]:
        if self.M_exact is None or self.D_exact is None:
            return None
        return self.M_exact * self.D_exact <= 1 << n_slots(self.n)

    def to_json(self) -> dict:
        return {
            "format_version": 1,
            "n": self.n,
            "predicate": self.predicate,
            "M_exact": self.M_exact,
            "D_exact": self.D_exact,
            "bad_count": self.bad_count,
            "product_bound_holds": self.product_bound_holds,
            "witness_family": [g.to_line() for g in self.witness_family],
            "dual_witness": [g.to_line() for g in self.dual_witness],
        }


def _check_n(n: int, limit: int) -> None:
    if not 1 <= n <= limit:
        raise ResourceError(f"exhaustive oracle supports 1 <= n <= {limit}")


def predicate_table(n: int, predicate: PredicateSpec) -> list[bool]:
    """predicate(G) for every graph G on n vertices, indexed by edge bitset."""
    return [predicate(LabeledGraph(n, x)) for x in range(1 << n_slots(n))]


def max_clique(adj: list[int], budget: int = 5_000_000, deadline: Optional[float] = None) -> list[int]:
    """Maximum clique by branch and bound with greedy-coloring bounds.

    ``budget`` caps search nodes; ``deadline`` is a ``time.monotonic`` value.
    Running out of either raises ResourceError carrying the best size found.
    """
    best: list[int] = []
    nodes = 0

    def color_order(cand: int) -> list[tuple[int, int]]:
        # returns (vertex, color bound) in increasing color order
        out = []
        color = 0
        rest = cand
        while rest:
            color += 1
            avail = rest
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~adj[v] & ~(1 << v)
                rest &= ~(1 << v)
                out.append((v, color))
        return out

    def expand(clique: list[int], cand: int):
        nonlocal best, nodes
        nodes += 1
        if nodes > budget or (deadline is not None and nodes % 256 == 0 and monotonic() > deadline):
            raise ResourceError("max-clique search exceeded its budget", best=len(best))
        for v, bound in reversed(color_order(cand)):
            if len(clique) + bound <= len(best):
                return
            clique.append(v)
            new = cand & adj[v]
            if new:
                expand(clique, new)
            elif len(clique) > len(best):
                best = clique[:]
            clique.pop()
            cand &= ~(1 << v)

    if adj:
        expand([], (1 << len(adj)) - 1)
    return best


def _max_family(n: int, allowed: list[bool], budget: int, deadline=None) -> list[int]:
    """Largest set containing 0 whose pairwise XORs all lie in ``allowed``."""
    verts = [x for x in range(1, len(allowed)) if allowed[x]]
    # order by edge count as a deterministic tie-break
    verts.sort(key=lambda x: (popcount(x), x))
    pos = {x: i for i, x in enumerate(verts)}
    adj = [0] * len(verts)
    for i, x in enumerate(verts):
        for y in verts[i + 1:]:
            if allowed[x ^ y]:
                adj[i] |= 1 << pos[y]
                adj[pos[y]] |= 1 << i
    try:
        clique = max_clique(adj, budget, deadline)
    except ResourceError as exc:
        # the empty graph is always in the family
        raise ResourceError(str(exc), best=exc.best + 1) from None
    return [0] + sorted(verts[i] for i in clique)


def family_is_good(family: list[LabeledGraph], predicate: PredicateSpec) -> bool:
    return all(predicate(a ^ b) for a, b in combinations(family, 2))


def family_avoids(family: list[LabeledGraph], predicate: PredicateSpec) -> bool:
    return not any(predicate(a ^ b) for a, b in combinations(family, 2))


def exact_MF(
    n: int, predicate: PredicateSpec, budget: int = 5_000_000, table=None, deadline=None
) -> OracleResult:
    _check_n(n, 5)
    table = table if table is not None else predicate_table(n, predicate)
    fam = [LabeledGraph(n, x) for x in _max_family(n, table, budget, deadline)]
    if not family_is_good(fam, predicate):
        raise AssertionError("witness family failed re-verification")
    return OracleResult(n, predicate.describe(), M_exact=len(fam), witness_family=fam)


def exact_DF(
    n: int, predicate: PredicateSpec, budget: int = 5_000_000, table=None, deadline=None
) -> OracleResult:
    _check_n(n, 5)
    table = table if table is not None else predicate_table(n, predicate)
    fam = [LabeledGraph(n, x) for x in _max_family(n, [not v for v in table], budget, deadline)]
    if not family_avoids(fam, predicate):
        raise AssertionError("dual witness failed re-verification")
    return OracleResult(n, predicate.describe(), D_exact=len(fam), dual_witness=fam)


def count_bad_graphs(n: int, predicate: PredicateSpec) -> int:
    """Number of graphs on [n] that do not satisfy the predicate."""
    _check_n(n, 6)
    return sum(1 for x in range(1 << n_slots(n)) if not predicate(LabeledGraph(n, x)))


def greedy_rate_lower_bound(n: int, predicate: PredicateSpec, bad: Optional[int] = None) -> float:
    """log2 of the independence bound 2^C(n,2) / (bad + 1)."""
    bad = count_bad_graphs(n, predicate) if bad is None else bad
    return n_slots(n) - log2(bad + 1)


def run_oracle(
    n: int, predicate: PredicateSpec, budget: int = 5_000_000, deadline: Optional[float] = None
) -> OracleResult:
    table = predicate_table(n, predicate)
    res = exact_MF(n, predicate, budget, table, deadline)
    dual = exact_DF(n, predicate, budget, table, deadline)
    res.D_exact = dual.D_exact
    res.dual_witness = dual.dual_witness
    res.bad_count = sum(1 for v in table if not v)
    return res


__all__ = [
    "OracleResult",
    "PredicateSpec",
    "count_bad_graphs",
    "exact_DF",
    "exact_MF",
    "family_avoids",
    "family_is_good",
    "greedy_rate_lower_bound",
    "has_spanning_tree_with_leaves",
    "max_clique",
    "predicate_table",
    "run_oracle",
]
