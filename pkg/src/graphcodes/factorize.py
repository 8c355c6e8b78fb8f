"""Perfect 1-factorizations of K_m and their restriction to K_{m-1}.

A perfect 1-factorization splits E(K_m), m even, into m-1 perfect matchings so
that any two of them together form a Hamiltonian cycle.  Dropping the edge at
the last vertex from every factor leaves near-perfect matchings of K_{m-1} whose
pairwise unions are Hamiltonian paths.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .errors import UsageError
from .graphcore import LabeledGraph, _iter_bits, component_mask, edge_index, n_slots

FORMAT_VERSION = 1


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class OneFactorization:
    order: int
    factors: tuple[LabeledGraph, ...]

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "order": self.order,
            "factors": [f.to_line() for f in self.factors],
        }

    @classmethod
    def from_json(cls, data: dict) -> "OneFactorization":
        if data.get("format_version") != FORMAT_VERSION:
            raise UsageError(f"unsupported factorization format {data.get('format_version')!r}")
        factors = tuple(LabeledGraph.from_line(s) for s in data["factors"])
        if any(f.n != data["order"] for f in factors):
            raise UsageError("factor order does not match the factorization order")
        return cls(data["order"], factors)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


@dataclass(frozen=True)
class PerfectionReport:
    ok: bool
    invariant: Optional[str] = None
    pair: Optional[tuple[int, int]] = None
    detail: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class RestrictedMatchingSystem:
    n: int
    matchings: tuple[LabeledGraph, ...]

    def missed_vertex(self, i: int) -> int:
        covered = 0
        for u, v in self.matchings[i].edges():
            covered |= 1 << u | 1 << v
        missing = ((1 << self.n) - 1) & ~covered
        return missing.bit_length() - 1


def kotzig_p1f(p: int) -> OneFactorization:
    """Starter factorization of K_{p+1} over Z_p plus a point at infinity (label p).

    Factor i is {inf, i} together with {i+k, i-k} for k = 1..(p-1)/2.
    """
    if p % 2 == 0 or not is_prime(p):
        raise UsageError(f"Kotzig's construction needs an odd prime, got {p}")
    m = p + 1
    inf = p
    factors = []
    for i in range(p):
        edges = [(inf, i)] + [((i + k) % p, (i - k) % p) for k in range(1, (p - 1) // 2 + 1)]
        factors.append(LabeledGraph.from_edges(m, edges))
    return OneFactorization(m, tuple(factors))


def circle_method_p1f(m: int) -> OneFactorization:
    """Round-robin schedule: round r pairs vertex m-1 with r and r+k with r-k mod m-1."""
    if m % 2 or m < 2:
        raise UsageError("circle method needs an even order")
    q = m - 1
    factors = []
    for r in range(q):
        edges = [(m - 1, r)] + [((r + k) % q, (r - k) % q) for k in range(1, m // 2)]
        factors.append(LabeledGraph.from_edges(m, edges))
    return OneFactorization(m, tuple(factors))


def _union_is_hamiltonian_cycle(f: LabeledGraph, g: LabeledGraph) -> bool:
    u = f | g
    if u.edge_count != f.n:
        return False
    if any(d != 2 for d in u.degrees()):
        return False
    return component_mask(u.adjacency, 0) == (1 << f.n) - 1


def verify_perfect(fac: OneFactorization) -> PerfectionReport:
    """Check matchings, partition and pairwise Hamiltonicity; report the first failure."""
    m = fac.order
    if m < 4 or m % 2:
        return PerfectionReport(False, "order", detail=f"order {m} is not an even integer >= 4")
    if len(fac.factors) != m - 1:
        return PerfectionReport(False, "factor-count", detail=f"{len(fac.factors)} factors, need {m - 1}")
    for i, f in enumerate(fac.factors):
        if f.n != m or any(d != 1 for d in f.degrees()):
            return PerfectionReport(False, "perfect-matching", (i, i), f"factor {i} is not a perfect matching")
    union = 0
    for i, f in enumerate(fac.factors):
        if union & f.bits:
            j = next(j for j in range(i) if fac.factors[j].bits & f.bits)
            return PerfectionReport(False, "partition", (j, i), f"factors {j} and {i} share an edge")
        union |= f.bits
    if union != (1 << n_slots(m)) - 1:
        return PerfectionReport(False, "partition", detail="factors do not cover E(K_m)")
    for i in range(m - 1):
        for j in range(i + 1, m - 1):
            if not _union_is_hamiltonian_cycle(fac.factors[i], fac.factors[j]):
                return PerfectionReport(
                    False, "perfection", (i, j), f"factors {i} and {j} form a union of shorter cycles"
                )
    return PerfectionReport(True)


def restrict_to_n(fac: OneFactorization) -> RestrictedMatchingSystem:
    """Delete the top vertex from every factor of a verified perfect factorization."""
    report = verify_perfect(fac)
    if not report:
        raise UsageError(f"factorization is not perfect: {report.detail}")
    n = fac.order - 1
    top = n
    matchings = []
    for f in fac.factors:
        kept = [(u, v) for u, v in f.edges() if top not in (u, v)]
        matchings.append(LabeledGraph.from_edges(n, kept))
    system = RestrictedMatchingSystem(n, tuple(matchings))
    for i in range(n):
        for j in range(i + 1, n):
            if not is_hamiltonian_path(system.matchings[i] | system.matchings[j]):
                raise AssertionError(f"restricted matchings {i},{j} do not form a Hamiltonian path")
    return system


def is_hamiltonian_path(g: LabeledGraph) -> bool:
    if g.n == 1:
        return g.edge_count == 0
    if g.edge_count != g.n - 1:
        return False
    degs = g.degrees()
    if any(d == 0 or d > 2 for d in degs) or sum(1 for d in degs if d == 1) != 2:
        return False
    return component_mask(g.adjacency, 0) == (1 << g.n) - 1


def hamiltonian_path_order(g: LabeledGraph) -> list[int]:
    """Vertex sequence of a Hamiltonian path, starting at its smaller endpoint."""
    if not is_hamiltonian_path(g):
        raise UsageError("graph is not a Hamiltonian path")
    adj = g.adjacency
    if g.n == 1:
        return [0]
    start = min(v for v in range(g.n) if bin(adj[v]).count("1") == 1)
    order = [start]
    prev, cur = -1, start
    while len(order) < g.n:
        nxt = next(w for w in _iter_bits(adj[cur]) if w != prev)
        order.append(nxt)
        prev, cur = cur, nxt
    return order


# ---------------------------------------------------------------------------
# backtracking search

class _Budget(Exception):
    pass


def search_p1f(m: int, budget: int = 2_000_000) -> Optional[OneFactorization]:
    """Backtracking search for a perfect 1-factorization of K_m; None if the budget runs out.

    Factor 0 is pinned to {01, 23, 45, ...} and factors are ordered by the partner
    of vertex 0.  A new edge is rejected when it would close a cycle shorter than m
    with any earlier factor.
    """
    if m % 2:
        raise UsageError(f"K_{m} has no perfect matching (odd order)")
    if not 4 <= m <= 14:
        raise UsageError("search_p1f supports 4 <= m <= 14")
    # partner[f][v] = mate of v in factor f (-1 while unset)
    partner: list[list[int]] = [[-1] * m for _ in range(m - 1)]
    for v in range(0, m, 2):
        partner[0][v], partner[0][v + 1] = v + 1, v
    used = [[False] * m for _ in range(m)]
    for v in range(0, m, 2):
        used[v][v + 1] = used[v + 1][v] = True
    nodes = 0

    def closes_short_cycle(f: int, u: int, v: int) -> bool:
        # adding uv to factor f: for each earlier factor g the union is a set of
        # alternating paths; walk from u and see whether we arrive at v
        for g in range(f):
            pg = partner[g]
            pf = partner[f]
            length = 1
            x = u
            while True:
                x = pg[x]
                length += 1
                if x == v:
                    if length < m:
                        return True
                    break
                y = pf[x]
                if y < 0:
                    break
                x = y
                length += 1
        return False

    def fill(f: int, count: int) -> bool:
        nonlocal nodes
        if f == m - 1:
            return True
        pf = partner[f]
        if count == m:
            return fill(f + 1, 0)
        u = next(v for v in range(m) if pf[v] < 0)
        candidates = range(u + 1, m)
        if u == 0:
            # order factors by the mate of vertex 0
            lo = partner[f - 1][0] + 1
            candidates = range(lo, m)
        for v in candidates:
            if pf[v] >= 0 or used[u][v]:
                continue
            nodes += 1
            if nodes > budget:
                raise _Budget
            if closes_short_cycle(f, u, v):
                continue
            pf[u], pf[v] = v, u
            used[u][v] = used[v][u] = True
            if fill(f, count + 2):
                return True
            pf[u] = pf[v] = -1
            used[u][v] = used[v][u] = False
        return False

    try:
        found = fill(1, 0)
    except _Budget:
        return None
    if not found:
        return None
    factors = tuple(
        LabeledGraph.from_edges(m, [(v, p[v]) for v in range(m) if v < p[v]]) for p in partner
    )
    fac = OneFactorization(m, factors)
    if not verify_perfect(fac):
        raise AssertionError("search produced a non-perfect factorization")
    return fac


def p1f_for_order(m: int, budget: int = 2_000_000) -> OneFactorization:
    """Kotzig's construction when m-1 is prime, else bounded search."""
    if m % 2 == 0 and is_prime(m - 1) and m - 1 > 2:
        return kotzig_p1f(m - 1)
    if 4 <= m <= 14 and m % 2 == 0:
        fac = search_p1f(m, budget)
        if fac is not None:
            return fac
    raise UsageError(f"no perfect 1-factorization of K_{m} is available (need m-1 prime or m <= 14)")


__all__ = [
    "OneFactorization",
    "PerfectionReport",
    "RestrictedMatchingSystem",
    "circle_method_p1f",
    "edge_index",
    "hamiltonian_path_order",
    "is_hamiltonian_path",
    "is_prime",
    "kotzig_p1f",
    "p1f_for_order",
    "restrict_to_n",
    "search_p1f",
    "verify_perfect",
]
