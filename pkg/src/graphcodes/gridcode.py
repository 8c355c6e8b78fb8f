"""Torus grids and connected-difference families on them.

On the m x n torus every vertex has degree 4, so a family whose pairwise
differences are all spanning connected gives distinct neighbour traces at any
fixed vertex.  That caps such families at 16 members; ``search_grid_family``
looks for families meeting the cap as XOR spans of 4 generators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from time import monotonic
from typing import Optional

from .errors import NotFoundError, UsageError
from .graphcore import LabeledGraph, _iter_bits, component_mask, edge_index, popcount
from .rng import substream

FORMAT_VERSION = 1
MAX_FAMILY = 16


@dataclass(frozen=True)
class GridSpec:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 3 or self.n < 3:
            raise UsageError(f"torus grid needs m, n >= 3 (got {self.m}x{self.n}); wraparound degenerates")

    @property
    def order(self) -> int:
        return self.m * self.n

    def vertex(self, r: int, c: int) -> int:
        return (r % self.m) * self.n + (c % self.n)

    def coords(self, v: int) -> tuple[int, int]:
        return divmod(v, self.n)

    def host_neighbors(self, v: int) -> list[int]:
        r, c = self.coords(v)
        return [self.vertex(r, c + 1), self.vertex(r, c - 1), self.vertex(r + 1, c), self.vertex(r - 1, c)]

    def host(self) -> LabeledGraph:
        return grid_graph(self.m, self.n)


def grid_graph(m: int, n: int) -> LabeledGraph:
    spec = GridSpec(m, n)
    edges = set()
    for r in range(m):
        for c in range(n):
            v = spec.vertex(r, c)
            for w in (spec.vertex(r, c + 1), spec.vertex(r + 1, c)):
                edges.add((min(v, w), max(v, w)))
    return LabeledGraph.from_edges(m * n, sorted(edges))


@dataclass
class GridFamily:
    spec: GridSpec
    members: list[LabeledGraph]
    linear_basis: Optional[list[LabeledGraph]] = None
    transcript: list[str] = field(default_factory=list)

    @classmethod
    def from_basis(cls, spec: GridSpec, basis: list[LabeledGraph]) -> "GridFamily":
        members = [LabeledGraph.empty(spec.order)]
        for b in basis:
            members += [x ^ b for x in members]
        return cls(spec, members, list(basis))

    def to_json(self) -> dict:
        out = {
            "format_version": FORMAT_VERSION,
            "m": self.spec.m,
            "n": self.spec.n,
            "members": [g.to_line() for g in self.members],
        }
        if self.linear_basis is not None:
            out["linear_basis"] = [g.to_line() for g in self.linear_basis]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data: dict) -> "GridFamily":
        if data.get("format_version") != FORMAT_VERSION:
            raise UsageError(f"unsupported grid family format {data.get('format_version')!r}")
        spec = GridSpec(data["m"], data["n"])
        members = [LabeledGraph.from_line(s) for s in data["members"]]
        basis = data.get("linear_basis")
        return cls(spec, members, [LabeledGraph.from_line(s) for s in basis] if basis is not None else None)


def neighbor_trace(spec: GridSpec, g: LabeledGraph, probe: int) -> int:
    """4-bit mask of which host edges at ``probe`` are present in g."""
    trace = 0
    for i, w in enumerate(spec.host_neighbors(probe)):
        if g.has_edge(probe, w):
            trace |= 1 << i
    return trace


def neighborhood_bound_check(
    family: GridFamily, probe: tuple[int, int] = (0, 0)
) -> tuple[bool, Optional[tuple[int, int]]]:
    """Distinct probe traces are necessary for connected differences.

    Returns (ok, pair) where pair names two members with equal traces.  A
    family larger than 16 fails with pair None if no collision was reported.
    """
    spec = family.spec
    v = spec.vertex(*probe)
    seen: dict[int, int] = {}
    for i, g in enumerate(family.members):
        t = neighbor_trace(spec, g, v)
        if t in seen:
            return False, (seen[t], i)
        seen[t] = i
    if len(family.members) > MAX_FAMILY:
        return False, None
    return True, None


def verify_grid_family(family: GridFamily) -> tuple[bool, list[str]]:
    host = family.spec.host()
    lines = []
    ok = True
    for i, g in enumerate(family.members):
        if g.n != host.n or not g.issubset(host):
            lines.append(f"member {i}: not a subgraph of the host")
            ok = False
    for i, j in combinations(range(len(family.members)), 2):
        if ok:
            x = family.members[i] ^ family.members[j]
            conn = _connected(x.adjacency, x.n)
            lines.append(f"pair {i},{j}: {'connected' if conn else 'DISCONNECTED'}")
            ok = conn
    family.transcript = lines
    return ok, lines


def _connected(adj, n: int) -> bool:
    return component_mask(adj, 0) == (1 << n) - 1


# ---------------------------------------------------------------------------
# search


def _combination_score(spec: GridSpec, gens: list[int], host_edges: list[tuple[int, int]]) -> tuple[int, int]:
    """(# connected nonzero combinations, -total extra components)."""
    n = spec.order
    full = (1 << n) - 1
    good, penalty = 0, 0
    combo = [0]
    for g in gens:
        combo += [c ^ g for c in combo]
    for bits in combo[1:]:
        adj = [0] * n
        for i in _iter_bits(bits):
            u, v = host_edges[i]
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        seen, comps = 0, 0
        while seen != full:
            start = ((full & ~seen) & -(full & ~seen)).bit_length() - 1
            seen |= component_mask(adj, start)
            comps += 1
        if comps == 1:
            good += 1
        penalty += comps - 1
    return good, -penalty


def _to_graph(spec: GridSpec, bits: int, host_edges) -> LabeledGraph:
    return LabeledGraph.from_edges(spec.order, [host_edges[i] for i in _iter_bits(bits)])


def search_grid_family(
    spec: GridSpec,
    dim: int = 4,
    seed: int = 0,
    budget: int = 200_000,
    deadline: Optional[float] = None,
    restart_after: int = 2_000,
) -> GridFamily:
    """Hill-climb over ``dim`` generator subgraphs of the torus.

    Generators are bit vectors over the host's edge list.  A move flips one
    edge in one generator and is kept unless it lowers the score (connected
    combinations first, then fewer components in total).  ``budget`` caps the
    number of moves over all restarts.
    """
    if dim < 0:
        raise UsageError("dim must be >= 0")
    if dim > 4:
        raise NotFoundError(
            f"dim={dim} would give {1 << dim} members; connected-difference families on a torus have at most 16",
            stats={"best_dim": 4},
        )
    if dim == 0:
        fam = GridFamily.from_basis(spec, [])
        verify_grid_family(fam)
        return fam
    host_edges = spec.host().edges()
    ne = len(host_edges)
    target = (1 << dim) - 1
    moves, restart = 0, 0
    best_overall = 0
    while moves < budget:
        rng = substream(seed, "grid", spec.m, spec.n, dim, restart)
        gens = [int(sum(1 << i for i in range(ne) if rng.random() < 0.5)) for _ in range(dim)]
        score = _combination_score(spec, gens, host_edges)
        stall = 0
        while moves < budget and stall < restart_after:
            if score[0] == target:
                basis = [_to_graph(spec, g, host_edges) for g in gens]
                fam = GridFamily.from_basis(spec, basis)
                ok, _ = verify_grid_family(fam)
                if not ok:  # pragma: no cover - score and verifier disagree
                    raise AssertionError("search result failed verification")
                return fam
            if deadline is not None and moves % 64 == 0 and monotonic() > deadline:
                moves = budget
                break
            moves += 1
            k = int(rng.integers(dim))
            e = int(rng.integers(ne))
            gens[k] ^= 1 << e
            new = _combination_score(spec, gens, host_edges)
            if new >= score:
                stall = 0 if new > score else stall + 1
                score = new
            else:
                gens[k] ^= 1 << e
                stall += 1
        best_overall = max(best_overall, score[0])
        restart += 1
    raise NotFoundError(
        f"no {dim}-dimensional family found within {budget} moves",
        stats={"best_connected_combinations": best_overall, "target": target, "restarts": restart},
    )


__all__ = [
    "GridFamily",
    "GridSpec",
    "grid_graph",
    "neighbor_trace",
    "neighborhood_bound_check",
    "search_grid_family",
    "verify_grid_family",
]
