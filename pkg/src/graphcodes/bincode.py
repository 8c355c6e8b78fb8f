"""Binary block codes: greedy Gilbert-Varshamov codes, Hamming codes and an
even-weight distance-4 linear code with a syndrome map.

Words are Python ints; bit j is position j.  The hex form used in files puts
position 0 in the least significant bit, same as graph lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterator, Optional

import numpy as np

from .errors import ResourceError, UsageError
from .graphcore import popcount
from .rng import substream

FORMAT_VERSION = 1
#: largest span we are willing to list word by word
MAX_ENUMERATE = 1 << 20


# ---------------------------------------------------------------------------
# GF(2) linear algebra on int-encoded vectors

def rref(rows: list[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; returns (rows, pivot positions)."""
    rows = [r for r in rows if r]
    out: list[int] = []
    pivots: list[int] = []
    for r in rows:
        for p, q in zip(pivots, out):
            if r >> p & 1:
                r ^= q
        if not r:
            continue
        p = (r & -r).bit_length() - 1
        out = [q ^ r if q >> p & 1 else q for q in out]
        out.append(r)
        pivots.append(p)
    return out, pivots


def rank(rows: list[int]) -> int:
    return len(rref(rows)[0])


def nullspace(rows: list[int], length: int) -> list[int]:
    """Basis of {x : <r, x> = 0 for every r in rows}."""
    red, pivots = rref(rows)
    pivset = set(pivots)
    basis = []
    for f in range(length):
        if f in pivset:
            continue
        x = 1 << f
        for r, p in zip(red, pivots):
            if r >> f & 1:
                x |= 1 << p
        basis.append(x)
    return basis


def span(basis: list[int] | tuple[int, ...]) -> Iterator[int]:
    """All combinations of the basis in Gray-code order starting from 0."""
    w = 0
    yield w
    for i in range(1, 1 << len(basis)):
        w ^= basis[(i & -i).bit_length() - 1]
        yield w


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BinaryCode:
    length: int
    min_distance_claim: int
    explicit_words: Optional[tuple[int, ...]] = None
    basis: Optional[tuple[int, ...]] = None
    parity_checks: Optional[tuple[int, ...]] = None
    shortfall: int = 0

    @property
    def is_linear(self) -> bool:
        return self.basis is not None

    @property
    def size(self) -> int:
        if self.explicit_words is not None:
            return len(self.explicit_words)
        return 1 << len(self.basis)

    @property
    def dimension(self) -> int:
        if not self.is_linear:
            raise UsageError("dimension is only defined for linear codes")
        return len(self.basis)

    @property
    def words(self) -> tuple[int, ...]:
        if self.explicit_words is not None:
            return self.explicit_words
        if self.size > MAX_ENUMERATE:
            raise ResourceError(f"code has {self.size} words; refusing to list them")
        return tuple(sorted(span(self.basis)))

    def word_bits(self, w: int) -> str:
        """Position 0 first, e.g. '0111'."""
        return "".join(str(w >> j & 1) for j in range(self.length))

    def to_json(self) -> dict:
        width = max(1, -(-self.length // 4))
        hexed = lambda xs: [format(x, f"0{width}x") for x in xs]  # noqa: E731
        out = {
            "format_version": FORMAT_VERSION,
            "length": self.length,
            "distance_claim": self.min_distance_claim,
        }
        if self.is_linear:
            out["linear_basis"] = hexed(self.basis)
            out["parity_checks"] = hexed(self.parity_checks or ())
            if self.size <= 1 << 12:
                out["words"] = hexed(self.words)
        else:
            out["words"] = hexed(self.words)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "BinaryCode":
        if data.get("format_version") != FORMAT_VERSION:
            raise UsageError(f"unsupported code format {data.get('format_version')!r}")
        unhex = lambda xs: tuple(int(x, 16) for x in xs)  # noqa: E731
        if "linear_basis" in data:
            return cls(
                data["length"],
                data["distance_claim"],
                basis=unhex(data["linear_basis"]),
                parity_checks=unhex(data.get("parity_checks", [])) or None,
            )
        return cls(data["length"], data["distance_claim"], explicit_words=unhex(data["words"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def linear_code(length: int, parity_checks: list[int], claim: int) -> BinaryCode:
    basis = nullspace(parity_checks, length)
    return BinaryCode(length, claim, basis=tuple(basis), parity_checks=tuple(parity_checks))


def gv_bound(m: int, d: int) -> float:
    return 2**m / sum(comb(m, i) for i in range(d))


def _ball_offsets(m: int, radius: int) -> np.ndarray:
    offs = [0]
    for w in range(1, radius + 1):
        for pos in combinations(range(m), w):
            x = 0
            for p in pos:
                x |= 1 << p
            offs.append(x)
    return np.array(offs, dtype=np.int64)


def gv_greedy(
    m: int,
    d: int,
    order: str = "lexicographic",
    target: Optional[int] = None,
    seed: int = 0,
) -> BinaryCode:
    """Greedy code: admit every scanned word at distance >= d from all admitted ones.

    ``order`` is ``"lexicographic"`` (0, 1, 2, ...) or ``"random"`` (a seeded
    permutation of all 2^m words).  Stops once ``target`` words are admitted;
    if a full scan falls short the returned code carries the missing count in
    ``shortfall``.
    """
    if not 1 <= d <= m:
        raise UsageError(f"need 1 <= d <= m, got m={m}, d={d}")
    if order not in ("lexicographic", "random"):
        raise UsageError(f"unknown scan order {order!r}")
    if m > 26:
        raise ResourceError("full-space greedy scan is limited to m <= 26")
    total = 1 << m
    if order == "lexicographic":
        scan = range(total)
    else:
        scan = substream(seed, "gv", m, d).permutation(total).tolist()
    covered = np.zeros(total, dtype=bool)
    offsets = _ball_offsets(m, d - 1)
    words: list[int] = []
    for w in scan:
        if covered[w]:
            continue
        words.append(w)
        covered[offsets ^ w] = True
        if target is not None and len(words) >= target:
            break
    shortfall = max(0, (target or 0) - len(words))
    return BinaryCode(m, d, explicit_words=tuple(words), shortfall=shortfall)


def hamming_code(k: int) -> BinaryCode:
    """Length 2^k - 1 Hamming code; column j of the check matrix is the integer j+1."""
    if k < 2:
        raise UsageError("Hamming codes need k >= 2")
    m = (1 << k) - 1
    checks = [sum(1 << j for j in range(m) if (j + 1) >> b & 1) for b in range(k)]
    code = linear_code(m, checks, 3)
    assert code.dimension == m - k
    return code


def even_weight_hamming_code(k: int) -> BinaryCode:
    """Even-weight subcode of the length 2^k - 1 Hamming code (distance 4)."""
    h = hamming_code(k)
    m = h.length
    return linear_code(m, list(h.parity_checks) + [(1 << m) - 1], 4)


def even_d4_linear(m: int) -> BinaryCode:
    """Shortened extended Hamming code of length m: distance >= 4, all weights even.

    Positions 0..m-2 carry the distinct nonzero r-bit columns 1..m-1; position
    m-1 is the overall parity bit.
    """
    if m < 4:
        raise UsageError("even_d4_linear needs m >= 4")
    r = (m - 1).bit_length()
    checks = [sum(1 << j for j in range(m - 1) if (j + 1) >> b & 1) for b in range(r)]
    checks.append((1 << m) - 1)
    return linear_code(m, checks, 4)


def syndrome(code: BinaryCode, v: int) -> int:
    if code.parity_checks is None:
        raise UsageError("syndrome needs a linear code with parity checks")
    if v < 0 or v >> code.length:
        raise UsageError(f"vector does not fit in length {code.length}")
    s = 0
    for i, row in enumerate(code.parity_checks):
        s |= (popcount(row & v) & 1) << i
    return s


def _min_weight_linear(code: BinaryCode) -> int:
    if code.size <= 1 << 16:
        return min(popcount(w) for w in span(code.basis) if w)
    # smallest set of check-matrix columns summing to zero, by meet in the middle
    m = code.length
    cols = [sum((row >> j & 1) << i for i, row in enumerate(code.parity_checks)) for j in range(m)]
    for w in range(1, m + 1):
        a, b = (w + 1) // 2, w // 2
        if comb(m, a) > 2_000_000:
            raise ResourceError("minimum-weight search exceeded its budget")
        table: dict[int, list[int]] = {}
        for pos in combinations(range(m), b):
            s, mask = 0, 0
            for p in pos:
                s ^= cols[p]
                mask |= 1 << p
            table.setdefault(s, []).append(mask)
        for pos in combinations(range(m), a):
            s, mask = 0, 0
            for p in pos:
                s ^= cols[p]
                mask |= 1 << p
            for other in table.get(s, ()):
                if not other & mask:
                    return w
    return 0


def verify_min_distance(code: BinaryCode, pair_budget: int = 50_000_000) -> int:
    """Exact minimum distance (minimum nonzero weight for linear codes)."""
    if code.is_linear:
        if code.dimension == 0:
            raise UsageError("a code with one word has no minimum distance")
        if code.parity_checks is None:
            return min(popcount(w) for w in span(code.basis) if w)
        return _min_weight_linear(code)
    words = code.words
    if len(words) < 2:
        raise UsageError("need at least two words")
    if len(words) ** 2 // 2 > pair_budget:
        raise ResourceError("too many pairs for exhaustive distance check")
    if code.length <= 63:
        arr = np.array(words, dtype=np.uint64)
        best = code.length
        for i in range(len(arr) - 1):
            x = arr[i] ^ arr[i + 1:]
            best = min(best, int(np.bitwise_count(x).min()))
        return best
    return min(popcount(a ^ b) for a, b in combinations(words, 2))


def exhaustive_A(m: int, d: int) -> int:
    """Largest code of length m and distance d, by clique search (tiny m only)."""
    if m > 7:
        raise ResourceError("exhaustive A(m,d) is limited to m <= 7")
    words = list(range(1 << m))
    best = 1
    # WLOG the code contains 0
    def rec(chosen: list[int], cands: list[int]):
        nonlocal best
        if len(chosen) > best:
            best = len(chosen)
        for i, w in enumerate(cands):
            if len(chosen) + len(cands) - i <= best:
                return
            rest = [x for x in cands[i + 1:] if popcount(x ^ w) >= d]
            rec(chosen + [w], rest)

    rec([0], [w for w in words if popcount(w) >= d])
    return best
