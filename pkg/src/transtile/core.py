"""k-partite pattern graphs and their elementary quantities.

A *pattern* is a small graph on parts [1..k].  A *blow-up instance*
replaces every part by n vertices and every pattern edge {i, j} by some
subset of the complete bipartite graph between parts i and j.  Edges
never run inside a part, and never across a part pair the pattern does
not join.  All instances here are balanced: every part has exactly n
vertices.

Conventions
-----------
* Parts are 1-based: part indices live in [1..k].
* Vertices are part-relative: (part, idx) with idx in [0..n-1].
* Neighborhoods are stored as one bitmask per vertex per
  pattern-adjacent part, so intersecting neighborhoods is a single
  `&`.  Reads across a non-adjacent part pair return the empty mask
  rather than raising; write paths validate strictly.

The partite minimum degree of an instance is the minimum, over pattern
edges {i, j}, of the least number of part-j neighbors of a part-i
vertex (and vice versa).  It is the degree notion all tiling and
absorption thresholds in this package are phrased in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

GRAPH_FORMAT = "ptg-v1"

__all__ = [
    "GRAPH_FORMAT",
    "Pattern",
    "VertexId",
    "VertexSetFamily",
    "PartiteGraph",
    "delta_star",
    "is_transversal_copy",
    "density",
    "common_neighborhood",
    "mask_of",
    "bits",
]


def mask_of(indices: Iterable[int]) -> int:
    """Bitmask with one bit per index."""
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def bits(mask: int) -> Iterator[int]:
    """Indices of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class VertexId(NamedTuple):
    """Part-relative vertex address."""

    part: int
    idx: int


@dataclass(frozen=True)
class Pattern:
    """Graph on parts [1..k] prescribing which part pairs may carry edges."""

    k: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, k: int, edges: Iterable[tuple[int, int]]):
        if k < 2:
            raise ValueError(f"pattern needs k >= 2, got k={k}")
        norm = set()
        for i, j in edges:
            if i == j:
                raise ValueError(f"pattern edge ({i},{j}) is a loop")
            if not (1 <= i <= k and 1 <= j <= k):
                raise ValueError(f"pattern edge ({i},{j}) out of range [1..{k}]")
            norm.add((i, j) if i < j else (j, i))
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "edges", frozenset(norm))

    @staticmethod
    def complete(k: int) -> "Pattern":
        return Pattern(k, combinations(range(1, k + 1), 2))

    @staticmethod
    def cycle(k: int) -> "Pattern":
        if k < 3:
            raise ValueError(f"cycle pattern needs k >= 3, got k={k}")
        return Pattern(k, [(i, i + 1) for i in range(1, k)] + [(1, k)])

    @property
    def is_complete(self) -> bool:
        return len(self.edges) == self.k * (self.k - 1) // 2

    @property
    def is_cycle(self) -> bool:
        return self.k >= 3 and self.edges == Pattern.cycle(self.k).edges

    def adjacent(self, i: int, j: int) -> bool:
        return ((i, j) if i < j else (j, i)) in self.edges

    def neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(j for j in range(1, self.k + 1) if self.adjacent(i, j))

    def edge_list(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    def clique_part_tuples(self, r: int) -> tuple[tuple[int, ...], ...]:
        """All ascending r-tuples of parts that are pairwise adjacent."""
        out = []
        for parts in combinations(range(1, self.k + 1), r):
            if all(self.adjacent(a, b) for a, b in combinations(parts, 2)):
                out.append(parts)
        return tuple(out)

    def to_json_dict(self) -> dict:
        if self.is_complete:
            return {"kind": "complete", "k": self.k}
        if self.is_cycle:
            return {"kind": "cycle", "k": self.k}
        return {"k": self.k, "edges": [list(e) for e in self.edge_list()]}

    @staticmethod
    def from_json_dict(data: dict) -> "Pattern":
        kind = data.get("kind")
        if kind == "complete":
            return Pattern.complete(data["k"])
        if kind == "cycle":
            return Pattern.cycle(data["k"])
        if kind is None and "edges" in data:
            return Pattern(data["k"], [tuple(e) for e in data["edges"]])
        raise ValueError(f"unknown pattern description: {data!r}")


@dataclass(frozen=True)
class VertexSetFamily:
    """Ordered list of (part, vertex subset) pairs with distinct parts."""

    entries: tuple[tuple[int, frozenset[int]], ...]

    def __init__(self, entries: Iterable[tuple[int, Iterable[int]]]):
        norm = tuple((p, frozenset(s)) for p, s in entries)
        seen = set()
        for p, _ in norm:
            if p in seen:
                raise ValueError(f"part {p} listed twice in family")
            seen.add(p)
        object.__setattr__(self, "entries", norm)

    @staticmethod
    def of(mapping: Mapping[int, Iterable[int]]) -> "VertexSetFamily":
        return VertexSetFamily(sorted((p, set(s)) for p, s in mapping.items()))

    @property
    def parts(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    def subset(self, part: int) -> frozenset[int]:
        for p, s in self.entries:
            if p == part:
                return s
        raise KeyError(part)

    def mask(self, part: int) -> int:
        return mask_of(self.subset(part))

    def vertices(self) -> Iterator[VertexId]:
        for p, s in self.entries:
            for i in sorted(s):
                yield VertexId(p, i)


@dataclass(frozen=True)
class PartiteGraph:
    """Immutable balanced blow-up instance of a pattern.

    `_adj[(i, j)][a]` is the bitmask of part-j neighbors of vertex
    (i, a); both orientations of every pattern edge are stored and kept
    symmetric.  Construct via `from_edges`, `complete`, or the
    generator functions; do not mutate.
    """

    pattern: Pattern
    n: int
    _adj: dict[tuple[int, int], tuple[int, ...]]

    @staticmethod
    def from_edges(
        pattern: Pattern, n: int, edges: Iterable[tuple[int, int, int, int]]
    ) -> "PartiteGraph":
        """Build from (part, idx, part, idx) rows, one per unordered pair."""
        if n < 1:
            raise ValueError(f"need n >= 1, got n={n}")
        adj: dict[tuple[int, int], list[int]] = {}
        for i, j in pattern.edges:
            adj[(i, j)] = [0] * n
            adj[(j, i)] = [0] * n
        seen: set[tuple[int, int, int, int]] = set()
        for i, a, j, b in edges:
            if not pattern.adjacent(i, j):
                raise ValueError(f"edge ({i},{a})-({j},{b}) joins non-adjacent parts")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({i},{a})-({j},{b}) has an index out of range")
            key = (i, a, j, b) if (i, a) < (j, b) else (j, b, i, a)
            if key in seen:
                raise ValueError(f"edge ({i},{a})-({j},{b}) listed twice")
            seen.add(key)
            adj[(i, j)][a] |= 1 << b
            adj[(j, i)][b] |= 1 << a
        return PartiteGraph(pattern, n, {k: tuple(v) for k, v in adj.items()})

    @staticmethod
    def complete(pattern: Pattern, n: int) -> "PartiteGraph":
        """Complete n-blow-up: every allowed edge present."""
        if n < 1:
            raise ValueError(f"need n >= 1, got n={n}")
        full = (1 << n) - 1
        adj: dict[tuple[int, int], tuple[int, ...]] = {}
        row = (full,) * n
        for i, j in pattern.edges:
            adj[(i, j)] = row
            adj[(j, i)] = row
        return PartiteGraph(pattern, n, adj)

    # -- elementary queries ------------------------------------------------

    @property
    def k(self) -> int:
        return self.pattern.k

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def nbr_mask(self, part: int, idx: int, other: int) -> int:
        """Neighbors of (part, idx) in `other`; empty if parts not joined."""
        rows = self._adj.get((part, other))
        return rows[idx] if rows is not None else 0

    def has_edge(self, u: VertexId | tuple[int, int], v: VertexId | tuple[int, int]) -> bool:
        (pu, iu), (pv, iv) = u, v
        return bool(self.nbr_mask(pu, iu, pv) >> iv & 1)

    def degree(self, part: int, idx: int, other: int) -> int:
        return self.nbr_mask(part, idx, other).bit_count()

    def edge_count(self) -> int:
        total = 0
        for i, j in self.pattern.edges:
            total += sum(m.bit_count() for m in self._adj[(i, j)])
        return total

    def iter_edges(self) -> Iterator[tuple[int, int, int, int]]:
        """Edges once per unordered pair, in canonical sorted order."""
        for i, j in sorted(self.pattern.edges):
            rows = self._adj[(i, j)]
            for a in range(self.n):
                for b in bits(rows[a]):
                    yield (i, a, j, b)

    def vertices(self) -> Iterator[VertexId]:
        for p in range(1, self.k + 1):
            for i in range(self.n):
                yield VertexId(p, i)

    # -- derived graphs ----------------------------------------------------

    def delete_edges(self, edges: Iterable[tuple[int, int, int, int]]) -> "PartiteGraph":
        """New graph with the listed edges removed (absent edges ignored)."""
        adj = {key: list(rows) for key, rows in self._adj.items()}
        for i, a, j, b in edges:
            if (i, j) in adj:
                adj[(i, j)][a] &= ~(1 << b)
                adj[(j, i)][b] &= ~(1 << a)
        return PartiteGraph(self.pattern, self.n, {k: tuple(v) for k, v in adj.items()})

    def add_edges(self, edges: Iterable[tuple[int, int, int, int]]) -> "PartiteGraph":
        """New graph with the listed edges added; parts must be adjacent."""
        adj = {key: list(rows) for key, rows in self._adj.items()}
        for i, a, j, b in edges:
            if (i, j) not in adj:
                raise ValueError(f"edge ({i},{a})-({j},{b}) joins non-adjacent parts")
            adj[(i, j)][a] |= 1 << b
            adj[(j, i)][b] |= 1 << a
        return PartiteGraph(self.pattern, self.n, {k: tuple(v) for k, v in adj.items()})

    def induced(
        self, part_masks: Sequence[int]
    ) -> tuple["PartiteGraph", tuple[tuple[int, ...], ...]]:
        """Balanced induced subgraph on the given per-part masks.

        `part_masks` is indexed 1..k (slot 0 ignored).  All masks must
        select the same number of vertices; returns the reindexed graph
        plus, per part, the tuple mapping new idx -> old idx.
        """
        keep = [tuple(bits(part_masks[p])) for p in range(self.k + 1)]
        sizes = {len(keep[p]) for p in range(1, self.k + 1)}
        if len(sizes) != 1:
            raise ValueError(f"induced subgraph unbalanced: sizes {sorted(sizes)}")
        m = sizes.pop()
        if m == 0:
            raise ValueError("induced subgraph is empty")
        pos = [
            {old: new for new, old in enumerate(keep[p])} for p in range(self.k + 1)
        ]
        adj: dict[tuple[int, int], list[int]] = {}
        for i, j in self.pattern.edges:
            for a, b in ((i, j), (j, i)):
                rows = []
                for old in keep[a]:
                    nb = self.nbr_mask(a, old, b) & part_masks[b]
                    rows.append(mask_of(pos[b][o] for o in bits(nb)))
                adj[(a, b)] = rows
        g = PartiteGraph(self.pattern, m, {k: tuple(v) for k, v in adj.items()})
        return g, tuple(keep[p] for p in range(self.k + 1))

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "format": GRAPH_FORMAT,
            "k": self.k,
            "n": self.n,
            "pattern_edges": [list(e) for e in self.pattern.edge_list()],
            "edges": [list(e) for e in self.iter_edges()],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "PartiteGraph":
        if data.get("format") != GRAPH_FORMAT:
            raise ValueError(f"unsupported graph format: {data.get('format')!r}")
        pattern = Pattern(data["k"], [tuple(e) for e in data["pattern_edges"]])
        return PartiteGraph.from_edges(
            pattern, data["n"], [tuple(e) for e in data["edges"]]
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")

    @staticmethod
    def load(path) -> "PartiteGraph":
        with open(path) as fh:
            return PartiteGraph.from_json_dict(json.load(fh))


# -- module-level operations ----------------------------------------------


def delta_star(G: PartiteGraph) -> int:
    """Partite minimum degree: worst degree across any pattern edge."""
    if not G.pattern.edges:
        raise ValueError("empty pattern: partite minimum degree undefined")
    best = G.n
    for i, j in G.pattern.edges:
        for a in range(G.n):
            d = G._adj[(i, j)][a].bit_count()
            if d < best:
                best = d
        for b in range(G.n):
            d = G._adj[(j, i)][b].bit_count()
            if d < best:
                best = d
    return best


def is_transversal_copy(G: PartiteGraph, vs: Sequence[VertexId | tuple[int, int]]) -> bool:
    """True iff `vs` picks one valid vertex per part and realizes every
    pattern edge.  Malformed input returns False rather than raising."""
    try:
        picked = {}
        for p, i in vs:
            if not (1 <= p <= G.k and 0 <= i < G.n) or p in picked:
                return False
            picked[p] = i
    except (TypeError, ValueError):
        return False
    if len(picked) != G.k:
        return False
    return all(
        G.nbr_mask(i, picked[i], j) >> picked[j] & 1 for i, j in G.pattern.edges
    )


def density(
    G: PartiteGraph,
    X: Iterable[VertexId | tuple[int, int]],
    Y: Iterable[VertexId | tuple[int, int]],
) -> Fraction:
    """Exact edge density e(X, Y) / (|X| |Y|) between disjoint vertex sets."""
    xs = list(dict.fromkeys(tuple(v) for v in X))
    ys = list(dict.fromkeys(tuple(v) for v in Y))
    if not xs or not ys:
        raise ValueError("empty side: density needs two nonempty sets")
    if set(xs) & set(ys):
        raise ValueError("density needs disjoint sets")
    ymask = [0] * (G.k + 1)
    for p, i in ys:
        ymask[p] |= 1 << i
    e = 0
    for p, i in xs:
        for q in G.pattern.neighbors(p):
            e += (G.nbr_mask(p, i, q) & ymask[q]).bit_count()
    return Fraction(e, len(xs) * len(ys))


def common_neighborhood(
    G: PartiteGraph, S: Iterable[VertexId | tuple[int, int]], target: int
) -> int:
    """Mask of target-part vertices adjacent to every vertex of S.

    Empty S returns the full target part.  Every vertex of S must sit in
    a part the pattern joins to `target`.
    """
    if not (1 <= target <= G.k):
        raise ValueError(f"target part {target} out of range [1..{G.k}]")
    out = G.full_mask
    for p, i in S:
        if not G.pattern.adjacent(p, target):
            raise ValueError(
                f"non-adjacent part: vertex ({p},{i}) cannot constrain part {target}"
            )
        out &= G.nbr_mask(p, i, target)
        if not out:
            break
    return out
