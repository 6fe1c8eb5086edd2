"""Transversal copies, tilings, factors, and mixed tilings.

A *transversal copy* picks one vertex per part and realizes every
pattern edge.  A *tiling* is a family of pairwise disjoint copies; its
leftover is automatically balanced because every copy consumes exactly
one vertex per part.  A *factor* is a tiling with empty leftover.

Search strategy notes
---------------------
* Copy searches are complete backtracking over parts with bitmask
  neighborhood propagation, always branching on the part with the
  fewest candidates and breaking ties toward the lowest part index and
  lowest vertex index.  "None" answers are therefore proofs.
* The cycle finder anchors on every vertex of one part in turn and
  sweeps layer sets around the cycle; layered reachability is exact for
  each anchor, and all anchors are tried, so this search is complete at
  every size (no fallback needed for negative answers).
* The factor solver branches on the copies covering the lowest-degree
  uncovered vertex of part 1 (fail-first ordering).  It is exponential
  in the worst case and guarded by a size cap; absence answers come
  with search statistics.

Mixed tilings use two shapes on cycle patterns, each padded to one
vertex per part by isolated filler vertices: a 3-vertex path across
consecutive parts, and two vertex-disjoint edges on disjoint
consecutive part pairs.  `maximal_mixed_tiling` grows one randomly and
stops only when an exhaustive placement scan finds no further copy, so
its result is maximal by construction.  `check_appendix_invariants`
re-verifies maximality and then asserts the leftover-degree bounds that
maximality forces: per-copy edge counts into the leftover, direction
exclusivity for isolated vertices, the window bound for isolated pairs,
and the total isolated-edge budget.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from transtile.core import (
    Pattern,
    PartiteGraph,
    VertexId,
    VertexSetFamily,
    bits,
    is_transversal_copy,
    mask_of,
)

__all__ = [
    "TransversalCopy",
    "Tiling",
    "MixedCopy",
    "MixedTiling",
    "SearchStats",
    "InvariantReport",
    "find_transversal_clique",
    "greedy_clique_tiling",
    "find_transversal_path",
    "find_transversal_cycle",
    "greedy_cycle_tiling",
    "exact_transversal_factor",
    "exact_transversal_factor_search",
    "maximal_mixed_tiling",
    "check_appendix_invariants",
    "iter_transversal_copies",
]

FACTOR_CAP_DEFAULT = 12


@dataclass(frozen=True)
class TransversalCopy:
    """One vertex per part: verts[p-1] is the index chosen in part p."""

    verts: tuple[int, ...]

    def vertex_ids(self) -> tuple[VertexId, ...]:
        return tuple(VertexId(p + 1, v) for p, v in enumerate(self.verts))

    def to_json(self) -> list[int]:
        return list(self.verts)


@dataclass(frozen=True)
class Tiling:
    """Disjoint transversal copies plus the derived covered masks."""

    copies: tuple[TransversalCopy, ...]
    n: int
    k: int

    @staticmethod
    def build(G: PartiteGraph, copies: Sequence[TransversalCopy]) -> "Tiling":
        t = Tiling(tuple(copies), G.n, G.k)
        for c in copies:
            if not is_transversal_copy(G, c.vertex_ids()):
                raise ValueError(f"not a transversal copy: {c.verts}")
        covered = t.covered_masks()
        if any(covered[p].bit_count() != len(copies) for p in range(1, G.k + 1)):
            raise ValueError("copies overlap")
        return t

    def covered_masks(self) -> list[int]:
        masks = [0] * (self.k + 1)
        for c in self.copies:
            for p in range(1, self.k + 1):
                masks[p] |= 1 << c.verts[p - 1]
        return masks

    def leftover_masks(self) -> list[int]:
        full = (1 << self.n) - 1
        return [0] + [full & ~m for m in self.covered_masks()[1:]]

    @property
    def leftover_per_part(self) -> int:
        return self.n - len(self.copies)

    def to_json_dict(self) -> dict:
        return {
            "copies": [c.to_json() for c in self.copies],
            "leftover_per_part": self.leftover_per_part,
        }


@dataclass(frozen=True)
class SearchStats:
    nodes: int
    max_depth: int

    def to_json_dict(self) -> dict:
        return {"nodes": self.nodes, "max_depth": self.max_depth}


# -- generic complete copy search ---------------------------------------------


def iter_transversal_copies(
    G: PartiteGraph, masks: Sequence[int]
) -> Iterator[tuple[int, ...]]:
    """All transversal copies with part-p vertex inside masks[p].

    `masks` is indexed 1..k (slot 0 ignored).  Complete backtracking;
    deterministic order (fewest candidates first, lowest indices first).
    """
    k = G.k
    chosen = [-1] * (k + 1)

    def rec(cur: list[int], left: frozenset[int]) -> Iterator[tuple[int, ...]]:
        if not left:
            yield tuple(chosen[1:])
            return
        p = min(left, key=lambda q: (cur[q].bit_count(), q))
        rest = left - {p}
        for v in bits(cur[p]):
            chosen[p] = v
            nxt = list(cur)
            dead = False
            for q in rest:
                if G.pattern.adjacent(p, q):
                    nxt[q] &= G.nbr_mask(p, v, q)
                    if not nxt[q]:
                        dead = True
                        break
            if not dead:
                yield from rec(nxt, rest)
        chosen[p] = -1

    if any(not masks[p] for p in range(1, k + 1)):
        return
    yield from rec(list(masks), frozenset(range(1, k + 1)))


def _first_copy(G: PartiteGraph, masks: Sequence[int]) -> Optional[tuple[int, ...]]:
    return next(iter_transversal_copies(G, masks), None)


def _family_masks(G: PartiteGraph, constraints: VertexSetFamily) -> list[int]:
    masks = [0] * (G.k + 1)
    for p in range(1, G.k + 1):
        try:
            sub = constraints.subset(p)
        except KeyError:
            raise ValueError(f"constraint missing part {p}") from None
        if any(not 0 <= v < G.n for v in sub):
            raise ValueError(f"constraint for part {p} has an index out of range")
        masks[p] = mask_of(sub)
    return masks


def find_transversal_clique(
    G: PartiteGraph, constraints: VertexSetFamily
) -> Optional[TransversalCopy]:
    """First transversal clique inside the constraint sets, or None (a proof)."""
    if not G.pattern.is_complete:
        raise ValueError("transversal clique search needs a complete pattern")
    found = _first_copy(G, _family_masks(G, constraints))
    return TransversalCopy(found) if found else None


def greedy_clique_tiling(G: PartiteGraph) -> Tiling:
    """Repeatedly extract the first available transversal clique.

    The leftover per part never exceeds the k-partite hole number: the
    leftover sets are equal-size and clique-free, hence form a hole.
    """
    if not G.pattern.is_complete:
        raise ValueError("transversal clique tiling needs a complete pattern")
    masks = [G.full_mask] * (G.k + 1)
    copies = []
    while True:
        found = _first_copy(G, masks)
        if found is None:
            break
        copies.append(TransversalCopy(found))
        for p in range(1, G.k + 1):
            masks[p] &= ~(1 << found[p - 1])
    return Tiling(tuple(copies), G.n, G.k)


# -- paths and cycles -----------------------------------------------------------


def find_transversal_path(
    G: PartiteGraph, i: int, j: int, X: VertexSetFamily
) -> Optional[tuple[VertexId, ...]]:
    """Path x_i .. x_j, one vertex per part, inside the given sets.

    Parts i..j must be consecutive and each consecutive pair must be
    pattern-adjacent.  Forward sweep of layer sets, then backtrack; the
    sweep computes exact reachability, so None is a proof that no such
    path exists inside the sets.
    """
    if not 1 <= i < j <= G.k:
        raise ValueError(f"non-consecutive parts: need 1 <= i < j <= k, got ({i},{j})")
    span = tuple(range(i, j + 1))
    if tuple(sorted(X.parts)) != span:
        raise ValueError(
            f"non-consecutive parts: constraint family covers {X.parts}, need {span}"
        )
    for a in range(i, j):
        if not G.pattern.adjacent(a, a + 1):
            raise ValueError(f"non-consecutive parts: {a} and {a + 1} not joined")
    layers = {i: X.mask(i)}
    if any(not 0 <= v < G.n for p in span for v in X.subset(p)):
        raise ValueError("constraint index out of range")
    for a in range(i, j):
        cur = 0
        for v in bits(layers[a]):
            cur |= G.nbr_mask(a, v, a + 1)
        layers[a + 1] = cur & X.mask(a + 1)
        if not layers[a + 1]:
            return None
    path = [0] * (j - i + 1)
    last = next(bits(layers[j]))
    path[-1] = last
    for a in range(j - 1, i - 1, -1):
        prev = layers[a] & G.nbr_mask(a + 1, path[a + 1 - i], a)
        path[a - i] = next(bits(prev))
    return tuple(VertexId(i + t, v) for t, v in enumerate(path))


def find_transversal_cycle(
    G: PartiteGraph, constraints: VertexSetFamily
) -> Optional[TransversalCopy]:
    """Transversal cycle inside the constraint sets, or None (a proof).

    Anchors on each vertex of the most constrained part and sweeps the
    remaining arc; per anchor the sweep decides existence exactly, and
    every anchor is tried.
    """
    if not G.pattern.is_cycle:
        raise ValueError("transversal cycle search needs a cycle pattern")
    masks = _family_masks(G, constraints)
    k = G.k
    c = min(range(1, k + 1), key=lambda p: (masks[p].bit_count(), p))
    seq = [(c - 1 + t) % k + 1 for t in range(1, k)]
    for v in bits(masks[c]):
        layers = []
        cur = masks[seq[0]] & G.nbr_mask(c, v, seq[0])
        layers.append(cur)
        dead = not cur
        for t in range(1, k - 1):
            if dead:
                break
            prev_part, part = seq[t - 1], seq[t]
            nxt = 0
            for u in bits(layers[t - 1]):
                nxt |= G.nbr_mask(prev_part, u, part)
            nxt &= masks[part]
            layers.append(nxt)
            dead = not nxt
        if dead:
            continue
        closing = layers[-1] & G.nbr_mask(c, v, seq[-1])
        if not closing:
            continue
        verts = [0] * (k + 1)
        verts[c] = v
        verts[seq[-1]] = next(bits(closing))
        for t in range(k - 3, -1, -1):
            part, nxt_part = seq[t], seq[t + 1]
            ok = layers[t] & G.nbr_mask(nxt_part, verts[nxt_part], part)
            verts[part] = next(bits(ok))
        return TransversalCopy(tuple(verts[1:]))
    return None


def greedy_cycle_tiling(G: PartiteGraph) -> Tiling:
    """Repeatedly extract transversal cycles until none remain."""
    if not G.pattern.is_cycle:
        raise ValueError("transversal cycle tiling needs a cycle pattern")
    masks = [G.full_mask] * (G.k + 1)
    copies = []
    while all(masks[p] for p in range(1, G.k + 1)):
        fam = VertexSetFamily([(p, bits(masks[p])) for p in range(1, G.k + 1)])
        found = find_transversal_cycle(G, fam)
        if found is None:
            break
        copies.append(found)
        for p in range(1, G.k + 1):
            masks[p] &= ~(1 << found.verts[p - 1])
    return Tiling(tuple(copies), G.n, G.k)


# -- exact factor decision ---------------------------------------------------------


def exact_transversal_factor_search(
    G: PartiteGraph, cap: Optional[int] = FACTOR_CAP_DEFAULT
) -> tuple[Optional[Tiling], SearchStats]:
    """Complete factor decision with search statistics.

    Branches on the copies through the lowest-degree uncovered part-1
    vertex.  Returns (factor, stats) or (None, stats); None is a proof
    of absence.  Refuses n above the cap unless cap is None.
    """
    if cap is not None and G.n > cap:
        raise ValueError(
            f"exact mode refused: n={G.n} exceeds cap {cap}; pass a larger cap to force"
        )
    k = G.k
    total_deg = [
        sum(G.nbr_mask(1, v, q).bit_count() for q in G.pattern.neighbors(1))
        for v in range(G.n)
    ]
    order = sorted(range(G.n), key=lambda v: (total_deg[v], v))
    nodes = 0
    best_depth = 0
    acc: list[TransversalCopy] = []

    def rec(masks: list[int], depth: int) -> bool:
        nonlocal nodes, best_depth
        best_depth = max(best_depth, depth)
        v1 = next((v for v in order if masks[1] >> v & 1), None)
        if v1 is None:
            return True
        cand = list(masks)
        cand[1] = 1 << v1
        for found in iter_transversal_copies(G, cand):
            nodes += 1
            nxt = list(masks)
            for p in range(1, k + 1):
                nxt[p] &= ~(1 << found[p - 1])
            acc.append(TransversalCopy(found))
            if rec(nxt, depth + 1):
                return True
            acc.pop()
        return False

    ok = rec([G.full_mask] * (k + 1), 0)
    stats = SearchStats(nodes=nodes, max_depth=best_depth)
    if not ok:
        return None, stats
    return Tiling(tuple(acc), G.n, G.k), stats


def exact_transversal_factor(
    G: PartiteGraph, cap: Optional[int] = FACTOR_CAP_DEFAULT
) -> Optional[Tiling]:
    """Transversal factor, or None as a proof of absence (cap-guarded)."""
    return exact_transversal_factor_search(G, cap)[0]


# -- mixed tilings -------------------------------------------------------------------


@dataclass(frozen=True)
class MixedCopy:
    """One vertex per part; `kind` and `anchor` say which are non-isolated.

    kind "p3": path verts[a-1] - verts[a] - verts[a+1] on parts
    (a, a+1, a+2) cyclically, anchor = (a,).
    kind "m2": edges on part pairs (a, a+1) and (b, b+1), anchor = (a, b).
    All remaining positions are isolated fillers.
    """

    kind: str
    anchor: tuple[int, ...]
    verts: tuple[int, ...]

    def nonisolated_parts(self, k: int) -> tuple[int, ...]:
        if self.kind == "p3":
            a = self.anchor[0]
            return tuple(sorted({a, a % k + 1, (a + 1) % k + 1}))
        a, b = self.anchor
        return tuple(sorted({a, a % k + 1, b, b % k + 1}))

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "anchor": list(self.anchor), "verts": list(self.verts)}


@dataclass(frozen=True)
class MixedTiling:
    copies: tuple[MixedCopy, ...]
    n: int
    k: int

    def covered_masks(self) -> list[int]:
        masks = [0] * (self.k + 1)
        for c in self.copies:
            for p in range(1, self.k + 1):
                masks[p] |= 1 << c.verts[p - 1]
        return masks

    def leftover_masks(self) -> list[int]:
        full = (1 << self.n) - 1
        return [0] + [full & ~m for m in self.covered_masks()[1:]]

    @property
    def leftover_per_part(self) -> int:
        return self.n - len(self.copies)

    @property
    def p3_copies(self) -> tuple[MixedCopy, ...]:
        return tuple(c for c in self.copies if c.kind == "p3")

    @property
    def m2_copies(self) -> tuple[MixedCopy, ...]:
        return tuple(c for c in self.copies if c.kind == "m2")

    def counts(self) -> dict:
        p3 = len(self.p3_copies)
        return {"p3": p3, "m2": len(self.copies) - p3}

    def to_json_dict(self) -> dict:
        return {
            "copies": [c.to_json_dict() for c in self.copies],
            "leftover_per_part": self.leftover_per_part,
        }


def _cyc(p: int, k: int) -> int:
    return (p - 1) % k + 1


def _p3_feasible(G: PartiteGraph, L: Sequence[int], a: int) -> bool:
    k = G.k
    mid, right = _cyc(a + 1, k), _cyc(a + 2, k)
    for u in bits(L[mid]):
        if G.nbr_mask(mid, u, a) & L[a] and G.nbr_mask(mid, u, right) & L[right]:
            return True
    return False


def _pair_feasible(G: PartiteGraph, L: Sequence[int], a: int) -> bool:
    nxt = _cyc(a + 1, G.k)
    return any(G.nbr_mask(a, u, nxt) & L[nxt] for u in bits(L[a]))


def _mixed_placements(G: PartiteGraph, L: Sequence[int]) -> list[tuple]:
    """All currently addable shapes, exhaustively: the stop criterion."""
    k = G.k
    if any(not L[p] for p in range(1, k + 1)):
        return []
    out = []
    for a in range(1, k + 1):
        if _p3_feasible(G, L, a):
            out.append(("p3", a))
    for a in range(1, k + 1):
        for b in range(a + 2, k + 1):
            parts = {a, _cyc(a + 1, k), b, _cyc(b + 1, k)}
            if len(parts) < 4:
                continue
            if _pair_feasible(G, L, a) and _pair_feasible(G, L, b):
                out.append(("m2", a, b))
    return out


def maximal_mixed_tiling(G: PartiteGraph, seed: int = 0) -> MixedTiling:
    """Randomized greedy mixed tiling, maximal by construction.

    Each round enumerates every addable placement exhaustively, picks
    one (and its concrete vertices) at random, and stops only when no
    shape fits, so the result is maximal for the two shapes.
    """
    if not G.pattern.is_cycle or G.k < 4:
        raise ValueError("mixed tiling needs a cycle pattern with k >= 4")
    k = G.k
    rng = random.Random(seed)
    L = [0] + [G.full_mask] * k
    copies: list[MixedCopy] = []
    while True:
        options = _mixed_placements(G, L)
        if not options:
            break
        choice = rng.choice(options)
        verts = [-1] * (k + 1)
        if choice[0] == "p3":
            a = choice[1]
            mid, right = _cyc(a + 1, k), _cyc(a + 2, k)
            mids = [
                u
                for u in bits(L[mid])
                if G.nbr_mask(mid, u, a) & L[a] and G.nbr_mask(mid, u, right) & L[right]
            ]
            u = rng.choice(mids)
            verts[mid] = u
            verts[a] = rng.choice(list(bits(G.nbr_mask(mid, u, a) & L[a])))
            verts[right] = rng.choice(list(bits(G.nbr_mask(mid, u, right) & L[right])))
            anchor = (a,)
        else:
            _, a, b = choice
            for start in (a, b):
                nxt = _cyc(start + 1, k)
                xs = [u for u in bits(L[start]) if G.nbr_mask(start, u, nxt) & L[nxt]]
                x = rng.choice(xs)
                verts[start] = x
                verts[nxt] = rng.choice(list(bits(G.nbr_mask(start, x, nxt) & L[nxt])))
            anchor = (a, b)
        for p in range(1, k + 1):
            if verts[p] < 0:
                verts[p] = rng.choice(list(bits(L[p])))
        copies.append(MixedCopy(kind=choice[0], anchor=anchor, verts=tuple(verts[1:])))
        for p in range(1, k + 1):
            L[p] &= ~(1 << verts[p])
    return MixedTiling(tuple(copies), G.n, G.k)


@dataclass(frozen=True)
class InvariantReport:
    maximal: bool
    vacuous: bool
    violations: tuple[tuple, ...]
    copies_checked: int
    extension: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return self.maximal and not self.violations

    def to_json_dict(self) -> dict:
        return {
            "maximal": self.maximal,
            "vacuous": self.vacuous,
            "copies_checked": self.copies_checked,
            "violations": [list(v) for v in self.violations],
            "extension": list(self.extension) if self.extension else None,
        }


def _validate_mixed(G: PartiteGraph, T: MixedTiling) -> None:
    k = G.k
    for c in T.copies:
        if len(c.verts) != k or any(not 0 <= v < G.n for v in c.verts):
            raise ValueError(f"invalid mixed copy: {c}")
        if c.kind == "p3":
            (a,) = c.anchor
            mid, right = _cyc(a + 1, k), _cyc(a + 2, k)
            if not (
                G.has_edge((a, c.verts[a - 1]), (mid, c.verts[mid - 1]))
                and G.has_edge((mid, c.verts[mid - 1]), (right, c.verts[right - 1]))
            ):
                raise ValueError(f"path edges missing in copy {c}")
        elif c.kind == "m2":
            a, b = c.anchor
            for start in (a, b):
                nxt = _cyc(start + 1, k)
                if not G.has_edge((start, c.verts[start - 1]), (nxt, c.verts[nxt - 1])):
                    raise ValueError(f"matching edge missing in copy {c}")
            if len({a, _cyc(a + 1, k), b, _cyc(b + 1, k)}) < 4:
                raise ValueError(f"matching pairs overlap in copy {c}")
        else:
            raise ValueError(f"unknown copy kind {c.kind!r}")
    covered = T.covered_masks()
    if any(covered[p].bit_count() != len(T.copies) for p in range(1, k + 1)):
        raise ValueError("leftover unbalanced: copies overlap or collide")


def check_appendix_invariants(G: PartiteGraph, T: MixedTiling) -> InvariantReport:
    """Maximality-forced degree bounds of a mixed tiling's leftover.

    Re-verifies maximality first (exhaustively over placements); a
    non-maximal tiling is flagged as such, never as an invariant
    violation.  On a maximal tiling with nonempty leftover L, checks per
    copy N:

    * e(V(N), L) <= 4|L|/k,
    * each isolated vertex sends edges into at most one of the two
      adjacent leftover parts,
    * isolated vertices of the same copy adjacent to L sit within
      cyclic distance 2 of each other,
    * e(isolated(N), L) <= 2|L|/k.
    """
    if not G.pattern.is_cycle:
        raise ValueError("mixed tiling invariants need a cycle pattern")
    _validate_mixed(G, T)
    k = G.k
    L = T.leftover_masks()
    total_leftover = sum(L[p].bit_count() for p in range(1, k + 1))
    if total_leftover == 0:
        return InvariantReport(
            maximal=True, vacuous=True, violations=(), copies_checked=0
        )
    blockers = _mixed_placements(G, L)
    if blockers:
        return InvariantReport(
            maximal=False,
            vacuous=False,
            violations=(),
            copies_checked=0,
            extension=blockers[0],
        )
    violations: list[tuple] = []
    for idx, c in enumerate(T.copies):
        noniso = set(c.nonisolated_parts(k))
        e_copy = 0
        e_iso = 0
        adjacent_iso: list[int] = []
        for p in range(1, k + 1):
            v = c.verts[p - 1]
            fwd = (G.nbr_mask(p, v, _cyc(p + 1, k)) & L[_cyc(p + 1, k)]).bit_count()
            bwd = (G.nbr_mask(p, v, _cyc(p - 1, k)) & L[_cyc(p - 1, k)]).bit_count()
            e_copy += fwd + bwd
            if p in noniso:
                continue
            e_iso += fwd + bwd
            if fwd and bwd:
                violations.append((idx, "isolated-direction", p))
            if fwd or bwd:
                adjacent_iso.append(p)
        for x in range(len(adjacent_iso)):
            for y in range(x + 1, len(adjacent_iso)):
                d = abs(adjacent_iso[x] - adjacent_iso[y])
                if min(d, k - d) > 2:
                    violations.append(
                        (idx, "isolated-pair-window", adjacent_iso[x], adjacent_iso[y])
                    )
        if k * e_copy > 4 * total_leftover:
            violations.append((idx, "copy-edge-budget", e_copy))
        if k * e_iso > 2 * total_leftover:
            violations.append((idx, "isolated-edge-budget", e_iso))
    return InvariantReport(
        maximal=True,
        vacuous=False,
        violations=tuple(violations),
        copies_checked=len(T.copies),
    )
