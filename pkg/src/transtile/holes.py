"""Hole analysis for balanced blow-up instances.

An r-partite *hole* of size s consists of r equal-size vertex subsets
U_1, ..., U_r, one in each part of an r-tuple of parts that is a clique
in the pattern, such that no transversal clique picks one vertex from
every U_i.  The hole number alpha_r is the largest such s; it measures
how far the instance is from having well-spread edges, and every tiling
guarantee in this package degrades as it grows.

Holes are only hunted on pattern-clique part tuples: across a
non-adjacent part pair the empty relation would make every pair of
subsets a hole and the quantity degenerates.

Two regimes are provided.  The exact solver (`alpha_star_exact`) runs a
branch-and-bound over subset choices and is guarded by a size cap; its
"none" answers are proofs.  The randomized search
(`alpha_star_lower_bound`) grows candidate holes greedily with random
restarts; it returns verified certificates, and finding none is
evidence, never proof.  `certify_no_hole` packages the two regimes and
always reports which one applied.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from transtile.core import PartiteGraph, VertexId, bits, mask_of

__all__ = [
    "HoleCertificate",
    "HoleReport",
    "verify_hole",
    "alpha_star_exact",
    "alpha_star_lower_bound",
    "certify_no_hole",
    "eps_regular_check",
    "regular_pair_degree_check",
]

EXACT_CAP_DEFAULT = 10


@dataclass(frozen=True)
class HoleCertificate:
    """Candidate or verified hole: equal-size subsets on clique parts."""

    r: int
    parts: tuple[int, ...]
    sets: tuple[frozenset[int], ...]
    verified: bool = False

    @property
    def s(self) -> int:
        return len(self.sets[0]) if self.sets else 0

    def to_json_dict(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "parts": list(self.parts),
            "sets": [sorted(u) for u in self.sets],
            "verified": self.verified,
        }

    @staticmethod
    def from_json_dict(data: dict) -> "HoleCertificate":
        return HoleCertificate(
            r=data["r"],
            parts=tuple(data["parts"]),
            sets=tuple(frozenset(u) for u in data["sets"]),
            verified=bool(data["verified"]),
        )


@dataclass(frozen=True)
class HoleReport:
    """Outcome of a hole computation, tagged with the regime that ran."""

    alpha: int
    witness: HoleCertificate
    method: str  # "exact" | "randomized-lower-bound"
    explored: int

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "method": self.method,
            "explored": self.explored,
            "witness": self.witness.to_json_dict(),
        }


def _clique_in_sets(
    G: PartiteGraph, parts: Sequence[int], masks: Sequence[int]
) -> Optional[tuple[int, ...]]:
    """One transversal clique with the i-th vertex drawn from masks[i],
    or None.  Complete backtracking with neighborhood propagation."""
    r = len(parts)
    order = sorted(range(r), key=lambda t: (masks[t].bit_count(), parts[t]))
    chosen = [0] * r

    def rec(level: int, cur: Sequence[int]) -> bool:
        if level == r:
            return True
        t = order[level]
        for v in bits(cur[t]):
            chosen[t] = v
            nxt = list(cur)
            ok = True
            for u in order[level + 1 :]:
                nxt[u] &= G.nbr_mask(parts[t], v, parts[u])
                if not nxt[u]:
                    ok = False
                    break
            if ok and rec(level + 1, nxt):
                return True
        return False

    if any(not m for m in masks):
        return None
    return tuple(chosen) if rec(0, list(masks)) else None


def _check_arena(G: PartiteGraph, r: int, parts: Sequence[int]) -> None:
    if len(parts) != r or len(set(parts)) != r:
        raise ValueError(f"invalid hole arena: need {r} distinct parts, got {parts}")
    for p in parts:
        if not 1 <= p <= G.k:
            raise ValueError(f"invalid hole arena: part {p} out of range [1..{G.k}]")
    for a, b in combinations(parts, 2):
        if not G.pattern.adjacent(a, b):
            raise ValueError(
                f"invalid hole arena: parts {a} and {b} are not pattern-adjacent"
            )


def verify_hole(G: PartiteGraph, cand: HoleCertificate) -> bool:
    """True iff the candidate's sets really form a hole.

    The arena (distinct pattern-clique parts, equal-size in-range sets)
    is validated strictly; a malformed arena raises rather than
    returning False.  The copy search is complete, so both answers are
    proofs.
    """
    _check_arena(G, cand.r, cand.parts)
    sizes = {len(u) for u in cand.sets}
    if len(cand.sets) != cand.r or len(sizes) != 1:
        raise ValueError("invalid hole arena: need one equal-size set per part")
    for u in cand.sets:
        if any(not 0 <= v < G.n for v in u):
            raise ValueError("invalid hole arena: vertex index out of range")
    if sizes == {0}:
        return True
    masks = [mask_of(u) for u in cand.sets]
    return _clique_in_sets(G, cand.parts, masks) is None


# -- exact regime -----------------------------------------------------------


def _alpha_pair_exact(G: PartiteGraph, pi: int, pj: int) -> tuple[int, tuple[int, int], int]:
    """Exact 2-partite hole number for one part pair.

    Sweeps every subset A of part pi once: the common non-neighborhood
    T(A) in part pj is monotone decreasing in A, so
    max_A min(|A|, |T(A)|) is the exact answer.  Returns
    (alpha, (A_mask, T_mask), nodes).
    """
    n = G.n
    full = (1 << n) - 1
    non = [full & ~G.nbr_mask(pi, a, pj) for a in range(n)]
    t = [0] * (1 << n)
    t[0] = full
    best, wa, wt = 0, 0, 0
    for m in range(1, 1 << n):
        low = m & -m
        t[m] = t[m ^ low] & non[low.bit_length() - 1]
        val = min(m.bit_count(), t[m].bit_count())
        if val > best:
            best, wa, wt = val, m, t[m]
    return best, (wa, wt), (1 << n) - 1


def _exists_hole(
    G: PartiteGraph, parts: Sequence[int], s: int, counter: list[int]
) -> Optional[tuple[int, ...]]:
    """Branch-and-bound: masks of an s-hole on `parts`, or None (a proof).

    Enumerates transversal cliques on the parts once, then branches on
    the subset choice for each part in ascending part order, keeping the
    list of cliques still realizable inside the partial choice.  An
    empty active list means any completion works.
    """
    n = G.n
    r = len(parts)
    all_cliques: list[tuple[int, ...]] = []
    fulls = [G.full_mask] * r

    def enum(level: int, cur: list[int], acc: list[int]) -> None:
        if level == r:
            all_cliques.append(tuple(acc))
            return
        for v in bits(cur[level]):
            nxt = list(cur)
            ok = True
            for u in range(level + 1, r):
                nxt[u] &= G.nbr_mask(parts[level], v, parts[u])
                if not nxt[u]:
                    ok = False
                    break
            if ok:
                enum(level + 1, nxt, acc + [v])

    enum(0, fulls, [])
    lowest = mask_of(range(s))

    def rec(level: int, active: list[tuple[int, ...]], chosen: list[int]) -> Optional[list[int]]:
        counter[0] += 1
        if not active:
            return chosen + [lowest] * (r - level)
        if level == r - 1:
            forbidden = mask_of(c[level] for c in active)
            free = G.full_mask & ~forbidden
            if free.bit_count() >= s:
                return chosen + [mask_of(list(bits(free))[:s])]
            return None
        used = {c[level] for c in active}
        if n - len(used) >= s:
            free = G.full_mask & ~mask_of(used)
            return chosen + [mask_of(list(bits(free))[:s])] + [lowest] * (r - level - 1)
        for combo in combinations(range(n), s):
            u = mask_of(combo)
            nxt = [c for c in active if u >> c[level] & 1]
            res = rec(level + 1, nxt, chosen + [u])
            if res is not None:
                return res
        return None

    out = rec(0, all_cliques, [])
    return tuple(out) if out is not None else None


def alpha_star_exact(
    G: PartiteGraph, r: int, cap: int = EXACT_CAP_DEFAULT
) -> HoleReport:
    """Exact hole number alpha_r with a maximum witness.

    Guarded: refuses instances with n above `cap` since the search is
    exponential in n.  alpha_r = 0 is reported with the empty
    certificate.  Part tuples with no transversal-clique arena simply do
    not contribute.
    """
    if not 2 <= r <= G.k:
        raise ValueError(f"hole order r={r} out of range [2..{G.k}]")
    if G.n > cap:
        raise ValueError(
            f"exact mode refused: n={G.n} exceeds cap {cap}; "
            "raise cap or use alpha_star_lower_bound"
        )
    tuples = G.pattern.clique_part_tuples(r)
    best = 0
    witness = HoleCertificate(r=r, parts=(), sets=(), verified=True)
    explored = 0
    for parts in tuples:
        if r == 2:
            val, (wa, wt), nodes = _alpha_pair_exact(G, parts[0], parts[1])
            explored += nodes
            if val > best:
                best = val
                ua = frozenset(list(bits(wa))[:val])
                ub = frozenset(list(bits(wt))[:val])
                witness = HoleCertificate(r, parts, (ua, ub), verified=True)
        else:
            counter = [0]
            for s in range(G.n, best, -1):
                masks = _exists_hole(G, parts, s, counter)
                if masks is not None:
                    best = s
                    witness = HoleCertificate(
                        r, parts, tuple(frozenset(bits(m)) for m in masks), verified=True
                    )
                    break
            explored += counter[0]
    if best > 0:
        assert verify_hole(G, witness)
    return HoleReport(alpha=best, witness=witness, method="exact", explored=explored)


# -- randomized regime --------------------------------------------------------


def alpha_star_lower_bound(
    G: PartiteGraph, r: int, s: int, trials: int = 200, seed: int = 0
) -> Optional[HoleCertificate]:
    """Randomized search for a size-s hole: greedy grow with random
    swaps and restarts.  A returned certificate is verified; None means
    none found within the trial budget, which is not a proof of absence.
    """
    if not 2 <= r <= G.k:
        raise ValueError(f"hole order r={r} out of range [2..{G.k}]")
    if not 1 <= s <= G.n:
        raise ValueError(f"hole size s={s} out of range [1..{G.n}]")
    tuples = G.pattern.clique_part_tuples(r)
    if not tuples:
        return None
    for trial in range(trials):
        rng = random.Random((seed * 0x9E3779B1 + trial) & 0xFFFFFFFF)
        parts = tuples[trial % len(tuples)]
        masks = [0] * r
        budget = 40 * (s * r + 4)
        while budget > 0:
            budget -= 1
            sizes = [m.bit_count() for m in masks]
            if min(sizes) == s:
                cand = HoleCertificate(
                    r, parts, tuple(frozenset(bits(m)) for m in masks)
                )
                if verify_hole(G, cand):
                    return HoleCertificate(r, parts, cand.sets, verified=True)
                break
            t = rng.choice([i for i in range(r) if sizes[i] == min(sizes)])
            good = []
            for v in bits(G.full_mask & ~masks[t]):
                probe = list(masks)
                probe[t] = 1 << v
                if all(probe) and _clique_in_sets(G, parts, probe) is not None:
                    continue
                good.append(v)
            if good:
                masks[t] |= 1 << rng.choice(good)
            else:
                donors = [i for i in range(r) if sizes[i] > 0]
                if not donors:
                    break
                d = rng.choice(donors)
                masks[d] &= ~(1 << rng.choice(list(bits(masks[d]))))
    return None


def certify_no_hole(
    G: PartiteGraph,
    r: int,
    s: int,
    trials: int = 64,
    seed: int = 0,
    exact_cap: int = EXACT_CAP_DEFAULT,
) -> tuple[bool, str, Optional[HoleCertificate]]:
    """Decide (or probe) whether the instance has no r-partite hole of
    size s.  Returns (certified, regime, counterexample-or-None).

    With n <= exact_cap the exact solver runs and "certified" is a
    proof.  Above the cap the randomized search runs and "certified"
    only means no hole surfaced within the trial budget.
    """
    if s > G.n:
        return True, "exact", None
    if G.n <= exact_cap:
        report = alpha_star_exact(G, r, cap=exact_cap)
        if report.alpha >= s:
            return False, "exact", report.witness
        return True, "exact", None
    found = alpha_star_lower_bound(G, r, s, trials=trials, seed=seed)
    return found is None, "randomized-lower-bound", found


# -- regularity checks ---------------------------------------------------------


REGULARITY_CAP = 12


def _positions(vs: Iterable[VertexId | tuple[int, int]]) -> list[tuple[int, int]]:
    out = list(dict.fromkeys((p, i) for p, i in vs))
    return out


def eps_regular_check(
    G: PartiteGraph,
    X: Iterable[VertexId | tuple[int, int]],
    Y: Iterable[VertexId | tuple[int, int]],
    eps,
    d,
) -> tuple[bool, Optional[tuple[tuple[VertexId, ...], tuple[VertexId, ...]]]]:
    """Exhaustive epsilon-regularity check on a small pair.

    Verifies d(X, Y) >= d and that every pair of subsets X' and Y' with
    |X'| >= eps|X|, |Y'| >= eps|Y| satisfies |d(X',Y') - d(X,Y)| <= eps.
    All arithmetic is exact rational.  Returns (True, None) or
    (False, violating pair).  Both sides are capped at 12 vertices.
    """
    eps = Fraction(eps)
    d = Fraction(d)
    xs = _positions(X)
    ys = _positions(Y)
    if not xs or not ys:
        raise ValueError("empty side: regularity check needs two nonempty sets")
    if set(xs) & set(ys):
        raise ValueError("regularity check needs disjoint sets")
    nx, ny = len(xs), len(ys)
    if nx > REGULARITY_CAP or ny > REGULARITY_CAP:
        raise ValueError(f"regularity check capped at {REGULARITY_CAP} per side")
    ymask_of_x = []
    for p, i in xs:
        m = 0
        for pos, (q, j) in enumerate(ys):
            if G.has_edge((p, i), (q, j)):
                m |= 1 << pos
        ymask_of_x.append(m)
    e_full = sum(m.bit_count() for m in ymask_of_x)
    if Fraction(e_full, nx * ny) < d:
        return False, (
            tuple(VertexId(*v) for v in xs),
            tuple(VertexId(*v) for v in ys),
        )
    a, b = eps.numerator, eps.denominator
    xy = nx * ny
    cnt = [0] * nx
    esub = [0] * (1 << nx)
    xsize_ok = [b * m.bit_count() >= a * nx for m in range(1 << nx)]
    xpop = [m.bit_count() for m in range(1 << nx)]
    for ymask in range(1, 1 << ny):
        sy = ymask.bit_count()
        if b * sy < a * ny:
            continue
        for t in range(nx):
            cnt[t] = (ymask_of_x[t] & ymask).bit_count()
        for xmask in range(1, 1 << nx):
            low = xmask & -xmask
            esub[xmask] = esub[xmask ^ low] + cnt[low.bit_length() - 1]
            if not xsize_ok[xmask]:
                continue
            sxy = xpop[xmask] * sy
            if b * abs(esub[xmask] * xy - e_full * sxy) > a * sxy * xy:
                xv = tuple(VertexId(*xs[t]) for t in bits(xmask))
                yv = tuple(VertexId(*ys[t]) for t in bits(ymask))
                return False, (xv, yv)
    return True, None


def regular_pair_degree_check(
    G: PartiteGraph,
    X: Iterable[VertexId | tuple[int, int]],
    Y: Iterable[VertexId | tuple[int, int]],
    eps,
    d,
) -> bool:
    """Degree spread implied by regularity, checked by brute force: for
    every B inside Y with |B| >= eps|Y|, at most eps|X| vertices of X
    have fewer than (d - eps)|B| neighbors in B."""
    eps = Fraction(eps)
    f = Fraction(d) - eps
    xs = _positions(X)
    ys = _positions(Y)
    nx, ny = len(xs), len(ys)
    if nx > REGULARITY_CAP or ny > REGULARITY_CAP:
        raise ValueError(f"degree check capped at {REGULARITY_CAP} per side")
    ymask_of_x = []
    for p, i in xs:
        m = 0
        for pos, (q, j) in enumerate(ys):
            if G.has_edge((p, i), (q, j)):
                m |= 1 << pos
        ymask_of_x.append(m)
    a, b = eps.numerator, eps.denominator
    for bmask in range(1, 1 << ny):
        sb = bmask.bit_count()
        if b * sb < a * ny:
            continue
        low = sum(
            1
            for m in ymask_of_x
            if (m & bmask).bit_count() * f.denominator < f.numerator * sb
        )
        if b * low > a * nx:
            return False
    return True
