"""Absorption toolchain for complete patterns.

The pieces fit together bottom-up:

* a *fan* at v collects disjoint (k-1)-sets, each completing v to a
  transversal copy;
* a *connector* for same-part vertices u, v is a small set S such that
  both {u} union S and {v} union S carry transversal factors, found even
  when an adversarial forbidden set W must be avoided;
* an *absorber* for a transversal k-set S is a set A, disjoint from S,
  such that both A and A union S carry transversal factors, assembled
  from one transversal clique plus one connector per part;
* a *robust template* is a sparse bipartite gadget whose right side can
  be perfectly matched no matter which m-subset of the X-side shows up;
* `build_absorbing_set` wires per-part templates to per-edge absorbers
  so that the assembled set R can swallow any small balanced leftover,
  and `verify_absorbing_property` probes that claim empirically.

Every returned object carries explicit witness factors and a
`validate` method that re-checks them from scratch, so downstream code
never has to trust the search that produced them.

Scale notes.  All thresholds that are asymptotic constants in the
underlying theory (q, tau, beta_prime, xi) are explicit parameters
here, sized by the caller for instances of a few dozen vertices per
part; see AbsorbParams.  Witness factor checks run the exact solver on
induced instances of at most 2k+1 vertices per part, which is always
feasible.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

from transtile.core import (
    PartiteGraph,
    VertexId,
    VertexSetFamily,
    bits,
    common_neighborhood,
    is_transversal_copy,
    mask_of,
)
from transtile.generators import rng_for
from transtile.holes import _clique_in_sets
from transtile.tiling import TransversalCopy, exact_transversal_factor_search

__all__ = [
    "Fan",
    "Connector",
    "Absorber",
    "Template",
    "AbsorbingSet",
    "AbsorbParams",
    "ReachVerdict",
    "AbsorbVerdict",
    "find_fan",
    "find_connector",
    "is_reachable",
    "find_absorber",
    "disjoint_absorbers",
    "generate_template",
    "verify_template",
    "build_absorbing_set",
    "verify_absorbing_property",
]

TEMPLATE_X_CAP = 20
CONNECTOR_EXHAUSTIVE_CAP = 6


def _vid(v) -> VertexId:
    p, i = v
    return VertexId(p, i)


def _vids_json(vs: Iterable[VertexId]) -> list[list[int]]:
    return [[p, i] for p, i in vs]


def _check_partition(
    G: PartiteGraph,
    copies: Sequence[TransversalCopy],
    expected: set[VertexId],
    label: str,
) -> None:
    seen: set[VertexId] = set()
    for c in copies:
        ids = c.vertex_ids()
        if not is_transversal_copy(G, ids):
            raise ValueError(f"{label}: witness copy {c.verts} is not transversal")
        for v in ids:
            if v in seen:
                raise ValueError(f"{label}: witness copies overlap at {v}")
            seen.add(v)
    if seen != expected:
        raise ValueError(f"{label}: witness factor does not cover the set exactly")


def _factor_witness(
    G: PartiteGraph, verts: Iterable[VertexId]
) -> Optional[tuple[TransversalCopy, ...]]:
    """Transversal factor of the induced instance, in original labels."""
    masks = [0] * (G.k + 1)
    for p, i in verts:
        masks[p] |= 1 << i
    sizes = {masks[p].bit_count() for p in range(1, G.k + 1)}
    if len(sizes) != 1 or sizes == {0}:
        return None
    H, keep = G.induced(masks)
    tiling, _ = exact_transversal_factor_search(H, cap=None)
    if tiling is None:
        return None
    return tuple(
        TransversalCopy(tuple(keep[p + 1][v] for p, v in enumerate(c.verts)))
        for c in tiling.copies
    )


# -- fans ---------------------------------------------------------------------


@dataclass(frozen=True)
class Fan:
    """Pairwise disjoint (k-1)-sets, each completing `at` to a copy."""

    at: VertexId
    sets: tuple[tuple[VertexId, ...], ...]

    @property
    def size(self) -> int:
        return len(self.sets)

    def validate(self, G: PartiteGraph) -> None:
        used: set[VertexId] = {self.at}
        for s in self.sets:
            if len(s) != G.k - 1:
                raise ValueError(f"fan set {s} has the wrong size")
            for v in s:
                if v in used:
                    raise ValueError(f"fan sets are not disjoint at {v}")
                used.add(v)
            if not is_transversal_copy(G, (self.at, *s)):
                raise ValueError(f"fan set {s} does not complete {self.at}")

    def to_json_dict(self) -> dict:
        return {
            "at": list(self.at),
            "sets": [_vids_json(s) for s in self.sets],
        }


def _fan_sets(
    G: PartiteGraph,
    v: VertexId,
    target_size: int,
    arena: Optional[Sequence[int]] = None,
) -> list[tuple[VertexId, ...]]:
    """Greedy disjoint completion sets for v, drawn from `arena` masks."""
    p0 = v.part
    masks = [0] * (G.k + 1)
    for p in range(1, G.k + 1):
        masks[p] = G.full_mask if arena is None else arena[p]
    masks[p0] = 1 << v.idx
    out: list[tuple[VertexId, ...]] = []
    while len(out) < target_size:
        parts = [p for p in range(1, G.k + 1) if p != p0]
        found = _clique_in_sets(
            G, [p0] + parts, [masks[p0]] + [masks[p] & G.nbr_mask(p0, v.idx, p) for p in parts]
        )
        if found is None:
            break
        picked = tuple(
            VertexId(p, found[t]) for t, p in enumerate([p0] + parts) if p != p0
        )
        out.append(picked)
        for q, i in picked:
            masks[q] &= ~(1 << i)
    return out


def find_fan(G: PartiteGraph, v: VertexId, target_size: int) -> Fan:
    """Greedy fan at v: stops at target_size or exhaustion.

    Greedy extraction is maximal, not maximum; the reported size is a
    lower bound on the best possible fan.
    """
    if not G.pattern.is_complete:
        raise ValueError("fan search needs a complete pattern")
    fan = Fan(at=v, sets=tuple(_fan_sets(G, v, target_size)))
    fan.validate(G)
    return fan


# -- connectors ----------------------------------------------------------------


@dataclass(frozen=True)
class Connector:
    """Set joining two same-part vertices: both sides factor with it."""

    pair: tuple[VertexId, VertexId]
    verts: tuple[VertexId, ...]
    t: int
    witness_u: tuple[TransversalCopy, ...]
    witness_v: tuple[TransversalCopy, ...]

    def validate(self, G: PartiteGraph) -> None:
        u, v = self.pair
        if u.part != v.part or u == v:
            raise ValueError("connector endpoints must be distinct same-part vertices")
        s = set(self.verts)
        if len(s) != len(self.verts):
            raise ValueError("connector set has repeated vertices")
        if u in s or v in s:
            raise ValueError("connector set must avoid its endpoints")
        if len(s) > G.k * self.t - 1:
            raise ValueError(
                f"connector too large: {len(s)} > k*t - 1 = {G.k * self.t - 1}"
            )
        _check_partition(G, self.witness_u, s | {u}, "connector u-side")
        _check_partition(G, self.witness_v, s | {v}, "connector v-side")

    def to_json_dict(self) -> dict:
        return {
            "pair": _vids_json(self.pair),
            "t": self.t,
            "verts": _vids_json(self.verts),
            "witness_u": [c.to_json() for c in self.witness_u],
            "witness_v": [c.to_json() for c in self.witness_v],
        }


def _normalize_forbidden(
    W: Iterable[VertexId | tuple[int, int]], u: VertexId, v: VertexId
) -> set[VertexId]:
    # W never contains the endpoints themselves: drop them if passed
    return {_vid(w) for w in W} - {u, v}


def _connector_t1(
    G: PartiteGraph, u: VertexId, v: VertexId, W: set[VertexId]
) -> Optional[Connector]:
    """Complete search for a (k-1)-set in the joint neighborhood.

    A connector of size k-1 makes {u} union S a single transversal
    copy, which forces every S-vertex adjacent to both u and v; so
    searching the joint neighborhoods is exhaustive and None is a
    proof that no size-(k-1) connector avoids W.
    """
    k = G.k
    wmask = [0] * (k + 1)
    for p, i in W:
        wmask[p] |= 1 << i
    parts = [p for p in range(1, k + 1) if p != u.part]
    masks = [
        common_neighborhood(G, (u, v), p) & ~wmask[p] for p in parts
    ]
    found = _clique_in_sets(G, parts, masks)
    if found is None:
        return None
    s = tuple(VertexId(p, found[t]) for t, p in enumerate(parts))
    wit_u = (TransversalCopy(_verts_tuple(G.k, (u, *s))),)
    wit_v = (TransversalCopy(_verts_tuple(G.k, (v, *s))),)
    conn = Connector(pair=(u, v), verts=s, t=1, witness_u=wit_u, witness_v=wit_v)
    conn.validate(G)
    return conn


def _verts_tuple(k: int, ids: Iterable[VertexId]) -> tuple[int, ...]:
    verts = [-1] * k
    for p, i in ids:
        verts[p - 1] = i
    return tuple(verts)


def _connector_t2_construct(
    G: PartiteGraph,
    u: VertexId,
    v: VertexId,
    W: set[VertexId],
    d_cap: Optional[int],
) -> Optional[Connector]:
    """Two-clique construction: split candidate pools, find a shared apex.

    Per part j, the u-side pool takes the lower-index half of u's free
    neighborhood (capped at d_cap) and the v-side pool takes what is
    left of v's.  An apex w in the endpoint part must complete a clique
    into each pool; the union of the two cliques is the connector.
    """
    k = G.k
    p0 = u.part
    wmask = [0] * (k + 1)
    for p, i in W:
        wmask[p] |= 1 << i
    others = [p for p in range(1, k + 1) if p != p0]
    d1: dict[int, int] = {}
    d2: dict[int, int] = {}
    for j in others:
        pool_u = G.nbr_mask(p0, u.idx, j) & ~wmask[j]
        take = (pool_u.bit_count() + 1) // 2
        if d_cap is not None:
            take = min(take, d_cap)
        m1 = 0
        for idx in bits(pool_u):
            if take == 0:
                break
            m1 |= 1 << idx
            take -= 1
        d2_j = G.nbr_mask(p0, v.idx, j) & ~wmask[j] & ~m1
        if d_cap is not None:
            m2 = 0
            left = d_cap
            for idx in bits(d2_j):
                if left == 0:
                    break
                m2 |= 1 << idx
                left -= 1
            d2_j = m2
        if not m1 or not d2_j:
            return None
        d1[j], d2[j] = m1, d2_j
    apex_pool = G.full_mask & ~wmask[p0] & ~(1 << u.idx) & ~(1 << v.idx)
    for w_idx in bits(apex_pool):
        w = VertexId(p0, w_idx)
        k1 = _clique_in_sets(G, [p0] + others, [1 << w_idx] + [d1[j] for j in others])
        if k1 is None:
            continue
        k1_ids = tuple(VertexId(p, k1[t]) for t, p in enumerate([p0] + others))
        used = {vid for vid in k1_ids if vid != w}
        k2 = _clique_in_sets(
            G,
            [p0] + others,
            [1 << w_idx]
            + [d2[j] & ~mask_of(i for q, i in used if q == j) for j in others],
        )
        if k2 is None:
            continue
        k2_ids = tuple(VertexId(p, k2[t]) for t, p in enumerate([p0] + others))
        s = tuple(sorted(set(k1_ids) | set(k2_ids)))
        # u completes the u-side clique through its own pool; the apex
        # clique into the v-side pool covers the rest, and symmetrically
        wit_u = (
            TransversalCopy(_verts_tuple(k, (u, *(x for x in k1_ids if x != w)))),
            TransversalCopy(_verts_tuple(k, k2_ids)),
        )
        wit_v = (
            TransversalCopy(_verts_tuple(k, (v, *(x for x in k2_ids if x != w)))),
            TransversalCopy(_verts_tuple(k, k1_ids)),
        )
        conn = Connector(pair=(u, v), verts=s, t=2, witness_u=wit_u, witness_v=wit_v)
        conn.validate(G)
        return conn
    return None


def _connector_t2_exhaustive(
    G: PartiteGraph, u: VertexId, v: VertexId, W: set[VertexId]
) -> Optional[Connector]:
    """Every candidate set of the (1, 2, ..., 2) per-part profile.

    A size-(2k-1) connector must place one vertex in the endpoint part
    and two in every other part, so this enumeration plus the complete
    size-(k-1) search decides t=2 connectivity outright at small n.
    """
    k = G.k
    p0 = u.part
    wmask = [0] * (k + 1)
    for p, i in W:
        wmask[p] |= 1 << i
    others = [p for p in range(1, k + 1) if p != p0]
    apex_pool = list(bits(G.full_mask & ~wmask[p0] & ~(1 << u.idx) & ~(1 << v.idx)))
    pools = {j: list(bits(G.full_mask & ~wmask[j])) for j in others}
    for w_idx in apex_pool:
        for pick in product(*(combinations(pools[j], 2) for j in others)):
            s = [VertexId(p0, w_idx)]
            for j, pair_j in zip(others, pick):
                s.extend(VertexId(j, i) for i in pair_j)
            wit_u = _factor_witness(G, [u, *s])
            if wit_u is None:
                continue
            wit_v = _factor_witness(G, [v, *s])
            if wit_v is None:
                continue
            conn = Connector(
                pair=(u, v), verts=tuple(s), t=2, witness_u=wit_u, witness_v=wit_v
            )
            conn.validate(G)
            return conn
    return None


def find_connector(
    G: PartiteGraph,
    u: VertexId | tuple[int, int],
    v: VertexId | tuple[int, int],
    W: Iterable[VertexId | tuple[int, int]] = (),
    t: int = 1,
    d_cap: Optional[int] = None,
    exhaustive_cap: int = CONNECTOR_EXHAUSTIVE_CAP,
) -> Optional[Connector]:
    """Connector for same-part u, v avoiding W, or None.

    t=1 runs the complete joint-neighborhood search: None is a proof.
    t=2 first tries the split-pool apex construction; when that fails
    and n <= exhaustive_cap, falls through to full enumeration (making
    None a proof there too).  At larger n a t=2 None only means the
    construction failed.
    """
    if not G.pattern.is_complete:
        raise ValueError("connector search needs a complete pattern")
    u, v = _vid(u), _vid(v)
    if u.part != v.part or u == v:
        raise ValueError("connector endpoints must be distinct same-part vertices")
    if t not in (1, 2):
        raise ValueError(f"connector parameter t must be 1 or 2, got {t}")
    wset = _normalize_forbidden(W, u, v)
    if t == 1:
        return _connector_t1(G, u, v, wset)
    conn = _connector_t1(G, u, v, wset)
    if conn is not None:
        return conn
    conn = _connector_t2_construct(G, u, v, wset, d_cap)
    if conn is not None:
        return conn
    if G.n <= exhaustive_cap:
        return _connector_t2_exhaustive(G, u, v, wset)
    return None


@dataclass(frozen=True)
class ReachVerdict:
    ok: bool
    witness: Optional[tuple[VertexId, ...]]
    checks: int

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": self.checks,
            "witness": _vids_json(self.witness) if self.witness else None,
        }


def is_reachable(
    G: PartiteGraph,
    u: VertexId | tuple[int, int],
    v: VertexId | tuple[int, int],
    m: int,
    t: int = 1,
    trials: int = 32,
    seed: int = 0,
) -> ReachVerdict:
    """Adversarial probe: does every size-m forbidden set leave a connector?

    Tries the structured sets (each endpoint's neighborhood, truncated
    to m) plus `trials` random ones.  A pass is evidence, not a proof;
    a fail carries the defeating W, which is a proof whenever the
    connector search itself was complete (t=1 always, t=2 at small n).
    """
    u, v = _vid(u), _vid(v)
    if u.part != v.part or u == v:
        raise ValueError("reachability needs distinct same-part vertices")
    everything = [x for x in G.vertices() if x != u and x != v]

    def neighborhood(x: VertexId) -> list[VertexId]:
        out = []
        for q in G.pattern.neighbors(x.part):
            out.extend(VertexId(q, i) for i in bits(G.nbr_mask(x.part, x.idx, q)))
        return sorted(out)[:m]

    candidates: list[tuple[VertexId, ...]] = [
        tuple(neighborhood(u)),
        tuple(neighborhood(v)),
    ]
    rng = rng_for(seed, "reach")
    for _ in range(trials):
        size = min(m, len(everything))
        candidates.append(tuple(sorted(rng.sample(everything, size))))
    checks = 0
    for w in candidates:
        checks += 1
        if find_connector(G, u, v, w, t) is None:
            return ReachVerdict(ok=False, witness=w, checks=checks)
    return ReachVerdict(ok=True, witness=None, checks=checks)


# -- absorbers -----------------------------------------------------------------


@dataclass(frozen=True)
class Absorber:
    """Set A for a transversal k-set: A and A union the set both factor."""

    target: tuple[VertexId, ...]
    verts: tuple[VertexId, ...]
    t: int
    witness_inner: tuple[TransversalCopy, ...]
    witness_full: tuple[TransversalCopy, ...]

    def validate(self, G: PartiteGraph) -> None:
        if sorted(p for p, _ in self.target) != list(range(1, G.k + 1)):
            raise ValueError("absorber target must have one vertex in each part")
        a = set(self.verts)
        s = set(self.target)
        if len(a) != len(self.verts):
            raise ValueError("absorber set has repeated vertices")
        if a & s:
            raise ValueError("absorber set must avoid its target")
        if len(a) > G.k * self.t:
            raise ValueError(f"absorber too large: {len(a)} > k*t = {G.k * self.t}")
        _check_partition(G, self.witness_inner, a, "absorber inner")
        _check_partition(G, self.witness_full, a | s, "absorber full")

    def to_json_dict(self) -> dict:
        return {
            "target": _vids_json(self.target),
            "t": self.t,
            "verts": _vids_json(self.verts),
            "witness_inner": [c.to_json() for c in self.witness_inner],
            "witness_full": [c.to_json() for c in self.witness_full],
        }


def find_absorber(
    G: PartiteGraph,
    S: Sequence[VertexId | tuple[int, int]],
    forbidden: Iterable[VertexId | tuple[int, int]] = (),
    t: Optional[int] = None,
    connector_t: int = 2,
) -> Optional[Absorber]:
    """Absorber for the transversal k-set S, or None.

    One transversal clique T plus, per part, a connector between the
    S-vertex and the T-vertex; the uniform connector parameter keeps
    the union balanced, so the witness instances stay factorable.
    connector_t=2 gives |A| <= 2k^2, connector_t=1 gives |A| <= k^2.
    """
    if not G.pattern.is_complete:
        raise ValueError("absorber search needs a complete pattern")
    k = G.k
    if t is None:
        t = 2 * k
    s_ids = tuple(sorted((_vid(x) for x in S)))
    if sorted(p for p, _ in s_ids) != list(range(1, k + 1)):
        raise ValueError("absorber target must have one vertex in each part")
    blocked = {_vid(x) for x in forbidden} | set(s_ids)
    avoid = [0] * (k + 1)
    for p, i in blocked:
        avoid[p] |= 1 << i
    clique = _clique_in_sets(
        G,
        list(range(1, k + 1)),
        [G.full_mask & ~avoid[p] for p in range(1, k + 1)],
    )
    if clique is None:
        return None
    t_ids = tuple(VertexId(p, clique[p - 1]) for p in range(1, k + 1))
    acc: set[VertexId] = set(t_ids)
    for p in range(1, k + 1):
        conn = find_connector(
            G,
            s_ids[p - 1],
            t_ids[p - 1],
            blocked | acc,
            t=connector_t,
        )
        if conn is None:
            return None
        acc.update(conn.verts)
    if len(acc) > k * t:
        return None
    wit_inner = _factor_witness(G, acc)
    if wit_inner is None:
        return None
    wit_full = _factor_witness(G, acc | set(s_ids))
    if wit_full is None:
        return None
    absorber = Absorber(
        target=s_ids,
        verts=tuple(sorted(acc)),
        t=t,
        witness_inner=wit_inner,
        witness_full=wit_full,
    )
    absorber.validate(G)
    return absorber


def disjoint_absorbers(
    G: PartiteGraph,
    S: Sequence[VertexId | tuple[int, int]],
    count_target: int,
    forbidden: Iterable[VertexId | tuple[int, int]] = (),
    connector_t: int = 2,
) -> list[Absorber]:
    """Greedy maximal family of pairwise-disjoint absorbers for S."""
    used = {_vid(x) for x in forbidden}
    out: list[Absorber] = []
    while len(out) < count_target:
        a = find_absorber(G, S, used, connector_t=connector_t)
        if a is None:
            break
        out.append(a)
        used.update(a.verts)
    return out


# -- robust templates -----------------------------------------------------------


@dataclass(frozen=True)
class Template:
    """Bipartite gadget (X u Y, Z): every m-subset of X still matches Z.

    Left indices 0..m+beta_m-1 are X, the next 2m are Y; right indices
    run over 3m.  Robustness means: for each X' of size m, the graph
    induced on (X' u Y, Z) has a perfect matching.
    """

    m: int
    beta_m: int
    edges: frozenset[tuple[int, int]]
    max_degree: int = 40

    @property
    def x_size(self) -> int:
        return self.m + self.beta_m

    @property
    def y_size(self) -> int:
        return 2 * self.m

    @property
    def z_size(self) -> int:
        return 3 * self.m

    @property
    def left_size(self) -> int:
        return self.x_size + self.y_size

    def degree_table(self) -> tuple[list[int], list[int]]:
        left = [0] * self.left_size
        right = [0] * self.z_size
        for l, z in self.edges:
            left[l] += 1
            right[z] += 1
        return left, right

    def validate(self) -> None:
        if self.m < 1 or self.beta_m < 0:
            raise ValueError("template needs m >= 1 and beta_m >= 0")
        for l, z in self.edges:
            if not (0 <= l < self.left_size and 0 <= z < self.z_size):
                raise ValueError(f"template edge ({l},{z}) out of range")
        left, right = self.degree_table()
        worst = max(left + right, default=0)
        if worst > self.max_degree:
            raise ValueError(
                f"template degree {worst} exceeds the cap {self.max_degree}"
            )

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "beta_m": self.beta_m,
            "max_degree": self.max_degree,
            "edges": sorted([l, z] for l, z in self.edges),
        }

    @staticmethod
    def from_json_dict(data: dict) -> "Template":
        return Template(
            m=data["m"],
            beta_m=data["beta_m"],
            max_degree=data["max_degree"],
            edges=frozenset((l, z) for l, z in data["edges"]),
        )


def _max_matching(adj: Sequence[Sequence[int]], z_size: int) -> int:
    """Augmenting-path maximum matching from the left side."""
    match_z = [-1] * z_size

    def augment(l: int, seen: list[bool]) -> bool:
        for z in adj[l]:
            if not seen[z]:
                seen[z] = True
                if match_z[z] < 0 or augment(match_z[z], seen):
                    match_z[z] = l
                    return True
        return False

    total = 0
    for l in range(len(adj)):
        if augment(l, [False] * z_size):
            total += 1
    return total


def verify_template(T: Template) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Exhaustive robustness check; returns (ok, violating X' or None)."""
    T.validate()
    if T.x_size > TEMPLATE_X_CAP:
        raise ValueError(
            f"template verification refused: |X| = {T.x_size} exceeds cap {TEMPLATE_X_CAP}"
        )
    nbrs: list[list[int]] = [[] for _ in range(T.left_size)]
    for l, z in T.edges:
        nbrs[l].append(z)
    y_rows = [nbrs[T.x_size + i] for i in range(T.y_size)]
    for chosen in combinations(range(T.x_size), T.m):
        rows = [nbrs[l] for l in chosen] + y_rows
        if _max_matching(rows, T.z_size) != T.z_size:
            return False, chosen
    return True, None


def generate_template(
    m: int,
    beta_m: int,
    max_tries: int = 1000,
    seed: int = 0,
    max_degree: int = 40,
) -> Optional[Template]:
    """Randomized sparse-first template search.

    Attempt i samples each right vertex's neighborhood at degree
    1 + i // 25 (so the sparsest candidates come first), patches any
    uncovered left vertex, and keeps the first sample that verifies.
    """
    if m < 1 or beta_m < 0:
        raise ValueError("template needs m >= 1 and beta_m >= 0")
    if m + beta_m > TEMPLATE_X_CAP:
        raise ValueError(
            f"template verification refused: |X| = {m + beta_m} exceeds cap {TEMPLATE_X_CAP}"
        )
    left_size = m + beta_m + 2 * m
    z_size = 3 * m
    for attempt in range(max_tries):
        rng = rng_for(seed, "template", attempt)
        d = min(1 + attempt // 25, left_size, max_degree)
        edges: set[tuple[int, int]] = set()
        right_deg = [0] * z_size
        left_deg = [0] * left_size
        for z in range(z_size):
            for l in rng.sample(range(left_size), d):
                if (l, z) not in edges:
                    edges.add((l, z))
                    right_deg[z] += 1
                    left_deg[l] += 1
        ok = True
        for l in range(left_size):
            if left_deg[l]:
                continue
            start = rng.randrange(z_size)
            for off in range(z_size):
                z = (start + off) % z_size
                if right_deg[z] < max_degree:
                    edges.add((l, z))
                    right_deg[z] += 1
                    left_deg[l] += 1
                    break
            else:
                ok = False
                break
        if not ok or max(left_deg) > max_degree:
            continue
        cand = Template(
            m=m, beta_m=beta_m, edges=frozenset(edges), max_degree=max_degree
        )
        if verify_template(cand)[0]:
            return cand
    return None


# -- absorbing-set assembly -------------------------------------------------------


@dataclass(frozen=True)
class AbsorbParams:
    """Desk-scale knobs for the absorbing-set pipeline.

    q sizes the X samples (|X_i| = round(q*n)); tau budgets |R|;
    beta_prime sets the per-vertex fan requirement inside the X sample
    (ceil(2*k*beta_prime*n)); m and beta_m size the per-part template.
    connector_t picks the connector flavor used inside absorbers: 1
    keeps absorbers at k vertices per part, 2 doubles that.
    """

    q: float
    tau: float
    beta_prime: float
    m: int
    seed: int
    beta_m: int = 1
    connector_t: int = 1
    template_tries: int = 1000
    sample_tries: int = 64


@dataclass(frozen=True)
class AbsorbingSet:
    """Balanced set R meant to swallow any small balanced leftover."""

    R: VertexSetFamily
    xi: float
    provenance: dict = field(compare=False)

    def size_per_part(self) -> int:
        return len(self.R.subset(1)) if 1 in self.R.parts else 0

    def total_size(self) -> int:
        return sum(len(self.R.subset(p)) for p in self.R.parts)

    def validate(self) -> None:
        sizes = {len(self.R.subset(p)) for p in self.R.parts}
        if len(sizes) > 1:
            raise ValueError("absorbing set must be balanced")

    def to_json_dict(self) -> dict:
        return {
            "xi": self.xi,
            "r": {str(p): sorted(self.R.subset(p)) for p in sorted(self.R.parts)},
            "provenance": self.provenance,
        }


def _fan_count_at_least(
    G: PartiteGraph, v: VertexId, arena: Sequence[int], need: int
) -> bool:
    return len(_fan_sets(G, v, need, arena)) >= need


def build_absorbing_set(G: PartiteGraph, params: AbsorbParams) -> AbsorbingSet:
    """Assemble an absorbing set in five stages.

    sample-x: per-part random X_i of size round(q*n), re-sampled until
    every vertex of G keeps a fan of the required size whose sets live
    inside the union of the X_i.
    select-yz: lowest-index Y_i (2m) and Z_{i,j} (3m each) outside X_i.
    template: a verified robust template per part.
    absorbers: per template edge, a fresh absorber for the k-set made
    of the edge's left vertex and the index-aligned transversal
    (k-1)-set its right vertex names; absorbers stay disjoint from each
    other and from X u Y u Z.
    assemble: R = X u Y u Z u all absorbers, checked balanced and
    within the tau*n budget.

    Any stage that exhausts its search raises with the stage name and
    the deficit, so callers can rescale.
    """
    if not G.pattern.is_complete:
        raise ValueError("absorbing-set assembly needs a complete pattern")
    k, n = G.k, G.n
    m, beta_m = params.m, params.beta_m
    if m < 1 or beta_m < 0:
        raise ValueError("stage sample-x: template scale needs m >= 1, beta_m >= 0")
    if params.connector_t not in (1, 2):
        raise ValueError("stage absorbers: connector_t must be 1 or 2")
    qn = round(params.q * n)
    x_side = m + beta_m
    if qn < x_side:
        raise ValueError(
            f"stage sample-x: q*n = {qn} cannot host the template left side "
            f"(m + beta_m = {x_side})"
        )
    fan_min = math.ceil(2 * k * params.beta_prime * n)
    if fan_min > qn:
        raise ValueError(
            f"stage sample-x: fan requirement {fan_min} exceeds the X part size {qn}"
        )
    yz_need = 2 * m + 3 * m * (k - 1)
    if n - qn < yz_need:
        raise ValueError(
            f"stage select-yz: parts need {yz_need} vertices beyond X "
            f"but only {n - qn} remain"
        )

    # stage sample-x
    xs: Optional[list[list[int]]] = None
    attempts = 0
    for attempt in range(params.sample_tries):
        attempts = attempt + 1
        cand = [
            sorted(rng_for(params.seed, "x", attempt, i).sample(range(n), qn))
            for i in range(1, k + 1)
        ]
        arena = [0] + [mask_of(cand[i - 1]) for i in range(1, k + 1)]
        if fan_min == 0 or all(
            _fan_count_at_least(G, v, arena, fan_min) for v in G.vertices()
        ):
            xs = cand
            break
    if xs is None:
        raise ValueError(
            f"stage sample-x: no sample kept fans of size {fan_min} "
            f"after {params.sample_tries} tries"
        )

    # stage select-yz
    ys: list[list[int]] = []
    zs: dict[tuple[int, int], list[int]] = {}
    for i in range(1, k + 1):
        pool = [v for v in range(n) if v not in set(xs[i - 1])]
        ys.append(pool[: 2 * m])
        at = 2 * m
        for j in range(1, k + 1):
            if j == i:
                continue
            zs[(i, j)] = pool[at : at + 3 * m]
            at += 3 * m

    # stage template
    templates: list[Template] = []
    for i in range(1, k + 1):
        tpl = generate_template(
            m,
            beta_m,
            max_tries=params.template_tries,
            seed=params.seed * (k + 1) + i,
        )
        if tpl is None:
            raise ValueError(
                f"stage template: no verified template for part {i} "
                f"within {params.template_tries} tries"
            )
        templates.append(tpl)

    # stage absorbers
    fixed: set[VertexId] = set()
    for i in range(1, k + 1):
        fixed.update(VertexId(i, v) for v in xs[i - 1])
        fixed.update(VertexId(i, v) for v in ys[i - 1])
    for (i, j), block in zs.items():
        fixed.update(VertexId(i, v) for v in block)
    absorbers: list[tuple[tuple[int, int, int], Absorber]] = []
    reserved: set[VertexId] = set(fixed)
    total_edges = sum(len(t.edges) for t in templates)
    for j in range(1, k + 1):
        tpl = templates[j - 1]
        for l, z in sorted(tpl.edges):
            if l < tpl.x_size:
                left_vertex = VertexId(j, xs[j - 1][l])
            else:
                left_vertex = VertexId(j, ys[j - 1][l - tpl.x_size])
            partner = [
                VertexId(i, zs[(i, j)][z]) for i in range(1, k + 1) if i != j
            ]
            target = sorted([left_vertex, *partner])
            a = find_absorber(
                G, target, reserved - set(target), connector_t=params.connector_t
            )
            if a is None:
                raise ValueError(
                    f"stage absorbers: no disjoint absorber for template edge "
                    f"({j},{l},{z}); {len(absorbers)} of {total_edges} placed"
                )
            absorbers.append(((j, l, z), a))
            reserved.update(a.verts)

    # stage assemble
    r_sets: dict[int, set[int]] = {p: set() for p in range(1, k + 1)}
    for p, idx in reserved:
        r_sets[p].add(idx)
    sizes = {len(s) for s in r_sets.values()}
    if len(sizes) != 1:
        raise ValueError(f"stage assemble: R unbalanced across parts: {sorted(sizes)}")
    total = sum(len(s) for s in r_sets.values())
    if total > params.tau * n:
        raise ValueError(
            f"stage assemble: |R| = {total} exceeds tau*n = {params.tau * n:g}"
        )
    xi = k / n
    provenance = {
        "params": {
            "q": params.q,
            "tau": params.tau,
            "beta_prime": params.beta_prime,
            "m": m,
            "beta_m": beta_m,
            "seed": params.seed,
            "connector_t": params.connector_t,
        },
        "fan_min": fan_min,
        "sample_attempts": attempts,
        "x": [sorted(xs[i]) for i in range(k)],
        "y": [sorted(ys[i]) for i in range(k)],
        "z": {f"{i},{j}": sorted(v) for (i, j), v in sorted(zs.items())},
        "templates": [t.to_json_dict() for t in templates],
        "absorbers": [
            {
                "edge": list(edge),
                "target": _vids_json(a.target),
                "set": _vids_json(a.verts),
            }
            for edge, a in absorbers
        ],
    }
    out = AbsorbingSet(
        R=VertexSetFamily.of({p: sorted(r_sets[p]) for p in range(1, k + 1)}),
        xi=xi,
        provenance=provenance,
    )
    out.validate()
    return out


@dataclass(frozen=True)
class AbsorbVerdict:
    ok: bool
    failing: Optional[VertexSetFamily]
    checks: int

    def to_json_dict(self) -> dict:
        failing = None
        if self.failing is not None:
            failing = {str(p): sorted(self.failing.subset(p)) for p in self.failing.parts}
        return {"ok": self.ok, "checks": self.checks, "failing": failing}


def verify_absorbing_property(
    G: PartiteGraph,
    R: AbsorbingSet,
    xi: float,
    trials: int = 32,
    seed: int = 0,
    exhaustive_limit: int = 256,
) -> AbsorbVerdict:
    """Probe: does G[R u U] factor for balanced U outside R, |U| <= xi*n?

    Runs exhaustive enumeration when the one-per-part candidate space
    is small enough; otherwise samples `trials` random balanced U.  A
    fail carries the defeating U and is always a proof (the factor
    solver's absence answers are complete).
    """
    k, n = G.k, G.n
    if xi * n < k:
        raise ValueError("absorbing verification needs xi*n >= k")
    r_masks = [0] * (k + 1)
    for p in range(1, k + 1):
        if p in R.R.parts:
            r_masks[p] = mask_of(R.R.subset(p))
    outside = [()] + [
        tuple(v for v in range(n) if not (r_masks[p] >> v & 1)) for p in range(1, k + 1)
    ]
    s_max = min(int(xi * n // k), min(len(o) for o in outside[1:]))
    if s_max < 1:
        return AbsorbVerdict(ok=True, failing=None, checks=0)

    def factors(u_sets: Sequence[Sequence[int]]) -> bool:
        masks = [0] * (k + 1)
        for p in range(1, k + 1):
            masks[p] = r_masks[p] | mask_of(u_sets[p - 1])
        H, _ = G.induced(masks)
        tiling, _stats = exact_transversal_factor_search(H, cap=None)
        return tiling is not None

    space = 1
    for o in outside[1:]:
        space *= len(o)
    checks = 0
    if s_max == 1 and space <= exhaustive_limit:
        for pick in product(*outside[1:]):
            checks += 1
            u_sets = [[v] for v in pick]
            if not factors(u_sets):
                fam = VertexSetFamily.of(
                    {p: u_sets[p - 1] for p in range(1, k + 1)}
                )
                return AbsorbVerdict(ok=False, failing=fam, checks=checks)
        return AbsorbVerdict(ok=True, failing=None, checks=checks)
    for trial in range(trials):
        rng = rng_for(seed, "absorb-verify", trial)
        s = rng.randint(1, s_max)
        u_sets = [sorted(rng.sample(outside[p], s)) for p in range(1, k + 1)]
        checks += 1
        if not factors(u_sets):
            fam = VertexSetFamily.of({p: u_sets[p - 1] for p in range(1, k + 1)})
            return AbsorbVerdict(ok=False, failing=fam, checks=checks)
    return AbsorbVerdict(ok=True, failing=None, checks=checks)
