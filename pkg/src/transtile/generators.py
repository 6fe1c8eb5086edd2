"""Instance generators: structured families for the experiment runner.

Every generator is deterministic in its seed.  Randomness is drawn from
named sub-streams derived by hashing (seed, label...) with SHA-256, so
each part, pass, or process step owns an independent stream and adding
a new consumer never perturbs existing ones.  Two calls with an
identical `GenSpec` produce byte-identical serializations.

Families
--------
complete            complete n-blow-up of the pattern
random_subgraph     keep each allowed edge independently with probability p
hole_suppressed     random edge process run until no r-partite hole of
                    size s is found (certified exactly at small n)
space_barrier       complete blow-up of a cycle pattern, thinned so that a
                    small transversal set U meets every transversal cycle;
                    the instance keeps high partite degree but has no
                    transversal cycle factor
random_split        balanced uniform k-split of an arbitrary host edge list
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from transtile.core import Pattern, PartiteGraph, VertexSetFamily, bits, mask_of
from transtile.holes import EXACT_CAP_DEFAULT, certify_no_hole

__all__ = [
    "GenSpec",
    "GenResult",
    "subseed",
    "rng_for",
    "complete_blowup",
    "random_spanning_subgraph",
    "hole_suppressed_process",
    "space_barrier",
    "random_k_split",
    "sample_balanced_partition",
    "read_edge_list",
]


def subseed(seed: int, *labels) -> int:
    """64-bit sub-stream seed derived from (seed, labels) via SHA-256."""
    data = ":".join([str(seed), *map(str, labels)]).encode()
    return int.from_bytes(hashlib.sha256(data).digest()[:8], "big")


def rng_for(seed: int, *labels) -> random.Random:
    return random.Random(subseed(seed, *labels))


def complete_blowup(pattern: Pattern, n: int) -> PartiteGraph:
    return PartiteGraph.complete(pattern, n)


def random_spanning_subgraph(G: PartiteGraph, p: float, seed: int) -> PartiteGraph:
    """Keep each edge of G independently with probability p.

    One RNG sub-stream per pattern edge, consumed in canonical edge
    order, so results are reproducible part pair by part pair.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability p={p} outside [0, 1]")
    kept = []
    for i, j in sorted(G.pattern.edges):
        rng = rng_for(seed, "pair", i, j)
        rows = G._adj[(i, j)]
        for a in range(G.n):
            for b in bits(rows[a]):
                if rng.random() < p:
                    kept.append((i, a, j, b))
    return PartiteGraph.from_edges(G.pattern, G.n, kept)


def hole_suppressed_process(
    pattern: Pattern,
    n: int,
    r: int,
    s: int,
    seed: int,
    budget: Optional[int] = None,
    trials: int = 64,
    exact_cap: int = EXACT_CAP_DEFAULT,
    check_every: int = 1,
) -> tuple[PartiteGraph, dict]:
    """Add uniformly random absent cross edges until the hole certifier
    reports no r-partite hole of size s, or the edge budget runs out.

    Returns (graph, report) with report keys `edges_added`, `certified`,
    `regime`, and `checks`.  Certification is exact for n <= exact_cap
    and randomized above it, as reported in `regime`.
    """
    if not 1 <= s <= n:
        raise ValueError(f"hole size s={s} out of range [1..{n}]")
    order = [
        (i, a, j, b)
        for i, j in sorted(pattern.edges)
        for a in range(n)
        for b in range(n)
    ]
    rng_for(seed, "order").shuffle(order)
    if budget is None:
        budget = len(order)
    G = PartiteGraph.from_edges(pattern, n, [])
    added = 0
    checks = 0

    def certify(g):
        nonlocal checks
        checks += 1
        ok, regime, _ = certify_no_hole(
            g, r, s, trials=trials, seed=subseed(seed, "cert", checks), exact_cap=exact_cap
        )
        return ok, regime

    certified, regime = certify(G)
    for edge in order:
        if certified or added >= budget:
            break
        G = G.add_edges([edge])
        added += 1
        if added % check_every == 0 or added == budget:
            certified, regime = certify(G)
    if not certified and added % check_every != 0:
        certified, regime = certify(G)
    return G, {
        "edges_added": added,
        "certified": certified,
        "regime": regime,
        "checks": checks,
    }


def _cycle_through_edge(
    adj: dict, k: int, outside: Sequence[int], i: int, a: int, j: int, b: int
) -> bool:
    """Would edge (i,a)-(j,b) close a transversal cycle avoiding U?

    i and j are consecutive cycle parts (j follows i).  Sweeps the layer
    sets from b forward around the cycle back to part i and tests
    whether a is reachable; layered reachability is exact, so this
    decides existence.
    """
    cur_part = j
    layer = 1 << b
    for _ in range(k - 1):
        nxt_part = cur_part % k + 1
        nxt = 0
        rows = adj[(cur_part, nxt_part)]
        for v in bits(layer):
            nxt |= rows[v]
        layer = nxt & outside[nxt_part]
        if not layer:
            return False
        cur_part = nxt_part
    return bool(layer >> a & 1)


def space_barrier(
    pattern: Pattern,
    n: int,
    seed: int = 0,
    hole_target_s: Optional[int] = None,
    budget: Optional[int] = None,
    trials: int = 64,
    check_every: Optional[int] = None,
) -> tuple[PartiteGraph, VertexSetFamily, dict]:
    """Cycle-pattern instance with high partite degree but no transversal
    cycle factor.

    Takes the complete blow-up of C_k, fixes U_i = the first n/k - 1
    vertices of each part, deletes every edge with both ends outside U,
    then runs a constrained random process that re-adds outside edges
    one by one, rejecting any edge that would close a transversal cycle
    avoiding U.  Rejection is permanent (more edges only create more
    cycles), so a single shuffled pass reaches a maximal admissible set.

    Every transversal cycle of the result meets U, and |U| = k(n/k - 1)
    is too small to cover a factor, so no transversal cycle factor
    exists.  The partite minimum degree stays >= n/k - 1 because U is
    completely joined to everything.

    If `hole_target_s` is given, the 2-partite hole certifier runs every
    `check_every` accepted edges and the process stops early once no
    hole of that size is found.
    """
    if not pattern.is_cycle or pattern.k < 4:
        raise ValueError("space barrier needs a cycle pattern with k >= 4")
    k = pattern.k
    if n % k != 0:
        raise ValueError(f"part size not divisible: n={n} must be a multiple of k={k}")
    u_size = n // k - 1
    u_mask = (1 << u_size) - 1
    outside = [0] + [((1 << n) - 1) & ~u_mask for _ in range(k)]

    adj: dict[tuple[int, int], list[int]] = {}
    full = (1 << n) - 1
    for i, j in pattern.edges:
        # keep exactly the edges meeting U on either side
        adj[(i, j)] = [full if a < u_size else u_mask for a in range(n)]
        adj[(j, i)] = [full if b < u_size else u_mask for b in range(n)]

    candidates = [
        (i, a, j, b)
        for i, j in sorted(pattern.edges)
        for a in bits(outside[i])
        for b in bits(outside[j])
    ]
    rng_for(seed, "order").shuffle(candidates)
    if budget is None:
        budget = len(candidates)
    if check_every is None:
        check_every = max(1, n)

    def freeze() -> PartiteGraph:
        return PartiteGraph(pattern, n, {key: tuple(v) for key, v in adj.items()})

    added = 0
    tried = 0
    certified = None
    regime = None
    checks = 0
    for i, a, j, b in candidates:
        if tried >= budget or certified:
            break
        tried += 1
        # orient so that pj follows pi on the cycle; sorted cycle edges
        # are (i, i+1) except the wrap edge (1, k)
        if i == 1 and j == k:
            pi, pa, pj, pb = k, b, 1, a
        else:
            pi, pa, pj, pb = i, a, j, b
        adj[(pi, pj)][pa] |= 1 << pb
        adj[(pj, pi)][pb] |= 1 << pa
        if _cycle_through_edge(adj, k, outside, pi, pa, pj, pb):
            adj[(pi, pj)][pa] &= ~(1 << pb)
            adj[(pj, pi)][pb] &= ~(1 << pa)
            continue
        added += 1
        if hole_target_s is not None and added % check_every == 0:
            checks += 1
            certified, regime, _ = certify_no_hole(
                freeze(), 2, hole_target_s, trials=trials, seed=subseed(seed, "cert", checks)
            )
    if hole_target_s is not None and certified is None:
        checks += 1
        certified, regime, _ = certify_no_hole(
            freeze(), 2, hole_target_s, trials=trials, seed=subseed(seed, "cert", checks)
        )
    U = VertexSetFamily([(p, range(u_size)) for p in range(1, k + 1)])
    report = {
        "u_size": u_size,
        "edges_added": added,
        "candidates_tried": tried,
        "certified": certified,
        "regime": regime,
        "checks": checks,
    }
    return freeze(), U, report


def sample_balanced_partition(m: int, k: int, seed: int) -> list[list[int]]:
    """Uniform partition of [0..m-1] into k blocks of equal size.

    Returned as `blocks[p]` for parts p = 1..k (slot 0 empty); block
    order within a part records the part-relative index of each host
    vertex.  Exposed so callers can re-derive the split a seed produced.
    """
    if m % k != 0:
        raise ValueError(f"host order not divisible: m={m} must be a multiple of k={k}")
    perm = list(range(m))
    rng_for(seed, "split").shuffle(perm)
    size = m // k
    return [[]] + [perm[(p - 1) * size : p * size] for p in range(1, k + 1)]


def random_k_split(
    host_edges: Iterable[tuple[int, int]],
    pattern: Pattern,
    seed: int,
    m: Optional[int] = None,
) -> PartiteGraph:
    """Balanced uniform k-split of a host graph.

    Host vertices 0..m-1 are shuffled into k equal parts; host edges
    whose ends land in pattern-adjacent parts survive, all others
    (including intra-part edges) are dropped.
    """
    edges = []
    top = -1
    for u, v in host_edges:
        if u == v:
            raise ValueError(f"host edge ({u},{v}) is a loop")
        edges.append((u, v) if u < v else (v, u))
        top = max(top, u, v)
    edges = sorted(set(edges))
    if m is None:
        m = top + 1
    if top >= m:
        raise ValueError(f"host vertex {top} out of range for m={m}")
    blocks = sample_balanced_partition(m, pattern.k, seed)
    where = {}
    for p in range(1, pattern.k + 1):
        for idx, host_v in enumerate(blocks[p]):
            where[host_v] = (p, idx)
    n = m // pattern.k
    kept = []
    for u, v in edges:
        (pu, iu), (pv, iv) = where[u], where[v]
        if pu != pv and pattern.adjacent(pu, pv):
            kept.append((pu, iu, pv, iv))
    return PartiteGraph.from_edges(pattern, n, kept)


def read_edge_list(path) -> list[tuple[int, int]]:
    """Host edge file: one `u v` pair per line, 0-based; blank lines and
    `#` comments ignored."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected `u v`, got {line!r}")
            out.append((int(fields[0]), int(fields[1])))
    return out


# -- declarative specs --------------------------------------------------------


@dataclass(frozen=True)
class GenResult:
    graph: PartiteGraph
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GenSpec:
    """Declarative instance description used by experiment configs."""

    family: str
    pattern: Pattern
    n: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    FAMILIES = ("complete", "random_subgraph", "hole_suppressed", "space_barrier", "random_split")

    def __post_init__(self):
        if self.family not in self.FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; pick from {self.FAMILIES}")
        if self.family == "random_subgraph" and "p" not in self.params:
            raise ValueError("random_subgraph needs params.p")
        if self.family == "hole_suppressed":
            for key in ("r", "s"):
                if key not in self.params:
                    raise ValueError(f"hole_suppressed needs params.{key}")
        if self.family == "random_split" and not (
            "host_file" in self.params or "host_edges" in self.params
        ):
            raise ValueError("random_split needs params.host_file or params.host_edges")

    def build(self) -> GenResult:
        p = dict(self.params)
        if self.family == "complete":
            return GenResult(complete_blowup(self.pattern, self.n))
        if self.family == "random_subgraph":
            base = complete_blowup(self.pattern, self.n)
            return GenResult(random_spanning_subgraph(base, p["p"], self.seed))
        if self.family == "hole_suppressed":
            G, report = hole_suppressed_process(
                self.pattern,
                self.n,
                p["r"],
                p["s"],
                self.seed,
                budget=p.get("budget"),
                trials=p.get("trials", 64),
                check_every=p.get("check_every", 1),
            )
            return GenResult(G, {"report": report})
        if self.family == "space_barrier":
            G, U, report = space_barrier(
                self.pattern,
                self.n,
                seed=self.seed,
                hole_target_s=p.get("hole_target_s"),
                budget=p.get("budget"),
                trials=p.get("trials", 64),
            )
            extras = {
                "U": [[part, sorted(U.subset(part))] for part in U.parts],
                "report": report,
            }
            return GenResult(G, extras)
        if self.family == "random_split":
            edges = (
                read_edge_list(p["host_file"])
                if "host_file" in p
                else [tuple(e) for e in p["host_edges"]]
            )
            G = random_k_split(edges, self.pattern, self.seed, m=p.get("m"))
            return GenResult(G)
        raise AssertionError(self.family)

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "pattern": self.pattern.to_json_dict(),
            "n": self.n,
            "seed": self.seed,
            "params": dict(self.params),
        }

    @staticmethod
    def from_json_dict(data: dict) -> "GenSpec":
        return GenSpec(
            family=data["family"],
            pattern=Pattern.from_json_dict(data["pattern"]),
            n=data["n"],
            seed=data.get("seed", 0),
            params=dict(data.get("params", {})),
        )
