"""Tiling engine tests: copy search, greedy tilings, exact factors, mixed tilings.

Oracles here are deliberately dumb: full cartesian products over vertex
tuples, permutation enumeration for factors. The engine must agree.
"""

import itertools

import pytest

from transtile.core import Pattern, PartiteGraph, VertexId, VertexSetFamily
from transtile.generators import complete_blowup, space_barrier
from transtile.holes import HoleCertificate, alpha_star_exact, verify_hole
from transtile.tiling import (
    MixedCopy,
    MixedTiling,
    Tiling,
    TransversalCopy,
    check_appendix_invariants,
    exact_transversal_factor,
    exact_transversal_factor_search,
    find_transversal_clique,
    find_transversal_cycle,
    find_transversal_path,
    greedy_clique_tiling,
    greedy_cycle_tiling,
    iter_transversal_copies,
    maximal_mixed_tiling,
)

from conftest import random_instance


K3 = Pattern.complete(3)
C4 = Pattern.cycle(4)
C5 = Pattern.cycle(5)


def full_family(G):
    return VertexSetFamily.of({p: range(G.n) for p in range(1, G.k + 1)})


def naive_copy_set(G):
    out = set()
    for tup in itertools.product(range(G.n), repeat=G.k):
        if all(
            G.has_edge((i, tup[i - 1]), (j, tup[j - 1]))
            for i, j in G.pattern.edge_list()
        ):
            out.add(tup)
    return out


def naive_factor_exists(G):
    """Try every way to match up the parts via permutations."""
    edges = G.pattern.edge_list()
    for assign in itertools.product(
        itertools.permutations(range(G.n)), repeat=G.k - 1
    ):
        if all(
            all(
                G.has_edge((i, ((t,) + tuple(a[t] for a in assign))[i - 1]),
                           (j, ((t,) + tuple(a[t] for a in assign))[j - 1]))
                for i, j in edges
            )
            for t in range(G.n)
        ):
            return True
    return False


def naive_mixed_addable(G, L):
    """Any P3-path or 2-matching placeable inside leftover sets L[1..k]?"""
    k = G.k
    cyc = lambda p: (p - 1) % k + 1
    if any(not L[p] for p in range(1, k + 1)):
        return False
    for a in range(1, k + 1):
        m, r = cyc(a + 1), cyc(a + 2)
        for u in L[m]:
            if any(G.has_edge((m, u), (a, x)) for x in L[a]) and any(
                G.has_edge((m, u), (r, y)) for y in L[r]
            ):
                return True
    for a in range(1, k + 1):
        for b in range(1, k + 1):
            if len({a, cyc(a + 1), b, cyc(b + 1)}) < 4:
                continue
            e1 = any(
                G.has_edge((a, x), (cyc(a + 1), y))
                for x in L[a]
                for y in L[cyc(a + 1)]
            )
            e2 = any(
                G.has_edge((b, x), (cyc(b + 1), y))
                for x in L[b]
                for y in L[cyc(b + 1)]
            )
            if e1 and e2:
                return True
    return False


# -- generic copy enumeration -------------------------------------------------


@pytest.mark.parametrize("pattern", [Pattern.complete(2), K3, Pattern.complete(4), C4, C5])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_copy_enumeration_matches_product_scan(pattern, seed):
    G = random_instance(pattern, 3, 0.55, seed)
    masks = [0] + [G.full_mask] * G.k
    got = set(iter_transversal_copies(G, masks))
    assert got == naive_copy_set(G)


def test_copy_enumeration_respects_masks():
    G = complete_blowup(K3, 3)
    masks = [0, 0b010, 0b101, 0b111]
    got = set(iter_transversal_copies(G, masks))
    assert got == {(1, 0, 0), (1, 0, 1), (1, 0, 2), (1, 2, 0), (1, 2, 1), (1, 2, 2)}


# -- transversal cliques -------------------------------------------------------


def test_find_clique_complete_lowest_first():
    G = complete_blowup(K3, 2)
    found = find_transversal_clique(G, full_family(G))
    assert found == TransversalCopy((0, 0, 0))


def test_find_clique_inside_hole_is_none():
    # empty graph: the full parts form a hole of arity k
    G = PartiteGraph.from_edges(K3, 3, [])
    fam = full_family(G)
    cert = HoleCertificate(3, (1, 2, 3), (frozenset(range(3)),) * 3)
    assert verify_hole(G, cert)
    assert find_transversal_clique(G, fam) is None


@pytest.mark.parametrize("seed", range(6))
def test_find_clique_agrees_with_tuple_scan(seed):
    G = random_instance(K3, 5, 0.4, seed)
    found = find_transversal_clique(G, full_family(G))
    naive = naive_copy_set(G)
    if found is None:
        assert not naive
    else:
        assert found.verts in naive


def test_find_clique_errors():
    G = complete_blowup(K3, 2)
    with pytest.raises(ValueError, match="constraint missing part 3"):
        find_transversal_clique(G, VertexSetFamily.of({1: [0], 2: [0]}))
    with pytest.raises(ValueError, match="out of range"):
        find_transversal_clique(G, VertexSetFamily.of({1: [0], 2: [0], 3: [5]}))
    H = complete_blowup(C4, 2)
    with pytest.raises(ValueError, match="complete pattern"):
        find_transversal_clique(H, full_family(H))


# -- greedy clique tiling -------------------------------------------------------


def test_greedy_clique_tiling_complete():
    G = complete_blowup(K3, 4)
    t = greedy_clique_tiling(G)
    assert t.leftover_per_part == 0 and len(t.copies) == 4
    Tiling.build(G, t.copies)  # re-validate disjointness and edges


def test_greedy_clique_tiling_empty_graph():
    G = PartiteGraph.from_edges(K3, 3, [])
    t = greedy_clique_tiling(G)
    assert len(t.copies) == 0 and t.leftover_per_part == 3


@pytest.mark.parametrize("seed", range(8))
def test_greedy_leftover_at_most_hole_number(seed):
    G = random_instance(K3, 5, 0.45, seed)
    t = greedy_clique_tiling(G)
    rep = alpha_star_exact(G, 3)
    assert t.leftover_per_part <= rep.alpha


def test_greedy_leftover_is_a_hole():
    # sparse enough that something is left over
    G = random_instance(K3, 5, 0.3, 11)
    t = greedy_clique_tiling(G)
    assert t.leftover_per_part >= 1
    left = t.leftover_masks()
    sets = tuple(
        frozenset(v for v in range(G.n) if left[p] >> v & 1) for p in range(1, 4)
    )
    assert verify_hole(G, HoleCertificate(3, (1, 2, 3), sets))


def test_greedy_clique_tiling_rejects_cycle_pattern():
    with pytest.raises(ValueError, match="complete pattern"):
        greedy_clique_tiling(complete_blowup(C4, 2))


# -- transversal paths ----------------------------------------------------------


def test_path_complete_blowup():
    G = complete_blowup(C4, 3)
    X = VertexSetFamily.of({p: range(3) for p in range(1, 5)})
    path = find_transversal_path(G, 1, 4, X)
    assert path is not None and len(path) == 4
    for a in range(3):
        assert G.has_edge(path[a], path[a + 1])


def test_path_respects_sets():
    G = complete_blowup(C4, 3)
    X = VertexSetFamily.of({1: [2], 2: [0, 1], 3: [1], 4: [0]})
    path = find_transversal_path(G, 1, 4, X)
    assert path[0] == VertexId(1, 2) and path[2] == VertexId(3, 1)


def test_path_none_when_sets_disconnected():
    G = complete_blowup(C4, 2).delete_edges(
        [(1, 0, 2, 0), (1, 0, 2, 1), (1, 1, 2, 0), (1, 1, 2, 1)]
    )
    X = VertexSetFamily.of({1: [0, 1], 2: [0, 1], 3: [0, 1]})
    assert find_transversal_path(G, 1, 3, X) is None


@pytest.mark.parametrize("seed", range(6))
def test_path_agrees_with_product_scan(seed):
    G = random_instance(C4, 3, 0.4, seed)
    sets = {1: {0, 2}, 2: {0, 1, 2}, 3: {1, 2}}
    X = VertexSetFamily.of(sets)
    path = find_transversal_path(G, 1, 3, X)
    naive = any(
        G.has_edge((1, a), (2, b)) and G.has_edge((2, b), (3, c))
        for a in sets[1]
        for b in sets[2]
        for c in sets[3]
    )
    assert (path is not None) == naive
    if path is not None:
        assert all(v.idx in sets[v.part] for v in path)


def test_path_errors():
    G = complete_blowup(C4, 2)
    X = VertexSetFamily.of({1: [0], 2: [0]})
    with pytest.raises(ValueError, match="non-consecutive parts"):
        find_transversal_path(G, 2, 2, X)
    with pytest.raises(ValueError, match="non-consecutive parts"):
        find_transversal_path(G, 3, 1, X)
    with pytest.raises(ValueError, match="non-consecutive parts"):
        find_transversal_path(G, 1, 3, X)  # family spans {1,2}, need {1,2,3}


# -- transversal cycles ----------------------------------------------------------


def test_cycle_complete_blowup():
    G = complete_blowup(C4, 2)
    found = find_transversal_cycle(G, full_family(G))
    assert found is not None
    ids = found.vertex_ids()
    for a in range(4):
        assert G.has_edge(ids[a], ids[(a + 1) % 4])


@pytest.mark.parametrize("pattern", [C4, C5])
@pytest.mark.parametrize("seed", range(8))
def test_cycle_search_is_complete(pattern, seed):
    # the all-anchor sweep must agree with a full tuple scan, both ways
    G = random_instance(pattern, 3, 0.45, seed)
    found = find_transversal_cycle(G, full_family(G))
    naive = naive_copy_set(G)
    assert (found is not None) == bool(naive)
    if found is not None:
        assert found.verts in naive


def test_cycle_respects_constraints():
    G = complete_blowup(C4, 3)
    fam = VertexSetFamily.of({1: [2], 2: [1], 3: [0], 4: [2]})
    found = find_transversal_cycle(G, fam)
    assert found == TransversalCopy((2, 1, 0, 2))


def test_cycle_avoiding_barrier_core_is_none():
    # every transversal cycle must pass through the protected set
    G, U, _ = space_barrier(Pattern.cycle(4), 8, seed=5)
    outside = VertexSetFamily.of({p: range(1, 8) for p in range(1, 5)})
    assert find_transversal_cycle(G, outside) is None
    assert find_transversal_cycle(G, full_family(G)) is not None


def test_cycle_rejects_non_cycle_pattern():
    G = complete_blowup(Pattern.complete(4), 2)
    with pytest.raises(ValueError, match="cycle pattern"):
        find_transversal_cycle(G, full_family(G))


def test_greedy_cycle_tiling():
    G = complete_blowup(C4, 3)
    t = greedy_cycle_tiling(G)
    assert t.leftover_per_part == 0
    empty = PartiteGraph.from_edges(C4, 2, [])
    assert greedy_cycle_tiling(empty).leftover_per_part == 2


# -- exact factor decision ---------------------------------------------------------


def test_factor_complete_blowup():
    G = complete_blowup(K3, 2)
    t = exact_transversal_factor(G)
    assert t is not None and len(t.copies) == 2
    Tiling.build(G, t.copies)


def test_factor_reports_stats():
    G = complete_blowup(K3, 2)
    t, stats = exact_transversal_factor_search(G)
    assert t is not None and stats.nodes >= 2 and stats.max_depth == 2
    assert stats.to_json_dict() == {"nodes": stats.nodes, "max_depth": 2}


def test_factor_absent_with_isolated_vertex():
    G = complete_blowup(K3, 2).delete_edges(
        [(1, 0, 2, 0), (1, 0, 2, 1), (1, 0, 3, 0), (1, 0, 3, 1)]
    )
    t, stats = exact_transversal_factor_search(G)
    assert t is None and stats.nodes == 0


def test_factor_minus_cross_matching():
    # remove a perfect matching between parts 1 and 2 only
    G = complete_blowup(K3, 2).delete_edges([(1, 0, 2, 0), (1, 1, 2, 1)])
    assert (exact_transversal_factor(G) is not None) == naive_factor_exists(G)


@pytest.mark.parametrize("pattern", [Pattern.complete(2), K3])
@pytest.mark.parametrize("seed", range(8))
def test_factor_agrees_with_permutation_scan(pattern, seed):
    G = random_instance(pattern, 3, 0.6, seed)
    found = exact_transversal_factor(G)
    assert (found is not None) == naive_factor_exists(G)
    if found is not None:
        Tiling.build(G, found.copies)
        assert found.leftover_per_part == 0


def test_factor_cap_refusal():
    G = complete_blowup(Pattern.complete(2), 13)
    with pytest.raises(ValueError, match="exact mode refused"):
        exact_transversal_factor(G)
    t = exact_transversal_factor(G, cap=None)
    assert t is not None and len(t.copies) == 13


def test_factor_space_barrier_absence():
    G, _, _ = space_barrier(Pattern.cycle(4), 8, seed=5)
    t, stats = exact_transversal_factor_search(G)
    assert t is None and stats.nodes > 0


# -- mixed tilings -------------------------------------------------------------------


def test_mixed_tiling_complete_blowup_perfect():
    G = complete_blowup(C4, 4)
    t = maximal_mixed_tiling(G, seed=0)
    assert t.leftover_per_part == 0
    assert t.counts()["p3"] + t.counts()["m2"] == 4
    rep = check_appendix_invariants(G, t)
    assert rep.vacuous and rep.ok


def test_mixed_tiling_empty_graph():
    G = PartiteGraph.from_edges(C4, 3, [])
    t = maximal_mixed_tiling(G, seed=1)
    assert len(t.copies) == 0 and t.leftover_per_part == 3


def test_mixed_tiling_validation():
    with pytest.raises(ValueError, match="k >= 4"):
        maximal_mixed_tiling(complete_blowup(Pattern.cycle(3), 2), seed=0)
    with pytest.raises(ValueError, match="cycle pattern"):
        maximal_mixed_tiling(complete_blowup(Pattern.complete(4), 2), seed=0)


def test_mixed_tiling_deterministic():
    G = random_instance(C5, 6, 0.5, 3)
    a = maximal_mixed_tiling(G, seed=42)
    b = maximal_mixed_tiling(G, seed=42)
    assert a.copies == b.copies


@pytest.mark.parametrize("pattern,n,p,seed", [
    (C4, 5, 0.35, 0), (C4, 6, 0.3, 1), (C5, 5, 0.4, 2), (C5, 6, 0.35, 3),
    (Pattern.cycle(6), 5, 0.4, 4),
])
def test_mixed_tiling_maximal_by_exhaustive_scan(pattern, n, p, seed):
    G = random_instance(pattern, n, p, seed)
    t = maximal_mixed_tiling(G, seed=seed)
    left = t.leftover_masks()
    L = [set()] + [
        {v for v in range(n) if left[q] >> v & 1} for q in range(1, G.k + 1)
    ]
    assert not naive_mixed_addable(G, L)
    covered = t.covered_masks()
    assert all(covered[q].bit_count() == len(t.copies) for q in range(1, G.k + 1))


def test_mixed_copy_structure_is_validated():
    G = PartiteGraph.from_edges(C4, 2, [])
    bad = MixedTiling((MixedCopy("p3", (1,), (0, 0, 0, 0)),), 2, 4)
    with pytest.raises(ValueError, match="path edges missing"):
        check_appendix_invariants(G, bad)


def test_overlapping_copies_rejected():
    G = complete_blowup(C4, 3)
    t = MixedTiling(
        (
            MixedCopy("p3", (1,), (0, 0, 0, 0)),
            MixedCopy("p3", (1,), (0, 1, 1, 1)),
        ),
        3,
        4,
    )
    with pytest.raises(ValueError, match="unbalanced"):
        check_appendix_invariants(G, t)


def test_nonmaximal_tiling_flagged_not_violated():
    G = complete_blowup(C5, 5)
    t = maximal_mixed_tiling(G, seed=7)
    assert t.leftover_per_part == 0
    trimmed = MixedTiling(t.copies[:-1], t.n, t.k)
    rep = check_appendix_invariants(G, trimmed)
    assert not rep.maximal and rep.extension is not None
    assert rep.violations == ()
    assert not rep.ok


def test_invariant_direction_exclusivity_violation():
    # isolated filler of the only copy reaches leftover on both sides
    edges = [(1, 0, 2, 0), (2, 0, 3, 0), (3, 1, 4, 0), (1, 1, 4, 0)]
    G = PartiteGraph.from_edges(C4, 2, edges)
    t = MixedTiling((MixedCopy("p3", (1,), (0, 0, 0, 0)),), 2, 4)
    rep = check_appendix_invariants(G, t)
    assert rep.maximal and len(rep.violations) == 1
    assert rep.violations[0][:3] == (0, "isolated-direction", 4)


def test_invariant_copy_budget_violation():
    # seven copy-to-leftover edges against an edgeless leftover ring
    G = PartiteGraph.from_edges(
        C4,
        2,
        [
            (1, 0, 2, 0), (2, 0, 3, 0),           # the path itself
            (1, 0, 2, 1), (1, 0, 4, 1),           # u1 both sides
            (1, 1, 2, 0), (2, 0, 3, 1),           # u2 both sides
            (2, 1, 3, 0), (3, 0, 4, 1),           # u3 both sides
            (1, 1, 4, 0),                          # u4 one side
        ],
    )
    t = MixedTiling((MixedCopy("p3", (1,), (0, 0, 0, 0)),), 2, 4)
    rep = check_appendix_invariants(G, t)
    assert rep.maximal
    kinds = {v[1] for v in rep.violations}
    assert kinds == {"copy-edge-budget"}


def test_invariant_isolated_budget_violation():
    C6 = Pattern.cycle(6)
    edges = [
        (1, 0, 2, 0), (2, 0, 3, 0),   # path on parts 1..3
        (4, 0, 5, 1), (5, 0, 6, 1), (1, 1, 6, 0),
    ]
    G = PartiteGraph.from_edges(C6, 2, edges)
    t = MixedTiling((MixedCopy("p3", (1,), (0, 0, 0, 0, 0, 0)),), 2, 6)
    rep = check_appendix_invariants(G, t)
    assert rep.maximal
    kinds = {v[1] for v in rep.violations}
    assert kinds == {"isolated-edge-budget"}


def test_invariant_pair_window_violation():
    C7 = Pattern.cycle(7)
    edges = [
        (1, 0, 2, 0), (2, 0, 3, 0),
        (4, 0, 5, 1),                 # isolated at part 4 reaches forward
        (7, 0, 1, 1),                 # isolated at part 7 reaches forward
    ]
    G = PartiteGraph.from_edges(C7, 2, edges)
    t = MixedTiling((MixedCopy("p3", (1,), (0,) * 7),), 2, 7)
    rep = check_appendix_invariants(G, t)
    assert rep.maximal
    kinds = {v[1] for v in rep.violations}
    assert kinds == {"isolated-pair-window"}
    assert rep.violations[0][2:] == (4, 7)


@pytest.mark.parametrize("k,n,seed", [(4, 6, 0), (5, 7, 1), (6, 9, 2)])
def test_trimmed_complete_blowup_reports_no_violations(k, n, seed):
    # dropping copies from a perfect tiling: flagged non-maximal, never violated
    G = complete_blowup(Pattern.cycle(k), n)
    t = maximal_mixed_tiling(G, seed=seed)
    assert t.leftover_per_part == 0
    trimmed = MixedTiling(t.copies[: n - 2], t.n, t.k)
    rep = check_appendix_invariants(G, trimmed)
    assert not rep.maximal and rep.violations == ()


def test_mixed_tiling_serialization_shape():
    G = complete_blowup(C4, 2)
    t = maximal_mixed_tiling(G, seed=0)
    d = t.to_json_dict()
    assert set(d) == {"copies", "leftover_per_part"}
    for c in d["copies"]:
        assert set(c) == {"kind", "anchor", "verts"} and len(c["verts"]) == 4
    rep = check_appendix_invariants(G, t)
    rd = rep.to_json_dict()
    assert rd["maximal"] is True and rd["violations"] == []
