from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_alpha_star, naive_has_transversal_tuple, random_instance
from transtile.core import Pattern, PartiteGraph, VertexId
from transtile.holes import (
    HoleCertificate,
    alpha_star_exact,
    alpha_star_lower_bound,
    certify_no_hole,
    eps_regular_check,
    regular_pair_degree_check,
    verify_hole,
)


def empty_instance(pattern, n):
    return PartiteGraph.from_edges(pattern, n, [])


# -- verify_hole ---------------------------------------------------------------


def test_verify_hole_complete_vs_empty():
    K3 = Pattern.complete(3)
    full = PartiteGraph.complete(K3, 3)
    hole = HoleCertificate(2, (1, 2), (frozenset({0, 1}), frozenset({0, 1})))
    assert not verify_hole(full, hole)
    assert verify_hole(empty_instance(K3, 3), hole)


def test_verify_hole_gadget():
    # kill the 2x2 biclique between {0,1} in part 1 and {1,2} in part 2
    G = PartiteGraph.complete(Pattern.complete(2), 3).delete_edges(
        [(1, a, 2, b) for a in (0, 1) for b in (1, 2)]
    )
    assert verify_hole(G, HoleCertificate(2, (1, 2), (frozenset({0, 1}), frozenset({1, 2}))))
    assert not verify_hole(G, HoleCertificate(2, (1, 2), (frozenset({0, 1}), frozenset({0, 2}))))


def test_verify_hole_arena_errors():
    G = PartiteGraph.complete(Pattern.cycle(4), 2)
    bad = HoleCertificate(2, (1, 3), (frozenset({0}), frozenset({0})))
    with pytest.raises(ValueError, match="invalid hole arena"):
        verify_hole(G, bad)  # parts 1,3 not adjacent in C_4
    with pytest.raises(ValueError, match="invalid hole arena"):
        verify_hole(G, HoleCertificate(2, (1, 1), (frozenset({0}), frozenset({1}))))
    with pytest.raises(ValueError, match="invalid hole arena"):
        verify_hole(G, HoleCertificate(2, (1, 2), (frozenset({0}), frozenset({0, 1}))))
    with pytest.raises(ValueError, match="invalid hole arena"):
        verify_hole(G, HoleCertificate(2, (1, 2), (frozenset({0}), frozenset({7}))))


def test_verify_hole_empty_certificate():
    G = PartiteGraph.complete(Pattern.complete(3), 2)
    assert verify_hole(G, HoleCertificate(2, (1, 2), (frozenset(), frozenset())))


# -- exact solver -----------------------------------------------------------------


def test_alpha_exact_complete_is_zero():
    report = alpha_star_exact(PartiteGraph.complete(Pattern.complete(3), 4), 2)
    assert report.alpha == 0
    assert report.method == "exact"
    assert report.witness.sets == () and report.witness.verified


def test_alpha_exact_empty_graph():
    K3 = Pattern.complete(3)
    for r in (2, 3):
        report = alpha_star_exact(empty_instance(K3, 4), r)
        assert report.alpha == 4
        assert verify_hole(empty_instance(K3, 4), report.witness)


def test_alpha_exact_planted():
    # plant a 3x3 non-edge block between parts 1 and 2
    G = PartiteGraph.complete(Pattern.complete(3), 5).delete_edges(
        [(1, a, 2, b) for a in (0, 1, 2) for b in (2, 3, 4)]
    )
    report = alpha_star_exact(G, 2)
    assert report.alpha == 3
    assert report.witness.s == 3 and report.witness.verified
    # r=3 holes need a row of missing triangles; the planted block gives them too
    report3 = alpha_star_exact(G, 3)
    assert report3.alpha == 3


def test_alpha_exact_cap_refusal():
    G = PartiteGraph.complete(Pattern.complete(2), 11)
    with pytest.raises(ValueError, match="exact mode refused"):
        alpha_star_exact(G, 2)
    assert alpha_star_exact(G, 2, cap=11).alpha == 0


def test_alpha_exact_r_range():
    G = PartiteGraph.complete(Pattern.complete(3), 2)
    with pytest.raises(ValueError, match="out of range"):
        alpha_star_exact(G, 1)
    with pytest.raises(ValueError, match="out of range"):
        alpha_star_exact(G, 4)


def test_alpha_exact_cycle_pattern_pairs_only():
    # C_4 has no part triangles, so r=3 holes have no arena at all
    G = empty_instance(Pattern.cycle(4), 3)
    assert alpha_star_exact(G, 2).alpha == 3
    assert alpha_star_exact(G, 3).alpha == 0


@pytest.mark.parametrize("seed", range(12))
def test_alpha_exact_matches_naive(seed):
    k = 2 + seed % 3
    n = 3 + seed % 3
    G = random_instance(Pattern.complete(k), n, 0.4 + 0.1 * (seed % 4), seed=1000 + seed)
    for r in (2, 3):
        if r > k:
            continue
        assert alpha_star_exact(G, r).alpha == naive_alpha_star(G, r), (k, n, r, seed)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([0.3, 0.5, 0.7]))
def test_alpha_exact_monotone_under_deletion(seed, p):
    import random as _r

    G = random_instance(Pattern.complete(3), 4, p, seed)
    edges = list(G.iter_edges())
    if not edges:
        return
    rng = _r.Random(seed ^ 0xABCDEF)
    H = G.delete_edges(rng.sample(edges, 1 + rng.randrange(len(edges))))
    # removing edges can only create or enlarge holes
    assert alpha_star_exact(H, 2).alpha >= alpha_star_exact(G, 2).alpha


# -- randomized lower bound ----------------------------------------------------------


def test_lower_bound_complete_finds_nothing():
    G = PartiteGraph.complete(Pattern.complete(3), 4)
    assert alpha_star_lower_bound(G, 2, 1, trials=40, seed=3) is None


def test_lower_bound_planted_found():
    G = PartiteGraph.complete(Pattern.complete(3), 8).delete_edges(
        [(1, a, 2, b) for a in (1, 3, 5) for b in (0, 2, 4)]
    )
    cert = alpha_star_lower_bound(G, 2, 3, trials=100, seed=11)
    assert cert is not None and cert.verified and cert.s == 3
    assert verify_hole(G, cert)


def test_lower_bound_empty_graph():
    G = empty_instance(Pattern.complete(2), 6)
    cert = alpha_star_lower_bound(G, 2, 6, trials=10, seed=0)
    assert cert is not None and cert.s == 6


def test_lower_bound_validation():
    G = PartiteGraph.complete(Pattern.complete(2), 3)
    with pytest.raises(ValueError, match="out of range"):
        alpha_star_lower_bound(G, 2, 0)
    with pytest.raises(ValueError, match="out of range"):
        alpha_star_lower_bound(G, 2, 4)


# -- certification wrapper -------------------------------------------------------------


def test_certify_exact_regime():
    G = PartiteGraph.complete(Pattern.complete(3), 4)
    ok, regime, witness = certify_no_hole(G, 2, 1)
    assert ok and regime == "exact" and witness is None
    H = empty_instance(Pattern.complete(3), 4)
    ok, regime, witness = certify_no_hole(H, 2, 2)
    assert not ok and regime == "exact" and witness.s >= 2


def test_certify_randomized_regime():
    G = PartiteGraph.complete(Pattern.complete(2), 12)
    ok, regime, witness = certify_no_hole(G, 2, 2, trials=20, seed=5)
    assert ok and regime == "randomized-lower-bound" and witness is None


def test_certify_oversized_hole_vacuous():
    G = PartiteGraph.complete(Pattern.complete(2), 3)
    ok, regime, _ = certify_no_hole(G, 2, 4)
    assert ok and regime == "exact"


# -- regularity -----------------------------------------------------------------------


def _pair(G, nx, ny):
    return [VertexId(1, i) for i in range(nx)], [VertexId(2, j) for j in range(ny)]


def test_eps_regular_complete_pair():
    G = PartiteGraph.complete(Pattern.complete(2), 4)
    X, Y = _pair(G, 4, 4)
    ok, witness = eps_regular_check(G, X, Y, Fraction(1, 4), Fraction(1, 2))
    assert ok and witness is None


def test_eps_regular_low_density_fails():
    G = empty_instance(Pattern.complete(2), 4)
    X, Y = _pair(G, 4, 4)
    ok, witness = eps_regular_check(G, X, Y, Fraction(1, 4), Fraction(1, 2))
    assert not ok and witness == (tuple(X), tuple(Y))


def test_eps_regular_structured_violation():
    # density 1/2 but all edges packed on half of X: wildly irregular
    G = PartiteGraph.from_edges(
        Pattern.complete(2),
        4,
        [(1, a, 2, b) for a in (0, 1) for b in range(4)],
    )
    X, Y = _pair(G, 4, 4)
    ok, witness = eps_regular_check(G, X, Y, Fraction(1, 4), Fraction(1, 2))
    assert not ok
    Xv, Yv = witness
    # re-check the reported pair by independent rational arithmetic
    e = sum(G.has_edge(x, y) for x in Xv for y in Yv)
    dev = abs(Fraction(e, len(Xv) * len(Yv)) - Fraction(1, 2))
    assert dev > Fraction(1, 4)
    assert len(Xv) >= 1 and len(Yv) >= 1


def test_eps_regular_brute_force_agreement():
    # random 3+3 pair: compare against direct loops over all subsets
    G = random_instance(Pattern.complete(2), 3, 0.6, seed=77)
    X, Y = _pair(G, 3, 3)
    eps, d = Fraction(1, 3), Fraction(1, 3)
    ok, _ = eps_regular_check(G, X, Y, eps, d)
    e_full = sum(G.has_edge(x, y) for x in X for y in Y)
    expect = Fraction(e_full, 9) >= d
    if expect:
        for xr in range(1, 4):
            for Xs in combinations(X, xr):
                if Fraction(xr, 3) < eps:
                    continue
                for yr in range(1, 4):
                    if Fraction(yr, 3) < eps:
                        continue
                    for Ys in combinations(Y, yr):
                        e = sum(G.has_edge(x, y) for x in Xs for y in Ys)
                        if abs(Fraction(e, xr * yr) - Fraction(e_full, 9)) > eps:
                            expect = False
    assert ok == expect


def test_eps_regular_cap():
    G = PartiteGraph.complete(Pattern.complete(2), 13)
    X = [VertexId(1, i) for i in range(13)]
    Y = [VertexId(2, j) for j in range(13)]
    with pytest.raises(ValueError, match="capped"):
        eps_regular_check(G, X, Y, Fraction(1, 2), Fraction(1, 2))


def test_regular_pair_degree_property():
    # complete pair: every vertex dominates every B, so the check holds
    G = PartiteGraph.complete(Pattern.complete(2), 5)
    X = [VertexId(1, i) for i in range(5)]
    Y = [VertexId(2, j) for j in range(5)]
    assert regular_pair_degree_check(G, X, Y, Fraction(1, 5), Fraction(1, 2))
    # a single isolated vertex is exactly the allowed eps share of X
    H1 = G.delete_edges([(1, 0, 2, b) for b in range(5)])
    assert regular_pair_degree_check(H1, X, Y, Fraction(1, 5), Fraction(1, 2))
    # two isolated vertices exceed it
    H2 = H1.delete_edges([(1, 1, 2, b) for b in range(5)])
    assert not regular_pair_degree_check(H2, X, Y, Fraction(1, 5), Fraction(1, 2))


# -- property: verify matches naive tuple search ------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_verify_hole_matches_naive(seed):
    import random as _r

    rng = _r.Random(seed)
    G = random_instance(Pattern.complete(3), 4, 0.5, seed)
    s = 1 + rng.randrange(3)
    parts = (1, 2, 3)
    sets = tuple(frozenset(rng.sample(range(4), s)) for _ in parts)
    cand = HoleCertificate(3, parts, sets)
    naive = not naive_has_transversal_tuple(G, parts, [sorted(u) for u in sets])
    assert verify_hole(G, cand) == naive
