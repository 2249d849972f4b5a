import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import NAMED_MAPS, periodic_oracle_p1, points_p1_naive, points_pn_naive, random_maps
from orbita.certify import certify_descent
from orbita.errors import CandidateSetTooLarge, MalformedChainError, PreconditionError
from orbita.orbits import (
    ESCAPING,
    ON_CYCLE,
    PREPERIODIC,
    AbstractChain,
    backward_tree,
    certify_power,
    check_chain_lemma,
    enumerate_bounded,
    inverse_limit_p1,
    is_periodic,
    periodic_nodes,
    periodic_points,
    power_equivalence_check,
    projected_count,
    random_functional_graph,
)
from orbita.projective import HomogForm, Morphism, ProjPoint, evaluate, preimages_p1

SQ = Morphism.from_coeffs(*NAMED_MAPS["z^2"])
C1 = Morphism.from_coeffs(*NAMED_MAPS["z^2-1"])
CUBE = Morphism.from_coeffs(*NAMED_MAPS["z^3"])


def pts(*pairs):
    return {ProjPoint.of(*p) for p in pairs}


# --- enumeration ------------------------------------------------------------------------


def test_enumeration_examples():
    assert {P.coords for P in enumerate_bounded(1, 1)} == {(0, 1), (1, 0), (1, 1), (1, -1)}
    # the double loop gives 8 points of height <= 2, not 12
    assert len(enumerate_bounded(1, 2)) == len(points_p1_naive(2)) == 8
    assert len(enumerate_bounded(2, 1)) == 13


@given(st.integers(1, 40))
@settings(max_examples=20)
def test_enumeration_sorted_unique_and_counted(M):
    S = list(enumerate_bounded(1, M))
    assert len(set(S)) == len(S)
    assert [P.sort_key() for P in S] == sorted(P.sort_key() for P in S)
    assert all(P.height <= M for P in S)
    assert projected_count(1, M) >= len(S)


def test_enumeration_p3_small():
    assert {P.coords for P in enumerate_bounded(3, 2)} == points_pn_naive(3, 2)


def test_candidate_cap():
    with pytest.raises(CandidateSetTooLarge):
        enumerate_bounded(1, 1000, max_candidates=100)


# --- periodic points -----------------------------------------------------------------


def test_periodic_examples():
    assert periodic_points(SQ).periodic_points() == pts((0, 1), (1, 1), (1, 0))
    r = periodic_points(C1)
    assert r.periodic_points() == pts((1, 0), (0, 1), (-1, 1))
    assert sorted(r.periods) == [1, 2]
    r = periodic_points(CUBE)
    assert r.periodic_points() == pts((0, 1), (1, 0), (1, 1), (1, -1))
    assert r.periods == [1, 1, 1, 1]


def test_report_invariants():
    rng = random.Random(11)
    for F, G in random_maps(count=8):
        f = Morphism.from_coeffs(F, G)
        r = periodic_points(f, keep_classification=True)
        assert r.candidates == r.on_cycle + r.preperiodic + r.escaping
        assert len(r.classification) == r.candidates
        # cycle closure: every edge checks out under evaluate
        for c in r.cycles:
            for i, P in enumerate(c):
                assert evaluate(f, P) == c[(i + 1) % len(c)]
            assert c[0] == min(c, key=ProjPoint.sort_key)
        on = {P for P, s in r.classification.items() if s == ON_CYCLE}
        assert on == r.periodic_points()
        others = [P for P, s in r.classification.items() if s in (ESCAPING, PREPERIODIC)]
        for P in rng.sample(others, min(200, len(others))):
            assert not is_periodic(f, P)


def test_threads_give_same_answer():
    F, G = random_maps(count=3)[2]
    f = Morphism.from_coeffs(F, G)
    a = periodic_points(f)
    b = periodic_points(f, threads=2)
    assert a.cycles == b.cycles


def test_pn_search_mode():
    x, y, z = (HomogForm.variable(i, 3) for i in range(3))
    f = Morphism([x * x, y * y, z * z])
    with pytest.raises(PreconditionError):
        periodic_points(f)
    r = periodic_points(f, bound=2)
    assert not r.certified
    # coordinatewise squaring fixes exactly the 0/1 vectors
    expected = {ProjPoint(c) for c in points_pn_naive(2, 1) if set(c) <= {0, 1}}
    assert r.periodic_points() == expected
    assert r.periods == [1] * 7


@given(st.integers(0, 10**6))
@settings(max_examples=10, deadline=None)
def test_periodic_matches_oracle_on_random_maps(seed):
    rng = random.Random(seed)
    while True:
        F = [rng.randint(-3, 3) for _ in range(3)]
        G = [rng.randint(-3, 3) for _ in range(3)]
        try:
            f = Morphism.from_coeffs(F, G)
            break
        except Exception:
            continue
    cert = certify_descent(f)
    got = {P.coords for P in periodic_points(f, cert).periodic_points()}
    assert got == periodic_oracle_p1(F, G, cert.M)


# --- powers -----------------------------------------------------------------------------


def test_power_examples():
    r = power_equivalence_check(SQ, 2)
    assert r.equal and r.power.periodic_points() == pts((0, 1), (1, 1), (1, 0))
    r = power_equivalence_check(C1, 2)
    assert r.equal
    assert r.power.periods == [1, 1, 1]  # the 2-cycle splits into two fixed points
    assert power_equivalence_check(C1, 1).equal


def test_power_certificate_shape():
    c = certify_descent(C1)
    c3 = certify_power(c, 3)
    assert c3.degree == 8
    assert c3.B == c.B ** 7
    assert c3.M == c.M
    assert certify_power(c, 1) is c
    # the derived bound holds for f^3 directly
    g = C1.power(3)
    for a in range(-30, 31):
        P = ProjPoint.of(a, 7)
        assert c3.B * evaluate(g, P).height >= P.height**8


# --- backward orbits ----------------------------------------------------------------


def test_backward_tree_examples():
    t = backward_tree(SQ, ProjPoint.of(1, 1), 2)
    assert set(t.level(1)) == pts((1, 1), (-1, 1))
    under = {n.point: i for i, n in enumerate(t.nodes) if n.depth == 1}
    assert [t.nodes[j].point for j in t.children(under[ProjPoint.of(-1, 1)])] == []
    assert {t.nodes[j].point for j in t.children(under[ProjPoint.of(1, 1)])} == pts((1, 1), (-1, 1))
    assert backward_tree(SQ, ProjPoint.of(2, 1), 1).level(1) == []
    t = backward_tree(C1, ProjPoint.of(3, 1), 0)
    assert len(t.nodes) == 1


def test_backward_tree_edges_are_forward_maps():
    f = Morphism.from_coeffs([1, 0, -4], [0, 0, 1])
    t = backward_tree(f, ProjPoint.of(5, 1), 4)
    for child, parent in t.edges():
        assert evaluate(f, child) == parent
    for i, n in enumerate(t.nodes):
        kids = {t.nodes[j].point for j in t.children(i)}
        if n.depth < 4:
            assert kids == preimages_p1(f, n.point)


def test_inverse_limit_examples():
    lim = inverse_limit_p1(SQ)
    assert set(lim) == pts((0, 1), (1, 1), (1, 0))
    assert all(c.period == 1 for c in lim.values())
    chain = inverse_limit_p1(C1)[ProjPoint.of(0, 1)]
    assert chain.prefix(4) == [ProjPoint.of(0, 1), ProjPoint.of(-1, 1), ProjPoint.of(0, 1), ProjPoint.of(-1, 1)]
    assert len(inverse_limit_p1(CUBE)) == 4


def test_inverse_limit_chains_are_backward_orbits():
    for F, G in random_maps(count=10):
        f = Morphism.from_coeffs(F, G)
        for x0, chain in inverse_limit_p1(f).items():
            for n in range(10):
                assert evaluate(f, chain.term(n + 1)) == chain.term(n)


# --- chain lemma ---------------------------------------------------------------------


def test_chain_lemma_examples():
    const = AbstractChain(1, {0: 0}, lambda n: 0)
    v = check_chain_lemma(const, {0}, 10)
    assert v.periodic and v.period == 1

    table = {0: 1, 1: 2, 2: 0}
    cyc = AbstractChain(3, table, lambda n: [0, 2, 1][n % 3])
    v = check_chain_lemma(cyc, {0, 1, 2}, 10)
    assert v.periodic and v.period == 3

    v = check_chain_lemma(cyc, {7}, 10)
    assert not v.periodic and v.period is None

    bad = AbstractChain(3, table, lambda n: n % 3)
    with pytest.raises(MalformedChainError):
        check_chain_lemma(bad, {0}, 10)
    with pytest.raises(ValueError):
        check_chain_lemma(cyc, {0, 1, 2}, 3)


@given(st.integers(0, 2**32), st.integers(1, 50))
def test_random_graph_cycles(seed, n):
    rng = random.Random(seed)
    table = random_functional_graph(rng, n)
    per = periodic_nodes(table)
    assert per
    for v in range(n):
        x = v
        for _ in range(n):
            x = table[x]
        # after n steps every orbit sits on a cycle
        assert x in per
        back = x
        for _ in range(n):
            back = table[back]
            if back == x:
                break
        assert back == x
