from fractions import Fraction

import networkx as nx
import pytest
from sympy.combinatorics.named_groups import SymmetricGroup

from encoders.text_formats import parse_permutation, parse_tuple
from modules.errors import ArityError
from modules.perm_core import (
    Permutation,
    PermTuple,
    QueryOracle,
    ball,
    build_graph,
    dist,
    dist_cross,
    graph_to_tuple,
    random_tuple,
    relabel,
    tuple_dist,
)
from modules.local_stats import ball_stats
from modules.seeding import create_rng


def test_permutation_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))


def test_compose_right_to_left():
    a = Permutation.from_cycles([(0, 1)], 3)
    b = Permutation.from_cycles([(1, 2)], 3)
    assert (a * b).images == (1, 2, 0)


@pytest.mark.parametrize(
    "left, right, n, expected",
    [
        ("(1 2)", "()", 3, Fraction(2, 3)),
        ("(1 2 3)", "()", 3, Fraction(1)),
        ("(1 2)", "()", 4, Fraction(1, 2)),
        ("(1 2)(3 4)", "(1 2)", 4, Fraction(1, 2)),
    ],
)
def test_dist_examples(left, right, n, expected):
    assert dist(parse_permutation(left, n), parse_permutation(right, n)) == expected


def test_dist_degree_mismatch():
    with pytest.raises(ArityError):
        dist(Permutation.identity(3), Permutation.identity(4))


def test_dist_cross_uses_smaller_set():
    small = parse_permutation("(1 2)", 3)
    big = parse_permutation("(1 2)(4 5)", 5)
    assert dist_cross(small, big) == 0
    assert dist_cross(big, small) == 0
    assert dist_cross(parse_permutation("(2 3)", 3), parse_permutation("(2 4)", 4)) == Fraction(2, 3)


def test_tuple_dist():
    sigma = parse_tuple("(1 2)\n(1 3)", 3)
    assert tuple_dist(sigma, PermTuple.identity(2, 3)) == Fraction(4, 3)


@pytest.mark.parametrize("n", [3, 4])
def test_metric_axioms_exhaustive(n):
    perms = [Permutation.from_sympy(p) for p in SymmetricGroup(n).generate()]
    for a in perms:
        assert dist(a, a) == 0
        for b in perms:
            d_ab = dist(a, b)
            assert d_ab == dist(b, a)
            if a != b:
                assert d_ab > 0
            for c in perms:
                assert dist(a, c) <= d_ab + dist(b, c)


def test_oracle_counts_and_records():
    sigma = parse_tuple("(1 2 3)\n(1 2)", 3)
    oracle = QueryOracle(sigma, record=True)
    assert oracle.forward(1, 0) == 1
    assert oracle.backward(1, 0) == 2
    assert oracle.count == 2
    assert oracle.transcript == [((1, False, 0), 1), ((1, True, 0), 2)]
    oracle.reset()
    assert oracle.count == 0


def test_graph_round_trip():
    sigma = random_tuple(2, 6, create_rng(3))
    graph = build_graph(sigma)
    assert graph.number_of_nodes() == 6
    assert graph.number_of_edges() == 12
    assert graph_to_tuple(graph) == sigma


def test_ball_codes_example():
    sigma = parse_tuple("(1 2)", 3)
    graph = build_graph(sigma)
    codes = [ball(graph, x, 1) for x in range(3)]
    assert codes[0] == codes[1]
    assert codes[2] != codes[0]
    assert codes[2] == (1, ((0, 1, 0),))
    assert len(set(codes)) == 2


def test_ball_radius_zero_is_bare_root():
    graph = build_graph(parse_tuple("(1 2 3)\n(1 2)", 3))
    assert ball(graph, 1, 0) == (1, ())


def test_ball_stats_invariant_under_relabeling():
    rng = create_rng(11)
    for _ in range(20):
        sigma = random_tuple(2, 7, rng)
        pi = Permutation.random(7, rng)
        assert ball_stats(sigma, 2) == ball_stats(relabel(sigma, pi), 2)


def test_relabel_is_graph_isomorphism():
    rng = create_rng(5)
    sigma = random_tuple(2, 5, rng)
    pi = Permutation.random(5, rng)
    relabeled = relabel(sigma, pi)
    mapping = {x: pi(x) for x in range(5)}
    expected = nx.relabel_nodes(build_graph(sigma), mapping)
    assert graph_to_tuple(expected) == relabeled


def test_identity_ball_self_loops():
    graph = build_graph(PermTuple.identity(2, 3))
    assert ball(graph, 0, 0) == (1, ())
    for radius in (1, 2, 3):
        assert ball(graph, 0, radius) == (1, ((0, 1, 0), (0, 2, 0)))


def test_sympy_backing_conventions():
    a = Permutation.from_cycles([(0, 1, 2)], 4)
    b = Permutation.from_cycles([(2, 3)], 4)
    assert (a * b).perm == b.perm * a.perm
    assert a.inverse().perm == ~a.perm
    assert a.cycles() == [(0, 1, 2)]
    assert b.conjugate(a) == Permutation.from_cycles([(0, 3)], 4)
    assert Permutation.identity(4).is_identity()


@pytest.mark.parametrize("n", [1, 2, 5, 17, 64])
def test_metric_axioms_random(n):
    rng = create_rng(30, n)
    for _ in range(50):
        a, b, c = (Permutation.random(n, rng) for _ in range(3))
        assert dist(a, a) == 0
        assert dist(a, b) == dist(b, a)
        assert (dist(a, b) == 0) == (a == b)
        assert dist(a, c) <= dist(a, b) + dist(b, c)


def test_dist_is_bi_invariant():
    rng = create_rng(31)
    for n in (3, 8, 20):
        for _ in range(30):
            a, b, pi = (Permutation.random(n, rng) for _ in range(3))
            assert dist(pi * a, pi * b) == dist(a, b)
            assert dist(a * pi, b * pi) == dist(a, b)
