from collections import Counter
from fractions import Fraction

import pytest

from encoders.text_formats import parse_tuple
from modules.errors import ProbeMismatchError
from modules.local_stats import (
    LocalStats,
    ProbeSet,
    balls_match_traces,
    empirical_local_stats,
    exact_local_stats,
    restrict,
    stab_trace,
    trace_partition,
    tv_distance,
)
from modules.perm_core import Permutation, PermTuple, QueryOracle, random_tuple, relabel
from modules.seeding import create_rng
from modules.solution_space import enumerate_solutions
from modules.word_engine import Alphabet, enumerate_reduced_words, parse_word


def _probe(alphabet, text):
    return ProbeSet.from_words([parse_word(t, alphabet) for t in text.split()])


def test_stab_trace_single_generator():
    x = Alphabet.from_text("x")
    sigma = parse_tuple("(1 2)", 3)
    probe = _probe(x, "x xx")
    assert probe.words_of(stab_trace(sigma, 2, probe)) == probe.words
    assert [str(w) for w in probe.words_of(stab_trace(sigma, 0, probe))] == ["xx"]
    assert stab_trace(sigma, 0, probe) == stab_trace(sigma, 1, probe)


def test_stab_trace_uses_oracle():
    x = Alphabet.from_text("x")
    sigma = parse_tuple("(1 2)", 3)
    probe = _probe(x, "x xx")
    oracle = QueryOracle(sigma)
    stab_trace(sigma, 2, probe, oracle)
    assert oracle.count == probe.query_cost() == 3


def test_exact_local_stats_examples(xy):
    x = Alphabet.from_text("x")
    stats = exact_local_stats(parse_tuple("(1 2)", 3), _probe(x, "x"))
    assert stats.weights == {0: Fraction(2, 3), 1: Fraction(1, 3)}

    probe = _probe(xy, "x y xy")
    stats = exact_local_stats(parse_tuple("(1 2)\n(1 2)", 2), probe)
    assert stats.atoms == ((probe.mask_of([parse_word("xy", xy)]), Fraction(1)),)


def test_local_stats_must_sum_to_one(xy):
    with pytest.raises(ValueError):
        LocalStats(_probe(xy, "x"), ((0, Fraction(1, 2)),))


def test_tv_distance_examples(xy):
    probe = _probe(xy, "x")
    a = LocalStats.from_counts(probe, Counter({0: 1}))
    b = LocalStats.from_counts(probe, Counter({1: 1}))
    c = LocalStats.from_counts(probe, Counter({0: 1, 1: 1}))
    assert tv_distance(a, a) == 0
    assert tv_distance(a, b) == 1
    assert tv_distance(a, c) == Fraction(1, 2)


def test_tv_distance_needs_same_word_set(xy):
    a = exact_local_stats(PermTuple.identity(2, 2), _probe(xy, "x"))
    b = exact_local_stats(PermTuple.identity(2, 2), _probe(xy, "y"))
    with pytest.raises(ProbeMismatchError):
        tv_distance(a, b)


def test_tv_monotone_under_restriction(xy):
    rng = create_rng(21)
    words = enumerate_reduced_words(xy, 2)[:10]
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        sigma, tau = random_tuple(2, n, rng), random_tuple(2, n, rng)
        chosen = [w for w in words if rng.random() < 0.6] or words[:1]
        probe = ProbeSet.from_words(chosen)
        sub = ProbeSet.from_words([w for w in chosen if rng.random() < 0.5] or chosen[:1])
        full = tv_distance(exact_local_stats(sigma, probe), exact_local_stats(tau, probe))
        part = tv_distance(
            restrict(exact_local_stats(sigma, probe), sub),
            restrict(exact_local_stats(tau, probe), sub),
        )
        assert part <= full


def test_restrict_matches_direct_computation(xy):
    sigma = random_tuple(2, 6, create_rng(9))
    probe = ProbeSet.from_radius(xy, 2)
    sub = ProbeSet.from_radius(xy, 1)
    assert restrict(exact_local_stats(sigma, probe), sub) == exact_local_stats(sigma, sub)


def test_restrict_requires_subset(xy):
    stats = exact_local_stats(PermTuple.identity(2, 2), _probe(xy, "x"))
    with pytest.raises(ProbeMismatchError):
        restrict(stats, _probe(xy, "y"))


def test_empirical_stats_query_bound(xy):
    sigma = random_tuple(2, 8, create_rng(1))
    probe = ProbeSet.from_radius(xy, 2)
    oracle = QueryOracle(sigma)
    stats = empirical_local_stats(oracle, probe, 50, create_rng(2))
    assert oracle.count <= 50 * probe.query_cost()
    assert sum(stats.weights.values()) == 1


def test_empirical_stats_of_transitive_abelian_is_exact(xy):
    sigma = parse_tuple("(1 2 3 4 5)\n(1 3 5 2 4)", 5)
    probe = ProbeSet.from_radius(xy, 2)
    empirical = empirical_local_stats(QueryOracle(sigma), probe, 7, 3)
    assert tv_distance(empirical, exact_local_stats(sigma, probe)) == 0


def test_trace_partition_of_identity(xy):
    partition = trace_partition(PermTuple.identity(2, 4), ProbeSet.from_radius(xy, 2))
    assert partition == frozenset({frozenset(range(4))})


@pytest.mark.parametrize("k", [1, 2])
def test_balls_match_traces(k):
    alphabet = Alphabet.of_size(k)
    rng = create_rng(30, k)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        radius = int(rng.integers(0, 2))
        assert balls_match_traces(random_tuple(k, n, rng), radius, alphabet)


def test_exact_stats_invariant_under_relabeling():
    xy = Alphabet.from_text("xy")
    probe = ProbeSet.from_radius(xy, 2)
    rng = create_rng(40)
    for _ in range(30):
        sigma = random_tuple(2, 6, rng)
        pi = Permutation.random(6, rng)
        assert exact_local_stats(relabel(sigma, pi), probe) == exact_local_stats(sigma, probe)


def test_relators_lie_in_every_solution_trace(commutator):
    relator = commutator.relators[0]
    probe = ProbeSet.from_words(enumerate_reduced_words(commutator.alphabet, 2) + [relator])
    relator_bit = probe.mask_of([relator])
    for n in (2, 3):
        for tau in enumerate_solutions(commutator, n):
            for x in range(n):
                assert stab_trace(tau, x, probe) & relator_bit


@pytest.mark.slow
def test_empirical_stats_concentrate():
    xy = Alphabet.from_text("xy")
    probe = ProbeSet.from_radius(xy, 2)
    rng = create_rng(41)
    for n in (3, 5, 8):
        for _ in range(5):
            sigma = random_tuple(2, n, rng)
            empirical = empirical_local_stats(QueryOracle(sigma), probe, 100_000, rng)
            assert tv_distance(empirical, exact_local_stats(sigma, probe)) <= Fraction(1, 50)
