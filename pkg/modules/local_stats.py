"""
Stabilizer traces stab_sigma(x) & P, their exact and empirical distributions,
total-variation distance and restriction to sub-probes.

A subset of a probe set is stored as an int bitmask: bit j stands for the
j-th word of the probe in shortlex order.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from modules.errors import ArityError, ProbeMismatchError
from modules.perm_core import QueryOracle, ball, build_graph
from modules.seeding import ensure_rng
from modules.word_engine import enumerate_reduced_words, evaluate, evaluate_point_counted

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProbeSet:
    words: tuple

    def __post_init__(self):
        words = tuple(sorted(set(self.words)))
        object.__setattr__(self, "words", words)
        if len({w.alphabet for w in words}) > 1:
            raise ArityError("probe words come from different alphabets")

    @classmethod
    def from_words(cls, words):
        return cls(tuple(words))

    @classmethod
    def from_radius(cls, alphabet, radius):
        """All reduced words of length at most ``radius``."""
        return cls(tuple(enumerate_reduced_words(alphabet, radius)))

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def index(self, w):
        return self.words.index(w)

    def query_cost(self):
        """Queries needed for one trace: sum of word lengths."""
        return sum(len(w) for w in self.words)

    def mask_of(self, words):
        mask = 0
        for w in words:
            mask |= 1 << self.index(w)
        return mask

    def words_of(self, mask):
        return tuple(w for j, w in enumerate(self.words) if mask >> j & 1)

    def issubset(self, other):
        return set(self.words) <= set(other.words)


@dataclass(frozen=True)
class LocalStats:
    """
    A distribution over subsets of ``probe``, kept sparse as sorted
    ``(mask, weight)`` atoms with exact rational weights summing to 1.
    """

    probe: ProbeSet
    atoms: tuple

    def __post_init__(self):
        merged = Counter()
        for mask, weight in self.atoms:
            merged[int(mask)] += Fraction(weight)
        atoms = tuple(sorted((m, w) for m, w in merged.items() if w != 0))
        object.__setattr__(self, "atoms", atoms)
        if any(w < 0 for _, w in atoms):
            raise ValueError("local statistics weights must be non-negative")
        total = sum((w for _, w in atoms), Fraction(0))
        if total != 1:
            raise ValueError(f"local statistics weights sum to {total}, not 1")

    @classmethod
    def from_counts(cls, probe, counts):
        total = sum(counts.values())
        return cls(probe, tuple((mask, Fraction(c, total)) for mask, c in counts.items()))

    @property
    def weights(self):
        return dict(self.atoms)


def stab_trace(sigma, x, probe, oracle=None):
    """
    The words of ``probe`` that fix the 0-based point ``x``.

    Every word is applied through ``oracle`` (one query per letter); a fresh
    oracle over ``sigma`` is used when none is given.

    :return: Bitmask over ``probe``.
    """
    oracle = QueryOracle(sigma) if oracle is None else oracle
    mask = 0
    for j, w in enumerate(probe.words):
        if evaluate_point_counted(w, oracle, x) == x:
            mask |= 1 << j
    return mask


def trace_table(sigma, probe):
    """Trace bitmask of every point, computed from whole-word permutations."""
    evaluated = [evaluate(w, sigma).images for w in probe.words]
    traces = []
    for x in range(sigma.n):
        mask = 0
        for j, images in enumerate(evaluated):
            if images[x] == x:
                mask |= 1 << j
        traces.append(mask)
    return traces


@lru_cache(maxsize=4096)
def exact_local_stats(sigma, probe):
    """N_{sigma,P}: atom weight = (#points with that trace) / n."""
    return LocalStats.from_counts(probe, Counter(trace_table(sigma, probe)))


def empirical_local_stats(oracle, probe, samples, seed):
    """
    N^Emp_{sigma,P} from ``samples`` uniform points queried through ``oracle``.

    A point drawn twice reuses its first trace, so the oracle count stays at
    most samples * probe.query_cost().
    """
    if samples < 1:
        raise ValueError(f"need at least one sample, got {samples}")
    rng = ensure_rng(seed)
    points = rng.integers(0, oracle.n, size=samples)
    seen = {}
    counts = Counter()
    for x in points.tolist():
        if x not in seen:
            seen[x] = stab_trace(oracle.sigma, x, probe, oracle)
        counts[seen[x]] += 1
    return LocalStats.from_counts(probe, counts)


def tv_distance(a, b):
    """Half the L1 distance between two distributions over the same probe."""
    if a.probe != b.probe:
        raise ProbeMismatchError("total variation needs the same probe set on both sides")
    wa, wb = a.weights, b.weights
    total = sum((abs(wa.get(m, 0) - wb.get(m, 0)) for m in set(wa) | set(wb)), Fraction(0))
    return total / 2


def restrict(stats, sub_probe):
    """Pushes ``stats`` forward along trace -> trace & sub_probe."""
    if not sub_probe.issubset(stats.probe):
        raise ProbeMismatchError("restriction target is not a subset of the probe")
    positions = [stats.probe.index(w) for w in sub_probe.words]
    counts = Counter()
    for mask, weight in stats.atoms:
        sub_mask = 0
        for j, position in enumerate(positions):
            if mask >> position & 1:
                sub_mask |= 1 << j
        counts[sub_mask] += weight
    return LocalStats(sub_probe, tuple(counts.items()))


def ball_codes(sigma, radius):
    graph = build_graph(sigma)
    return [ball(graph, x, radius) for x in range(sigma.n)]


def ball_stats(sigma, radius):
    """Multiset of radius-``radius`` ball codes over all roots."""
    return Counter(ball_codes(sigma, radius))


def _partition(labels):
    blocks = {}
    for x, label in enumerate(labels):
        blocks.setdefault(label, set()).add(x)
    return frozenset(frozenset(block) for block in blocks.values())


def trace_partition(sigma, probe):
    return _partition(trace_table(sigma, probe))


def ball_partition(sigma, radius):
    return _partition(ball_codes(sigma, radius))


def balls_match_traces(sigma, radius, alphabet):
    """
    Checks that ball codes of ``radius`` and traces on words of length at most
    2*radius split [n] the same way.
    """
    probe = ProbeSet.from_radius(alphabet, 2 * radius)
    return ball_partition(sigma, radius) == trace_partition(sigma, probe)
