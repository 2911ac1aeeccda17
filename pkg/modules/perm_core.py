"""
Permutations of [n], k-tuples of them, the normalized Hamming metric and the
labeled graph G_sigma.

Points are 0-based everywhere inside the library. Text input and output use
1-based points; the conversion happens in ``encoders.text_formats``.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
from sympy.combinatorics import Permutation as SymPermutation

from modules.errors import ArityError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Permutation:
    """
    A bijection of [0..n-1] backed by a sympy permutation.

    sympy multiplies left to right (``p*q`` applies ``p`` first); this class
    composes right to left, ``(a * b)(x) = a(b(x))``, so that word evaluation
    is a left action. ``images`` is sympy's ``array_form`` and serves the
    inner loops.
    """

    images: tuple
    perm: SymPermutation = field(init=False, repr=False, compare=False)
    inverse_images: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        images = tuple(int(y) for y in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a bijection of [0..{len(images) - 1}]: {images}")
        perm = SymPermutation(list(images))
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "inverse_images", tuple((~perm).array_form))

    @classmethod
    def from_sympy(cls, perm):
        return cls(tuple(perm.array_form))

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, cycles, n):
        """Builds a permutation from 0-based cycles, e.g. ``[(0, 1, 2)]``."""
        return cls.from_sympy(SymPermutation([list(c) for c in cycles if c], size=n))

    @classmethod
    def random(cls, n, rng):
        # numpy rather than SymPermutation.random, which draws from the global random module
        return cls(tuple(int(y) for y in rng.permutation(n)))

    @property
    def n(self):
        return len(self.images)

    def __call__(self, x):
        return self.images[x]

    def __mul__(self, other):
        return compose(self, other)

    def inverse(self):
        return Permutation.from_sympy(~self.perm)

    def preimage(self, y):
        return self.inverse_images[y]

    def is_identity(self):
        return self.perm.is_Identity

    def cycles(self):
        """Non-trivial cycles, each starting at its smallest point."""
        return [tuple(c) for c in self.perm.cyclic_form]

    def conjugate(self, pi):
        """pi * self * pi^-1, i.e. self with points renamed by pi."""
        if self.n != pi.n:
            raise ArityError(f"cannot conjugate degree {self.n} by degree {pi.n}")
        return Permutation.from_sympy(self.perm ^ pi.perm)


def compose(a, b):
    """(a * b)(x) = a(b(x)), which is sympy's ``b*a``."""
    if a.n != b.n:
        raise ArityError(f"cannot compose degrees {a.n} and {b.n}")
    return Permutation.from_sympy(b.perm * a.perm)


@dataclass(frozen=True)
class PermTuple:
    perms: tuple

    def __post_init__(self):
        perms = tuple(self.perms)
        object.__setattr__(self, "perms", perms)
        if not perms:
            raise ArityError("a permutation tuple needs k >= 1 entries")
        degrees = {p.n for p in perms}
        if len(degrees) != 1:
            raise ArityError(f"permutations of mixed degrees {sorted(degrees)}")

    @classmethod
    def identity(cls, k, n):
        return cls(tuple(Permutation.identity(n) for _ in range(k)))

    @property
    def k(self):
        return len(self.perms)

    @property
    def n(self):
        return self.perms[0].n

    def __getitem__(self, i):
        return self.perms[i]

    def __iter__(self):
        return iter(self.perms)

    def __len__(self):
        return len(self.perms)

    def replace(self, i, perm):
        perms = list(self.perms)
        perms[i] = perm
        return PermTuple(tuple(perms))


def random_tuple(k, n, rng):
    return PermTuple(tuple(Permutation.random(n, rng) for _ in range(k)))


def relabel(sigma, pi):
    """Renames the points of every coordinate by ``pi`` (simultaneous conjugation)."""
    return PermTuple(tuple(p.conjugate(pi) for p in sigma))


def dist(sigma, tau):
    """
    Normalized Hamming distance between two permutations of the same degree.

    :return: Fraction in [0, 1].
    """
    if sigma.n != tau.n:
        raise ArityError(f"degrees differ ({sigma.n} vs {tau.n}); use dist_cross")
    if sigma.n == 0:
        return Fraction(0)
    disagreements = sum(1 for a, b in zip(sigma.images, tau.images) if a != b)
    return Fraction(disagreements, sigma.n)


def dist_cross(sigma, tau):
    """
    Distance between permutations of [n] and [N]: disagreements on the
    smaller set, divided by its size. Symmetric in its arguments.
    """
    if sigma.n > tau.n:
        sigma, tau = tau, sigma
    if sigma.n == 0:
        return Fraction(0)
    disagreements = sum(1 for x in range(sigma.n) if sigma.images[x] != tau.images[x])
    return Fraction(disagreements, sigma.n)


def tuple_dist(a, b):
    """Sum of coordinatewise distances; lies in [0, k]."""
    if a.k != b.k:
        raise ArityError(f"tuples of sizes {a.k} and {b.k}")
    return sum((dist_cross(s, t) for s, t in zip(a, b)), Fraction(0))


@dataclass
class QueryOracle:
    """
    Answers "what is sigma_i x" and "what is sigma_i^-1 x" and counts every
    answer. Generator indices are 1-based, points 0-based.
    """

    sigma: PermTuple
    record: bool = False
    count: int = 0
    transcript: list = field(default_factory=list)

    @property
    def n(self):
        return self.sigma.n

    @property
    def k(self):
        return self.sigma.k

    def forward(self, i, x):
        y = self.sigma.perms[i - 1].images[x]
        self._log(i, False, x, y)
        return y

    def backward(self, i, x):
        y = self.sigma.perms[i - 1].preimage(x)
        self._log(i, True, x, y)
        return y

    def _log(self, i, inverted, x, y):
        self.count += 1
        if self.record:
            self.transcript.append(((i, inverted, x), y))

    def reset(self):
        self.count = 0
        self.transcript = []


def build_graph(sigma):
    """
    Returns G_sigma as a networkx MultiDiGraph on 0..n-1 with one edge
    x -> sigma_i x labeled ``i`` (1-based) per vertex and colour.
    """
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(range(sigma.n))
    for i, perm in enumerate(sigma, start=1):
        for x, y in enumerate(perm.images):
            graph.add_edge(x, y, label=i)
    return graph


def graph_colors(graph):
    return sorted({label for _, _, label in graph.edges(data="label")})


def graph_to_tuple(graph):
    n = graph.number_of_nodes()
    images = {}
    for x, y, label in graph.edges(data="label"):
        images.setdefault(label, [None] * n)[x] = y
    return PermTuple(tuple(Permutation(tuple(images[i])) for i in sorted(images)))


def _successors(graph, x):
    return {label: y for _, y, label in graph.out_edges(x, data="label")}


def _predecessors(graph, x):
    return {label: y for y, _, label in graph.in_edges(x, data="label")}


def ball(graph, x, radius):
    """
    Canonical code of the rooted, colored ball of ``radius`` around ``x``.

    Vertices are numbered in BFS order, exploring letters in the order
    s_1, s_1^-1, s_2, s_2^-1, ...; each step has exactly one outcome, so the
    numbering needs no choices. The ball keeps every edge with an endpoint
    at distance < radius, so radius 0 is the bare root ``(1, ())`` even where
    the root carries self-loops; the self-loops of a fixed point appear from
    radius 1 on. Two roots get equal codes exactly when their balls are
    isomorphic as rooted colored graphs.

    :return: ``(vertex_count, edges)`` with edges sorted ``(tail, colour, head)``.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    colors = graph_colors(graph)
    label = {x: 0}
    depth = {x: 0}
    queue = deque([x])
    edges = set()
    while queue:
        v = queue.popleft()
        if depth[v] >= radius:
            continue
        out, into = _successors(graph, v), _predecessors(graph, v)
        for color in colors:
            for u, forward in ((out[color], True), (into[color], False)):
                if u not in label:
                    label[u] = len(label)
                    depth[u] = depth[v] + 1
                    queue.append(u)
                tail, head = (v, u) if forward else (u, v)
                edges.add((label[tail], color, label[head]))
    return len(label), tuple(sorted(edges))
