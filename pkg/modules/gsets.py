"""
Finite F_S-sets and Gamma-sets: the injection distance d_S, isomorphism and
random-stabilizer marginals on clopen sets C_{A,B}.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from networkx.algorithms.isomorphism import MultiDiGraphMatcher, categorical_multiedge_match

from config import INJECTION_SEARCH_LIMIT
from modules.errors import ArityError, BudgetExceededError, ProbeMismatchError
from modules.perm_core import build_graph
from modules.solution_space import is_solution
from modules.word_engine import evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GSet:
    """
    A finite set [size] on which generator i acts by ``action[i]``.

    ``certified`` is computed: True iff a system is attached and all of its
    relators act trivially, i.e. the set is a Gamma-set.
    """

    action: object
    system: object = None
    certified: bool = field(init=False)

    def __post_init__(self):
        certified = self.system is not None and is_solution(self.system, self.action)
        object.__setattr__(self, "certified", certified)

    @property
    def size(self):
        return self.action.n

    @property
    def k(self):
        return self.action.k


@dataclass(frozen=True)
class MarginalSpec:
    A: tuple
    B: tuple

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(sorted(set(self.A))))
        object.__setattr__(self, "B", tuple(sorted(set(self.B))))
        if not set(self.B) <= set(self.A):
            raise ProbeMismatchError("B must be a subset of A")


def _tables(gset):
    return [p.images for p in gset.action], [p.inverse_images for p in gset.action]


def _oriented(X, Y):
    if X.k != Y.k:
        raise ArityError(f"actions of {X.k} and {Y.k} generators")
    return (X, Y) if X.size <= Y.size else (Y, X)


def _assignment_order(X):
    """BFS order over X so that constraints close early in the search."""
    forward, backward = _tables(X)
    order, seen = [], set()
    for root in range(X.size):
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for table in forward + backward:
                u = table[v]
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    return order


def _added_cost(x, y, f, fx, fy, bx):
    """Cost of the pairs (s, .) closed by assigning f(x) = y."""
    cost = 0
    for s in range(len(fx)):
        sx = fx[s][x]
        if sx == x:
            if y != fy[s][y]:
                cost += 1
            continue
        if sx in f and f[sx] != fy[s][y]:
            cost += 1
        pre = bx[s][x]
        if pre in f and y != fy[s][f[pre]]:
            cost += 1
    return cost


def gset_distance_upper_bound(X, Y):
    """
    Greedy injection: each point, in BFS order, goes to the free target that
    adds the least cost. Returns an upper bound on d_S(X, Y).
    """
    X, Y = _oriented(X, Y)
    fx, bx = _tables(X)
    fy, _ = _tables(Y)
    f, used, total = {}, set(), 0
    for x in _assignment_order(X):
        best = None
        for y in range(Y.size):
            if y in used:
                continue
            c = _added_cost(x, y, f, fx, fy, bx)
            if best is None or c < best[0]:
                best = (c, y)
        f[x] = best[1]
        used.add(best[1])
        total += best[0]
    return Fraction(total, X.size)


def gset_distance(X, Y, limit=None):
    """
    Exact d_S(X, Y) = min over injections f of the smaller set into the larger
    of (1/|X|) * #{(s, x) : f(sx) != s f(x)}.

    Branch and bound over injections; the partial cost of closed pairs is a
    lower bound and the greedy injection seeds the incumbent.

    :param limit: Largest |X| searched exactly; defaults to config.
    :raises BudgetExceededError: when the smaller set is larger than ``limit``.
    """
    limit = INJECTION_SEARCH_LIMIT if limit is None else limit
    X, Y = _oriented(X, Y)
    if X.size > limit:
        logger.warning("exact d_S refused for |X| = %d", X.size)
        raise BudgetExceededError("exact injection search", X.size, limit)
    if X.size == 0:
        return Fraction(0)
    fx, bx = _tables(X)
    fy, _ = _tables(Y)
    order = _assignment_order(X)
    best = [int(gset_distance_upper_bound(X, Y) * X.size)]
    f, used = {}, set()

    def search(depth, cost):
        if cost >= best[0]:
            return
        if depth == len(order):
            best[0] = cost
            return
        x = order[depth]
        for y in range(Y.size):
            if y in used:
                continue
            added = _added_cost(x, y, f, fx, fy, bx)
            f[x] = y
            used.add(y)
            search(depth + 1, cost + added)
            del f[x]
            used.discard(y)
            if best[0] == 0:
                return

    search(0, 0)
    return Fraction(best[0], X.size)


def isomorphic_gsets(X, Y):
    """Colour-preserving isomorphism of the two action graphs (VF2)."""
    if X.k != Y.k or X.size != Y.size:
        return False
    matcher = MultiDiGraphMatcher(
        build_graph(X.action),
        build_graph(Y.action),
        edge_match=categorical_multiedge_match("label", None),
    )
    return matcher.is_isomorphic()


def random_stabilizer_marginal(X, spec):
    """
    mu_X(C_{A,B}): the fraction of points whose stabilizer meets A in exactly B.
    """
    if X.size == 0:
        return Fraction(0)
    images = {w: evaluate(w, X.action).images for w in spec.A}
    target = frozenset(spec.B)
    hits = 0
    for x in range(X.size):
        fixed = frozenset(w for w in spec.A if images[w][x] == x)
        if fixed == target:
            hits += 1
    return Fraction(hits, X.size)


def random_stabilizer_marginals(X, specs):
    return [random_stabilizer_marginal(X, spec) for spec in specs]
