"""
Equation systems, their exact solution sets for small degrees, the defect
functional, distances to solutions (plain and flexible) and generators of
planted or certified-far instances.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from sympy.combinatorics.named_groups import SymmetricGroup

from config import ENUMERATION_CEILING, FAR_SAMPLING_ATTEMPTS
from modules.errors import ArityError, BudgetExceededError, ParseError
from modules.perm_core import Permutation, PermTuple, dist, random_tuple, tuple_dist
from modules.seeding import ensure_rng
from modules.word_engine import evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EquationSystem:
    alphabet: object
    relators: tuple
    name: str = None

    def __post_init__(self):
        relators = tuple(self.relators)
        object.__setattr__(self, "relators", relators)
        if not relators:
            raise ParseError("an equation system needs at least one relator")
        if len(set(relators)) != len(relators):
            raise ParseError("relators must be pairwise distinct")
        for w in relators:
            if w.is_identity():
                raise ParseError("relators must be nonempty words")
            if w.alphabet != self.alphabet:
                raise ArityError(f"relator {w} is not over alphabet {self.alphabet}")

    @property
    def k(self):
        return self.alphabet.k

    def max_relator_length(self):
        return max(len(w) for w in self.relators)

    def label(self):
        return self.name or ",".join(str(w) for w in self.relators)

    def __str__(self):
        return self.label()


@dataclass(frozen=True)
class FlexBudget:
    """
    The window nu(eps, n) of admissible extra points.

    rule is one of "zero", "linear_eps_n" (floor(c*eps*n)), "linear_n"
    (floor(c*n)) or "unbounded".
    """

    rule: str = "zero"
    c: Fraction = Fraction(0)

    RULES = ("zero", "linear_eps_n", "linear_n", "unbounded")

    def __post_init__(self):
        if self.rule not in self.RULES:
            raise ParseError(f"unknown flex rule {self.rule!r}")
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c < 0:
            raise ParseError(f"flex constant must be >= 0, got {self.c}")

    @classmethod
    def parse(cls, text):
        """Reads ``zero``, ``linear:c``, ``n-linear:c`` or ``unbounded``."""
        text = text.strip()
        if text in ("zero", "unbounded"):
            return cls(text)
        head, _, constant = text.partition(":")
        rules = {"linear": "linear_eps_n", "n-linear": "linear_n"}
        if head not in rules or not constant:
            raise ParseError(f"bad flex rule {text!r}; use zero, linear:c, n-linear:c or unbounded")
        try:
            return cls(rules[head], Fraction(constant))
        except ValueError:
            raise ParseError(f"bad flex constant {constant!r}") from None

    def window(self, eps, n):
        """nu(eps, n); None stands for an unbounded window."""
        if self.rule == "zero":
            return 0
        if self.rule == "unbounded":
            return None
        if self.rule == "linear_n":
            return math.floor(self.c * n)
        if eps is None:
            raise ValueError("the linear_eps_n rule needs eps")
        return math.floor(self.c * Fraction(eps) * n)

    def __str__(self):
        names = {"linear_eps_n": "linear", "linear_n": "n-linear"}
        if self.rule in names:
            return f"{names[self.rule]}:{self.c}"
        return self.rule


ZERO_FLEX = FlexBudget()


def flex_window(flex, eps, n):
    """Largest admissible degree n + nu(eps, n), or None when unbounded."""
    extra = flex.window(eps, n)
    return None if extra is None else n + extra


def is_solution(system, sigma):
    """True iff every relator evaluates to the identity on sigma."""
    if system.k != sigma.k:
        raise ArityError(f"system over {system.k} generators, tuple of {sigma.k}")
    return all(evaluate(w, sigma).is_identity() for w in system.relators)


def defect(system, sigma):
    """
    Mean relator displacement (1/|E|) * sum_w d(w(sigma), id).

    Returns:
        Fraction: 0 exactly on solutions.
    """
    if system.k != sigma.k:
        raise ArityError(f"system over {system.k} generators, tuple of {sigma.k}")
    identity = Permutation.identity(sigma.n)
    total = sum((dist(evaluate(w, sigma), identity) for w in system.relators), Fraction(0))
    return total / len(system.relators)


def enumeration_size(k, n):
    return math.factorial(n) ** k


def check_enumeration_budget(k, n, ceiling=None):
    if n < 1:
        raise ValueError(f"degree must be >= 1, got {n}")
    ceiling = ENUMERATION_CEILING if ceiling is None else ceiling
    size = enumeration_size(k, n)
    if size > ceiling:
        logger.warning("refusing to enumerate Sym(%d)^%d (%d tuples)", n, k, size)
        raise BudgetExceededError(f"enumeration of Sym({n})^{k}", size, ceiling)
    return size


def _fixes_every_point(letters, tables, inverse_tables, n):
    for start in range(n):
        x = start
        for index, inverted in letters:
            x = (inverse_tables if inverted else tables)[index][x]
        if x != start:
            return False
    return True


@lru_cache(maxsize=64)
def _solutions(system, n):
    group = sorted(
        (tuple(p.array_form), tuple((~p).array_form)) for p in SymmetricGroup(n).generate()
    )
    perms = [images for images, _ in group]
    inverses = dict(group)
    # right-to-left letter order, 0-based coordinates
    programs = [
        tuple((g.index - 1, g.inverted) for g in reversed(w.letters)) for w in system.relators
    ]
    found = []
    for combo in product(perms, repeat=system.k):
        inverse_combo = [inverses[p] for p in combo]
        if all(_fixes_every_point(prog, combo, inverse_combo, n) for prog in programs):
            found.append(PermTuple(tuple(Permutation(p) for p in combo)))
    logger.debug("|Sol(%s, %d)| = %d", system.label(), n, len(found))
    return tuple(found)


def enumerate_solutions(system, n, ceiling=None):
    """
    Exactly Sol_E(n), in lexicographic order of the image lists.

    :param ceiling: Largest |Sym(n)|^k to scan; defaults to config.
    :return: Tuple of PermTuple.
    """
    check_enumeration_budget(system.k, n, ceiling)
    return _solutions(system, n)


@dataclass(frozen=True)
class SolutionDistance:
    distance: Fraction
    degree: int
    witness: PermTuple
    exhaustive: bool


def admissible_degrees(system, n, flex=ZERO_FLEX, eps=None, ceiling=None):
    """
    Degrees N with n <= N <= n + nu(eps, n), and whether the list is complete.

    An unbounded window is truncated at the largest degree the enumeration
    budget admits.
    """
    ceiling = ENUMERATION_CEILING if ceiling is None else ceiling
    top = flex_window(flex, eps, n)
    if top is not None:
        check_enumeration_budget(system.k, top, ceiling)
        return list(range(n, top + 1)), True
    check_enumeration_budget(system.k, n, ceiling)
    top = n
    while enumeration_size(system.k, top + 1) <= ceiling:
        top += 1
    logger.warning(
        "unbounded flex window truncated at degree %d by the enumeration budget", top
    )
    return list(range(n, top + 1)), False


def nearest_solution(system, sigma, flex=ZERO_FLEX, eps=None, ceiling=None):
    """
    Minimises tuple_dist(sigma, tau) over tau in Sol_E(N) for every admissible N.

    Ties go to the first minimum in (N, enumeration) order.
    """
    if system.k != sigma.k:
        raise ArityError(f"system over {system.k} generators, tuple of {sigma.k}")
    degrees, exhaustive = admissible_degrees(system, sigma.n, flex, eps, ceiling)
    best = None
    for degree in degrees:
        for tau in enumerate_solutions(system, degree, ceiling):
            d = tuple_dist(sigma, tau)
            if best is None or d < best.distance:
                best = SolutionDistance(d, degree, tau, exhaustive)
                if d == 0:
                    return best
    return best


def dist_to_solutions(system, sigma, flex=ZERO_FLEX, eps=None, ceiling=None):
    return nearest_solution(system, sigma, flex, eps, ceiling).distance


def in_near_solutions(system, sigma, eps, flex=ZERO_FLEX, ceiling=None):
    """Membership in Sol^{<eps, nu flex}(n); False means sigma is eps-far."""
    eps = Fraction(eps)
    return dist_to_solutions(system, sigma, flex, eps, ceiling) < eps


def flex_membership_grid(system, sigma, flex, eps_grid, ceiling=None):
    return {Fraction(eps): in_near_solutions(system, sigma, eps, flex, ceiling) for eps in eps_grid}


def abelian_family_applies(system):
    """
    True when every relator has exponent sum zero in every generator; then
    any tuple of powers of one common permutation is a solution.
    """
    _, generators = system.alphabet.free_group()
    return all(
        w.element().exponent_sum(g) == 0 for w in system.relators for g in generators
    )


def commutator_family_solution(n, rng, k=2):
    """Powers of a common uniformly random n-cycle."""
    order = [int(x) for x in rng.permutation(n)]
    cycle = Permutation.from_cycles([tuple(order)], n) if n > 1 else Permutation.identity(n)
    perms = []
    for _ in range(k):
        exponent = int(rng.integers(0, max(n, 1)))
        perms.append(Permutation.from_sympy(cycle.perm**exponent))
    return PermTuple(tuple(perms))


@dataclass(frozen=True)
class PlantedInstance:
    sigma: PermTuple
    base: PermTuple
    edits: tuple
    ground_truth: Fraction

    @property
    def corruption(self):
        return len(self.edits)


def _random_solution(system, n, rng, solutions=None, ceiling=None):
    if solutions:
        return solutions[int(rng.integers(0, len(solutions)))]
    try:
        pool = enumerate_solutions(system, n, ceiling)
    except BudgetExceededError:
        if not abelian_family_applies(system):
            raise
        logger.info("planting from the common-cycle family for %s, n=%d", system.label(), n)
        return commutator_family_solution(n, rng, system.k)
    return pool[int(rng.integers(0, len(pool)))]


def plant_near_solution(system, n, corruption, seed, solutions=None, ceiling=None):
    """
    A random solution followed by ``corruption`` random transposition edits.

    Each edit swaps the images of two distinct points in a random coordinate,
    so the result is within 2*corruption/n of its base in tuple distance.

    :param solutions: Optional explicit solution list to draw the base from.
    :return: PlantedInstance with the base, the edits and tuple_dist to the base.
    """
    if corruption < 0 or corruption > system.k * n:
        raise ValueError(f"corruption must be in [0, {system.k * n}], got {corruption}")
    rng = ensure_rng(seed)
    base = _random_solution(system, n, rng, solutions, ceiling)
    sigma = base
    edits = []
    for _ in range(corruption):
        if n < 2:
            break
        coordinate = int(rng.integers(0, system.k))
        a, b = (int(v) for v in rng.choice(n, size=2, replace=False))
        images = list(sigma[coordinate].images)
        images[a], images[b] = images[b], images[a]
        sigma = sigma.replace(coordinate, Permutation(tuple(images)))
        edits.append((coordinate, a, b))
    return PlantedInstance(sigma, base, tuple(edits), tuple_dist(sigma, base))


@dataclass(frozen=True)
class FarInstance:
    sigma: PermTuple
    distance: Fraction
    eps: Fraction


def random_far_tuple(system, n, eps, seed, flex=ZERO_FLEX, attempts=None, ceiling=None):
    """
    Rejection-samples uniform tuples until one is certified eps-far from
    Sol_E by exact minimisation.
    """
    eps = Fraction(eps)
    attempts = FAR_SAMPLING_ATTEMPTS if attempts is None else attempts
    rng = ensure_rng(seed)
    for _ in range(attempts):
        sigma = random_tuple(system.k, n, rng)
        distance = dist_to_solutions(system, sigma, flex, eps, ceiling)
        if distance >= eps:
            return FarInstance(sigma, distance, eps)
    raise BudgetExceededError(f"sampling a {eps}-far tuple for {system.label()}", attempts, attempts)
