"""
Query-counted randomized testers: Sample and Substitute (SAS) and the Local
Statistics Matcher (LSM), plus a harness that measures completeness and
soundness on labeled instances.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.stats import binomtest

from config import (
    COMPLETENESS_TARGET,
    CONFIDENCE_LEVEL,
    ENUMERATION_CEILING,
    LSM_CONCENTRATION_THRESHOLD,
    SAS_BATCH_CELLS,
    SOUNDNESS_TARGET,
)
from modules.errors import (
    ArityError,
    BudgetExceededError,
    NoComparisonSolutionsError,
    UncertifiedInstanceError,
)
from modules.local_stats import empirical_local_stats, exact_local_stats, tv_distance
from modules.perm_core import QueryOracle
from modules.seeding import create_rng, derive_seed, ensure_rng
from modules.solution_space import (
    FarInstance,
    PlantedInstance,
    ZERO_FLEX,
    commutator_family_solution,
    abelian_family_applies,
    defect,
    dist_to_solutions,
    enumerate_solutions,
    is_solution,
)
from modules.word_engine import evaluate, evaluate_point_counted

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TesterVerdict:
    accepted: bool
    queries_used: int
    query_budget: int
    seed: int = None
    transcript: tuple = None
    min_tv: Fraction = None
    approximate_comparison: bool = False
    comparison_seconds: float = None

    def within_budget(self):
        return self.queries_used <= self.query_budget


@dataclass(frozen=True)
class SasConfig:
    system: object
    repetition: int = 1

    def __post_init__(self):
        if self.repetition < 1:
            raise ValueError(f"repetition must be >= 1, got {self.repetition}")

    @property
    def query_budget(self):
        """s * max |w| over the relators."""
        return self.repetition * self.system.max_relator_length()


@dataclass(frozen=True)
class SolutionSource:
    """
    Where LSM gets the solutions it compares against.

    kind "exhaustive" enumerates Sol_E(n) within ``ceiling``; "provided" uses
    ``solutions``; "sampled" draws ``samples`` members of the common-cycle
    family. Only the exhaustive source yields an exact minimum.
    """

    kind: str = "exhaustive"
    solutions: tuple = ()
    samples: int = 64
    ceiling: int = ENUMERATION_CEILING
    seed: int = 0

    def comparison_set(self, system, n):
        """
        :return: ``(solutions, exact)`` for degree n.
        """
        if self.kind == "exhaustive":
            try:
                return enumerate_solutions(system, n, self.ceiling), True
            except BudgetExceededError:
                raise NoComparisonSolutionsError(
                    f"Sol({system.label()}, {n}) is beyond the enumeration budget"
                ) from None
        if self.kind == "provided":
            pool = tuple(t for t in self.solutions if t.n == n)
            if not pool:
                raise NoComparisonSolutionsError(f"no provided solutions of degree {n}")
            return pool, False
        if self.kind == "sampled":
            if not abelian_family_applies(system):
                raise NoComparisonSolutionsError(
                    f"no sampled solution family is known for {system.label()}"
                )
            rng = create_rng(self.seed, "comparison", n)
            pool = tuple(commutator_family_solution(n, rng, system.k) for _ in range(self.samples))
            return pool, False
        raise ValueError(f"unknown solution source {self.kind!r}")


@dataclass(frozen=True)
class LsmConfig:
    system: object
    probe: object
    repetition: int = 1
    delta: Fraction = Fraction(1, 20)
    solution_source: SolutionSource = field(default_factory=SolutionSource)

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        if self.repetition < 1:
            raise ValueError(f"repetition must be >= 1, got {self.repetition}")
        if self.delta <= 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if len(self.probe) == 0:
            raise ValueError("the probe set must be nonempty")

    @property
    def query_budget(self):
        """s * sum of |w| over the probe."""
        return self.repetition * self.probe.query_cost()


def _check_arity(system, oracle):
    if system.k != oracle.k:
        raise ArityError(f"system over {system.k} generators, tuple of {oracle.k}")


def _transcript(oracle):
    return tuple(oracle.transcript) if oracle.record else None


def sas_run(cfg, oracle, seed):
    """
    Sample and Substitute: draws s pairs (w, x) uniformly from E x [n] and
    accepts iff every w(sigma) x = x.
    """
    _check_arity(cfg.system, oracle)
    rng = ensure_rng(seed)
    relators = cfg.system.relators
    start = oracle.count
    accepted = True
    for _ in range(cfg.repetition):
        w = relators[int(rng.integers(0, len(relators)))]
        x = int(rng.integers(0, oracle.n))
        if evaluate_point_counted(w, oracle, x) != x:
            accepted = False
    return TesterVerdict(
        accepted=accepted,
        queries_used=oracle.count - start,
        query_budget=cfg.query_budget,
        seed=seed if isinstance(seed, int) else None,
        transcript=_transcript(oracle),
    )


def check_failure_rate(system, sigma):
    """
    Fraction of pairs (w, x) in E x [n] with w(sigma) x != x. Equals the
    defect, counted here by direct enumeration.
    """
    failures = 0
    for w in system.relators:
        images = evaluate(w, sigma).images
        failures += sum(1 for x, y in enumerate(images) if x != y)
    return Fraction(failures, len(system.relators) * sigma.n)


def sas_accept_probability(cfg, sigma):
    """
    Exact acceptance probability (1 - defect)^s: the s checks are independent
    and each fails with probability equal to the defect.
    """
    return (1 - defect(cfg.system, sigma)) ** cfg.repetition


def sas_reject_probability(cfg, sigma):
    return 1 - sas_accept_probability(cfg, sigma)


def amplified_repetition(failure_rate, target=SOUNDNESS_TARGET):
    """
    Smallest s with (1 - failure_rate)^s <= 1 - target.

    :param failure_rate: Per-check rejection probability, in (0, 1].
    """
    failure_rate = Fraction(failure_rate)
    if failure_rate <= 0:
        raise ValueError("amplification needs a positive failure rate")
    if failure_rate == 1:
        return 1
    slack = Fraction(1) - Fraction(target).limit_denominator(10**9)
    s = max(1, math.ceil(math.log(float(slack)) / math.log(float(1 - failure_rate))))
    while (1 - failure_rate) ** s > slack:
        s += 1
    while s > 1 and (1 - failure_rate) ** (s - 1) <= slack:
        s -= 1
    return s


@lru_cache(maxsize=256)
def comparison_stats(source, system, probe, n):
    """Distinct N_{tau,P} over the comparison set, and whether the set is exact."""
    solutions, exact = source.comparison_set(system, n)
    distinct = {exact_local_stats(tau, probe) for tau in solutions}
    return tuple(sorted(distinct, key=lambda stats: stats.atoms)), exact


def lsm_min_tv(cfg, empirical, n):
    """
    min over the comparison set of TV(empirical, N_{tau,P}).

    :return: ``(min_tv, exact_comparison)``.
    """
    distributions, exact = comparison_stats(cfg.solution_source, cfg.system, cfg.probe, n)
    best = None
    for stats in distributions:
        d = tv_distance(empirical, stats)
        if best is None or d < best:
            best = d
            if best == 0:
                break
    return best, exact


def lsm_run(cfg, oracle, seed):
    """
    Local Statistics Matcher: samples s points, reads their stabilizer traces
    on the probe through the oracle and accepts iff the empirical distribution
    is within delta of some solution's exact distribution.
    """
    _check_arity(cfg.system, oracle)
    if cfg.repetition < LSM_CONCENTRATION_THRESHOLD:
        logger.debug("LSM with s=%d may reject solutions by sampling noise", cfg.repetition)
    rng = ensure_rng(seed)
    start = oracle.count
    empirical = empirical_local_stats(oracle, cfg.probe, cfg.repetition, rng)
    queries = oracle.count - start
    clock = time.perf_counter()
    min_tv, exact = lsm_min_tv(cfg, empirical, oracle.n)
    elapsed = time.perf_counter() - clock
    if not exact:
        logger.warning("LSM verdict uses an approximate comparison set")
    return TesterVerdict(
        accepted=min_tv <= cfg.delta,
        queries_used=queries,
        query_budget=cfg.query_budget,
        seed=seed if isinstance(seed, int) else None,
        transcript=_transcript(oracle),
        min_tv=min_tv,
        approximate_comparison=not exact,
        comparison_seconds=elapsed,
    )


def run_tester(cfg, oracle, seed):
    if isinstance(cfg, SasConfig):
        return sas_run(cfg, oracle, seed)
    if isinstance(cfg, LsmConfig):
        return lsm_run(cfg, oracle, seed)
    raise TypeError(f"not a tester configuration: {cfg!r}")


def run_trials(cfg, sigma, trials, seed, record=False):
    """
    Independent runs on ``sigma``; run i uses the seed derived from (seed, i).
    """
    verdicts = []
    for trial in range(trials):
        oracle = QueryOracle(sigma, record=record)
        verdicts.append(run_tester(cfg, oracle, derive_seed(seed, trial)))
    return verdicts


def estimate_acceptance(cfg, sigma, trials, seed):
    """Monte Carlo acceptance frequency and the largest query count seen."""
    verdicts = run_trials(cfg, sigma, trials, seed)
    accepted = sum(v.accepted for v in verdicts)
    return accepted / trials, max(v.queries_used for v in verdicts)


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    accepted: int
    total_queries: int
    max_queries: int

    @property
    def accept_rate(self):
        return self.accepted / self.trials

    @property
    def mean_queries(self):
        return self.total_queries / self.trials


def sas_pass_table(system, sigma):
    """Boolean array of shape (|E|, n): entry [j, x] says relator j fixes x."""
    _check_arity(system, sigma)
    images = np.array([evaluate(w, sigma).images for w in system.relators])
    return images == np.arange(sigma.n)


def sas_batch(cfg, sigma, trials, seed, batch_cells=SAS_BATCH_CELLS):
    """
    SAS run ``trials`` times in bulk.

    The (relator, point) verdicts are tabulated once; every trial's s draws
    then come from one generator in (trials, s) blocks. Queries per trial are
    the summed lengths of the drawn relators, the same count sas_run reports.

    :return: TrialSummary.
    """
    passes = sas_pass_table(cfg.system, sigma)
    lengths = np.array([len(w) for w in cfg.system.relators])
    rng = ensure_rng(seed)
    s = cfg.repetition
    block = max(1, batch_cells // s)
    accepted = total = worst = 0
    done = 0
    while done < trials:
        size = min(block, trials - done)
        relators = rng.integers(0, len(lengths), size=(size, s))
        points = rng.integers(0, sigma.n, size=(size, s))
        accepted += int(passes[relators, points].all(axis=1).sum())
        queries = lengths[relators].sum(axis=1)
        total += int(queries.sum())
        worst = max(worst, int(queries.max()))
        done += size
    return TrialSummary(trials, accepted, total, worst)


def summarize_trials(cfg, sigma, trials, seed):
    """TrialSummary for any tester; SAS goes through sas_batch."""
    if isinstance(cfg, SasConfig):
        return sas_batch(cfg, sigma, trials, seed)
    verdicts = run_trials(cfg, sigma, trials, seed)
    queries = [v.queries_used for v in verdicts]
    return TrialSummary(trials, sum(v.accepted for v in verdicts), sum(queries), max(queries))


def wilson_interval(successes, trials, confidence=CONFIDENCE_LEVEL):
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return ci.low, ci.high


@dataclass(frozen=True)
class InstanceReport:
    label: str
    positive: bool
    trials: int
    accepted: int
    correct_rate: float
    interval: tuple
    max_queries: int
    violates_contract: bool


@dataclass(frozen=True)
class SeparatorReport:
    instances: tuple
    completeness_rate: float
    soundness_rate: float
    max_queries: int
    query_budget: int
    confidence: float

    @property
    def violations(self):
        return [r for r in self.instances if r.violates_contract]

    def ok(self):
        return not self.violations and self.max_queries <= self.query_budget


def _certify_negative(system, item, eps, index):
    if isinstance(item, FarInstance):
        return item.sigma
    if isinstance(item, PlantedInstance):
        item = item.sigma
    if eps is None:
        raise UncertifiedInstanceError(f"negative #{index} needs eps to be certified far")
    try:
        distance = dist_to_solutions(system, item, ZERO_FLEX, eps)
    except BudgetExceededError:
        raise UncertifiedInstanceError(
            f"negative #{index} of degree {item.n} cannot be certified within budget"
        ) from None
    if distance < Fraction(eps):
        raise UncertifiedInstanceError(
            f"negative #{index} is only {distance} from a solution (< eps = {eps})"
        )
    return item


def _instance_report(cfg, sigma, positive, label, trials, seed, confidence):
    target = COMPLETENESS_TARGET if positive else SOUNDNESS_TARGET
    verdicts = run_trials(cfg, sigma, trials, seed)
    accepted = sum(v.accepted for v in verdicts)
    correct = accepted if positive else trials - accepted
    low, high = wilson_interval(correct, trials, confidence)
    violates = high < target
    if violates:
        logger.warning("%s violates the %.2f contract (upper bound %.4f)", label, target, high)
    return InstanceReport(
        label=label,
        positive=positive,
        trials=trials,
        accepted=accepted,
        correct_rate=correct / trials,
        interval=(low, high),
        max_queries=max(v.queries_used for v in verdicts),
        violates_contract=violates,
    )


def validate_separator(cfg, positives, negatives, trials, seed, eps=None, confidence=CONFIDENCE_LEVEL):
    """
    Runs the tester on solutions and on certified-far tuples.

    An instance violates the contract when the Wilson upper bound of its
    correct-decision rate lies below the 0.99 target.

    :param positives: Tuples that must be solutions of ``cfg.system``.
    :param negatives: FarInstance values, or tuples / planted instances
        that are certified here by exact dist_to_solutions >= eps.
    :raises UncertifiedInstanceError: for a negative that cannot be certified.
    """
    system = cfg.system
    for index, sigma in enumerate(positives):
        if not is_solution(system, sigma):
            raise UncertifiedInstanceError(f"positive #{index} is not a solution")
    certified = [_certify_negative(system, item, eps, i) for i, item in enumerate(negatives)]
    reports = []
    for index, sigma in enumerate(positives):
        reports.append(
            _instance_report(cfg, sigma, True, f"positive#{index}", trials, derive_seed(seed, 0, index), confidence)
        )
    for index, sigma in enumerate(certified):
        reports.append(
            _instance_report(cfg, sigma, False, f"negative#{index}", trials, derive_seed(seed, 1, index), confidence)
        )

    def pooled(positive):
        chosen = [r for r in reports if r.positive == positive]
        if not chosen:
            return float("nan")
        return sum(r.correct_rate * r.trials for r in chosen) / sum(r.trials for r in chosen)

    return SeparatorReport(
        instances=tuple(reports),
        completeness_rate=pooled(True),
        soundness_rate=pooled(False),
        max_queries=max((r.max_queries for r in reports), default=0),
        query_budget=cfg.query_budget,
        confidence=confidence,
    )

