import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from multiprocessing import Pool

import pandas as pd
import yaml
from tqdm import tqdm

from config import (
    DEFAULT_DELTA,
    DEFAULT_FAR_EPS,
    DEFAULT_TRIALS,
    LSM_CONCENTRATION_THRESHOLD,
    SWEEP_WORKERS,
)
from encoders.json_codec import fraction_to_str
from encoders.text_formats import load_system
from modules.errors import BudgetExceededError, ParseError
from modules.local_stats import ProbeSet
from modules.perm_core import random_tuple
from modules.seeding import create_rng, derive_seed
from modules.solution_space import (
    FlexBudget,
    dist_to_solutions,
    nearest_solution,
    plant_near_solution,
    random_far_tuple,
    defect,
)
from modules.testers import (
    LsmConfig,
    SasConfig,
    SolutionSource,
    check_failure_rate,
    run_trials,
    sas_accept_probability,
    summarize_trials,
    validate_separator,
    wilson_interval,
)

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "system",
    "n",
    "s",
    "P_radius",
    "delta",
    "instance_model",
    "corruption",
    "accept_rate",
    "reject_rate",
    "mean_queries",
    "exact_defect",
    "exact_dist_to_sol",
]

INSTANCE_MODELS = ("solutions", "planted", "random", "far-certified")


def _as_list(value):
    """Accepts a scalar, a list, or an inclusive range string "3..6"."""
    if isinstance(value, list):
        return value
    if isinstance(value, str) and ".." in value:
        low, high = value.split("..")
        return list(range(int(low), int(high) + 1))
    return [value]


@dataclass
class ExperimentSpec:
    """
    One experiment or sweep. List-valued fields are sweep axes; a single
    experiment uses their first entries.
    """

    systems: list = field(default_factory=lambda: ["commutator"])
    n: list = field(default_factory=lambda: [3])
    tester: str = "sas"
    s: list = None
    probe_radius: list = field(default_factory=lambda: [2])
    delta: list = field(default_factory=lambda: [DEFAULT_DELTA])
    instance_models: list = field(default_factory=lambda: ["planted"])
    corruption: list = field(default_factory=lambda: [0])
    flex: str = "zero"
    far_eps: str = DEFAULT_FAR_EPS
    solution_source: str = "exhaustive"
    trials: int = DEFAULT_TRIALS
    seed: int = None
    out: str = None
    format: str = "json"
    workers: int = SWEEP_WORKERS

    def __post_init__(self):
        if self.s is None:
            # LSM needs enough samples to concentrate; one SAS check is the minimum
            self.s = [LSM_CONCENTRATION_THRESHOLD] if self.tester == "lsm" else [1]
        for name in ("systems", "n", "s", "probe_radius", "delta", "instance_models", "corruption"):
            setattr(self, name, _as_list(getattr(self, name)))
        self.n = [int(v) for v in self.n]
        self.s = [int(v) for v in self.s]
        self.probe_radius = [int(v) for v in self.probe_radius]
        self.corruption = [int(v) for v in self.corruption]
        self.delta = [str(Fraction(str(v))) for v in self.delta]
        if self.seed is None:
            raise ParseError("an experiment spec needs a seed")
        if self.tester not in ("sas", "lsm"):
            raise ParseError(f"unknown tester {self.tester!r}")
        for model in self.instance_models:
            if model not in INSTANCE_MODELS:
                raise ParseError(f"unknown instance model {model!r}")
        if self.format not in ("json", "csv"):
            raise ParseError(f"unknown output format {self.format!r}")
        FlexBudget.parse(self.flex)

    def echo(self):
        return asdict(self)


def load_spec(path, overrides=None):
    """
    Reads a YAML (or JSON) experiment spec and applies non-None overrides.

    :param path: Spec file, or None for defaults plus overrides.
    :param overrides: Mapping of field name to value from the command line.
    :return: ExperimentSpec.
    """
    data = {}
    if path is not None:
        try:
            with open(path) as handle:
                data = yaml.safe_load(handle) or {}
        except yaml.YAMLError as e:
            raise ParseError(f"bad experiment spec {path}: {e}") from None
        if not isinstance(data, dict):
            raise ParseError(f"experiment spec {path} is not a mapping")
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    try:
        return ExperimentSpec(**data)
    except TypeError as e:
        raise ParseError(f"bad experiment spec: {e}") from None


def build_tester(spec, system, s, radius, delta):
    if spec.tester == "sas":
        return SasConfig(system, s)
    probe = ProbeSet.from_radius(system.alphabet, radius)
    source = SolutionSource(kind=spec.solution_source, seed=spec.seed)
    return LsmConfig(system, probe, s, Fraction(delta), source)


def build_instance(system, n, model, corruption, rng, far_eps):
    """Returns the tuple under test for one instance model."""
    if model == "solutions":
        return plant_near_solution(system, n, 0, rng).sigma
    if model == "planted":
        return plant_near_solution(system, n, corruption, rng).sigma
    if model == "random":
        return random_tuple(system.k, n, rng)
    return random_far_tuple(system, n, Fraction(far_eps), rng).sigma


@dataclass(frozen=True)
class SweepCell:
    system: str
    n: int
    s: int
    radius: object
    delta: object
    model: str
    corruption: int

    def key(self):
        return f"{self.system}|{self.n}|{self.s}|{self.radius}|{self.delta}|{self.model}|{self.corruption}"

    def sort_key(self):
        return (
            self.system,
            self.n,
            self.s,
            -1 if self.radius == "" else self.radius,
            "" if self.delta == "" else Fraction(self.delta),
            self.model,
            self.corruption,
        )


def build_sweep_grid(spec):
    """All cells of the sweep. Tester-irrelevant axes collapse to ""."""
    radii = spec.probe_radius if spec.tester == "lsm" else [""]
    deltas = spec.delta if spec.tester == "lsm" else [""]
    cells = []
    for system, n, s, radius, delta, model in product(
        spec.systems, spec.n, spec.s, radii, deltas, spec.instance_models
    ):
        corruptions = spec.corruption if model == "planted" else [0]
        for m in corruptions:
            cells.append(SweepCell(system, n, s, radius, delta, model, m))
    return sorted(set(cells), key=SweepCell.sort_key)


def cell_instance(spec, cell, system):
    rng = create_rng(spec.seed, cell.system, cell.n, cell.model, cell.corruption, "instance")
    return build_instance(system, cell.n, cell.model, cell.corruption, rng, spec.far_eps)


def exact_columns(spec, system, sigma):
    """exact_defect and exact_dist_to_sol as "p/q" strings; "" when over budget."""
    exact_defect = fraction_to_str(defect(system, sigma))
    try:
        distance = dist_to_solutions(system, sigma, FlexBudget.parse(spec.flex), Fraction(spec.far_eps))
        exact_dist = fraction_to_str(distance)
    except BudgetExceededError:
        logger.warning("dist_to_solutions over budget for %s, n=%d", system.label(), sigma.n)
        exact_dist = ""
    return exact_defect, exact_dist


def run_cell(args):
    spec, cell = args
    system = load_system(cell.system)
    sigma = cell_instance(spec, cell, system)
    tester = build_tester(spec, system, cell.s, cell.radius, cell.delta or DEFAULT_DELTA)
    summary = summarize_trials(tester, sigma, spec.trials, derive_seed(spec.seed, cell.key(), "trials"))
    exact_defect, exact_dist = exact_columns(spec, system, sigma)
    return {
        "system": cell.system,
        "n": cell.n,
        "s": cell.s,
        "P_radius": cell.radius,
        "delta": cell.delta,
        "instance_model": cell.model,
        "corruption": cell.corruption,
        "accept_rate": f"{summary.accept_rate:.6f}",
        "reject_rate": f"{(summary.trials - summary.accepted) / summary.trials:.6f}",
        "mean_queries": f"{summary.mean_queries:.6f}",
        "exact_defect": exact_defect,
        "exact_dist_to_sol": exact_dist,
    }


def run_sweep(spec, progress=False):
    """
    Runs every sweep cell, in a worker pool when ``spec.workers`` > 1, and
    returns the rows sorted by sweep key.

    :return: pandas DataFrame with SWEEP_COLUMNS.
    """
    cells = build_sweep_grid(spec)
    logger.info("sweep of %d cells, %d trials each", len(cells), spec.trials)
    jobs = [(spec, cell) for cell in cells]
    if spec.workers > 1:
        with Pool(spec.workers) as pool:
            rows = list(tqdm(pool.imap(run_cell, jobs), total=len(jobs), disable=not progress))
    else:
        rows = [run_cell(job) for job in tqdm(jobs, disable=not progress)]
    order = {cell.key(): i for i, cell in enumerate(cells)}
    rows.sort(
        key=lambda r: order[
            SweepCell(r["system"], r["n"], r["s"], r["P_radius"], r["delta"], r["instance_model"], r["corruption"]).key()
        ]
    )
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def verify_sweep(spec, table):
    """
    Recomputes exact_defect (by enumerating E x [n]) and exact_dist_to_sol
    (through the witness search) for every row.

    :return: DataFrame of the rows whose exact columns disagree; empty when all agree.
    """
    bad = []
    for _, row in table.iterrows():
        radius = "" if row["P_radius"] in ("", None) else int(row["P_radius"])
        cell = SweepCell(
            row["system"], int(row["n"]), int(row["s"]), radius, row["delta"],
            row["instance_model"], int(row["corruption"]),
        )
        system = load_system(cell.system)
        sigma = cell_instance(spec, cell, system)
        expected_defect = fraction_to_str(check_failure_rate(system, sigma))
        try:
            found = nearest_solution(system, sigma, FlexBudget.parse(spec.flex), Fraction(spec.far_eps))
            expected_dist = fraction_to_str(found.distance)
        except BudgetExceededError:
            expected_dist = ""
        if row["exact_defect"] != expected_defect or row["exact_dist_to_sol"] != expected_dist:
            bad.append(row)
    return pd.DataFrame(bad, columns=table.columns)


def run_single_experiment(spec):
    """
    One tester on one instance: the first entry of every sweep axis.

    :return: Report dict with config echo, rates, Wilson interval and query
        statistics; SAS reports also carry the exact acceptance probability.
    """
    cell = build_sweep_grid(
        ExperimentSpec(**{**spec.echo(), **{
            "systems": spec.systems[:1], "n": spec.n[:1], "s": spec.s[:1],
            "probe_radius": spec.probe_radius[:1], "delta": spec.delta[:1],
            "instance_models": spec.instance_models[:1], "corruption": spec.corruption[:1],
        }})
    )[0]
    system = load_system(cell.system)
    sigma = cell_instance(spec, cell, system)
    tester = build_tester(spec, system, cell.s, cell.radius, cell.delta or DEFAULT_DELTA)
    verdicts = run_trials(tester, sigma, spec.trials, derive_seed(spec.seed, cell.key(), "trials"))
    accepted = sum(v.accepted for v in verdicts)
    low, high = wilson_interval(accepted, spec.trials)
    queries = [v.queries_used for v in verdicts]
    exact_defect, exact_dist = exact_columns(spec, system, sigma)
    report = {
        "config": spec.echo(),
        "seed": spec.seed,
        "system": system.label(),
        "n": cell.n,
        "instance_model": cell.model,
        "corruption": cell.corruption,
        "trials": spec.trials,
        "accept_rate": accepted / spec.trials,
        "reject_rate": (spec.trials - accepted) / spec.trials,
        "accept_interval": [low, high],
        "query_budget": tester.query_budget,
        "max_queries": max(queries),
        "mean_queries": sum(queries) / len(queries),
        "budget_violations": sum(1 for v in verdicts if not v.within_budget()),
        "exact_defect": exact_defect,
        "exact_dist_to_sol": exact_dist,
    }
    if isinstance(tester, SasConfig):
        report["exact_accept_probability"] = fraction_to_str(sas_accept_probability(tester, sigma))
    else:
        report["approximate_comparison"] = any(v.approximate_comparison for v in verdicts)
        report["comparison_seconds"] = sum(v.comparison_seconds for v in verdicts)
    return report


def validate_experiment(spec, positives=4, negatives=4):
    """
    Separator check for the first cell: random solutions against
    certified far_eps-far tuples.
    """
    system = load_system(spec.systems[0])
    n = spec.n[0]
    tester = build_tester(spec, system, spec.s[0], spec.probe_radius[0], spec.delta[0])
    rng = create_rng(spec.seed, "validate")
    pos = [plant_near_solution(system, n, 0, rng).sigma for _ in range(positives)]
    neg = [random_far_tuple(system, n, Fraction(spec.far_eps), rng) for _ in range(negatives)]
    return validate_separator(tester, pos, neg, spec.trials, spec.seed, eps=Fraction(spec.far_eps))
