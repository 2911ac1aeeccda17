"""
JSON and CSV output for local statistics, verdicts and separator reports.
Rationals are written as "p/q" strings so no precision is lost.
"""

import dataclasses
import json
from fractions import Fraction

import pandas as pd

from encoders.text_formats import format_permutation, format_tuple
from modules.local_stats import LocalStats
from modules.perm_core import Permutation, PermTuple
from modules.word_engine import parse_word

IDENTITY_LABEL = "1"


def fraction_to_str(value):
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def str_to_fraction(text):
    return Fraction(text)


def _default(obj):
    if isinstance(obj, Fraction):
        return fraction_to_str(obj)
    if isinstance(obj, PermTuple):
        return format_tuple(obj).split("\n")
    if isinstance(obj, Permutation):
        return format_permutation(obj)
    if dataclasses.is_dataclass(obj):
        return {f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)}
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    return str(obj)


def dumps(obj, **kwargs):
    """json.dumps that understands Fractions, tuples of permutations and dataclasses."""
    return json.dumps(obj, default=_default, sort_keys=True, **kwargs)


def local_stats_to_dict(stats):
    """
    {"probe": [...words], "atoms": [{"subset": [...words], "weight": "p/q"}]};
    the identity word is written as "".
    """
    return {
        "probe": [str(w) for w in stats.probe],
        "atoms": [
            {"subset": [str(w) for w in stats.probe.words_of(mask)], "weight": fraction_to_str(weight)}
            for mask, weight in stats.atoms
        ],
    }


def local_stats_from_dict(data, probe):
    """Inverse of local_stats_to_dict for a known probe set."""
    alphabet = probe.words[0].alphabet
    atoms = []
    for atom in data["atoms"]:
        words = [parse_word(text, alphabet) for text in atom["subset"]]
        atoms.append((probe.mask_of(words), str_to_fraction(atom["weight"])))
    return LocalStats(probe, tuple(atoms))


def local_stats_to_frame(stats):
    """One row per atom: subset (space separated, identity as "1"), exact and float weight."""
    rows = []
    for mask, weight in stats.atoms:
        words = [str(w) or IDENTITY_LABEL for w in stats.probe.words_of(mask)]
        rows.append(
            {
                "subset": " ".join(words),
                "size": len(words),
                "weight": fraction_to_str(weight),
                "weight_float": float(weight),
            }
        )
    return pd.DataFrame(rows, columns=["subset", "size", "weight", "weight_float"])


def verdict_to_dict(verdict, include_transcript=False):
    data = {
        "accepted": verdict.accepted,
        "queries_used": verdict.queries_used,
        "query_budget": verdict.query_budget,
        "seed": verdict.seed,
    }
    if verdict.min_tv is not None:
        data["min_tv"] = fraction_to_str(verdict.min_tv)
        data["approximate_comparison"] = verdict.approximate_comparison
        data["comparison_seconds"] = verdict.comparison_seconds
    if include_transcript and verdict.transcript is not None:
        data["transcript"] = [
            {"generator": i, "inverse": inverted, "point": x + 1, "answer": y + 1}
            for (i, inverted, x), y in verdict.transcript
        ]
    return data


def separator_report_to_dict(report):
    return {
        "completeness_rate": report.completeness_rate,
        "soundness_rate": report.soundness_rate,
        "max_queries": report.max_queries,
        "query_budget": report.query_budget,
        "confidence": report.confidence,
        "ok": report.ok(),
        "instances": [
            {
                "label": r.label,
                "positive": r.positive,
                "trials": r.trials,
                "accepted": r.accepted,
                "correct_rate": r.correct_rate,
                "interval": list(r.interval),
                "max_queries": r.max_queries,
                "violates_contract": r.violates_contract,
            }
            for r in report.instances
        ],
    }


def write_csv(frame, path, header_comment=None):
    """
    Writes ``frame`` with an optional leading ``# config: ...`` line.
    Line endings are fixed to \\n so identical inputs give identical bytes.
    """
    with open(path, "w", newline="") as handle:
        if header_comment is not None:
            handle.write(f"# config: {header_comment}\n")
        frame.to_csv(handle, index=False, lineterminator="\n")


def read_csv(path):
    return pd.read_csv(path, comment="#", dtype=str, keep_default_na=False)
