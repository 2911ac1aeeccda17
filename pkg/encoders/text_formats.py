"""
Text and JSON input formats. Points are 1-based here and 0-based everywhere
past this module.

Permutation: image list ``2 3 1``, cycle notation ``(1 2 3)(4 5)`` or ``()``.
Tuple: one permutation per line or separated by ``;``, or a JSON array.
System: first line the alphabet, then relator words (whitespace or comma
separated), or JSON ``{"alphabet": "xy", "relators": ["xyXY"]}``, or a
built-in name.
"""

import json
import re
from pathlib import Path

from modules.errors import ParseError
from modules.gsets import GSet, MarginalSpec
from modules.named_systems import is_named_system, named_system_text
from modules.perm_core import Permutation, PermTuple
from modules.solution_space import EquationSystem
from modules.word_engine import Alphabet, parse_word

_CYCLE = re.compile(r"\(([^()]*)\)")


def _points(text, where):
    points = []
    for token in text.replace(",", " ").split():
        if not token.isdigit():
            raise ParseError(f"bad point {token!r} in {where!r}")
        value = int(token)
        if value < 1:
            raise ParseError(f"points are 1-based, got {value} in {where!r}")
        points.append(value - 1)
    return points


def _parse_cycles(text):
    stripped = text.strip()
    cycles = [_points(body, stripped) for body in _CYCLE.findall(stripped)]
    leftover = _CYCLE.sub("", stripped).strip()
    if leftover:
        raise ParseError(f"unexpected text {leftover!r} in cycle notation {stripped!r}")
    for cycle in cycles:
        if len(set(cycle)) != len(cycle):
            raise ParseError(f"repeated point in cycle notation {stripped!r}")
    return cycles


def permutation_degree_hint(text):
    """Largest point mentioned, used to size cycle notation."""
    numbers = [int(t) for t in re.findall(r"\d+", text)]
    return max(numbers, default=0)


def parse_permutation(text, n=None):
    """
    Reads one permutation.

    :param n: Degree for cycle notation; defaults to the largest point.
    :return: Permutation (0-based).
    """
    text = text.strip()
    if text.startswith("("):
        cycles = _parse_cycles(text)
        degree = n if n is not None else permutation_degree_hint(text)
        if any(x >= degree for c in cycles for x in c):
            raise ParseError(f"cycle point beyond degree {degree} in {text!r}")
        result = Permutation.identity(degree)
        # cycles compose right to left, as products of cycles are read
        for cycle in cycles:
            result = result * Permutation.from_cycles([tuple(cycle)], degree)
        return result
    images = _points(text, text)
    if n is not None and len(images) != n:
        raise ParseError(f"image list {text!r} has {len(images)} entries, expected {n}")
    try:
        return Permutation(tuple(images))
    except ValueError:
        raise ParseError(f"image list {text!r} is not a permutation") from None


def format_permutation(perm, style="cycles"):
    if style == "images":
        return " ".join(str(y + 1) for y in perm.images)
    cycles = perm.cycles()
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(x + 1) for x in cycle) + ")" for cycle in cycles)


def _tuple_from_json(data):
    perms = []
    for entry in data:
        if isinstance(entry, str):
            perms.append(entry)
        elif isinstance(entry, list):
            perms.append(" ".join(str(v) for v in entry))
        else:
            raise ParseError(f"bad JSON tuple entry {entry!r}")
    return perms


def parse_tuple(text, n=None):
    """
    Reads a k-tuple of permutations. Cycle-notation entries share the degree
    ``n``, or the largest point over the whole tuple.
    """
    text = text.strip()
    if text.startswith("["):
        try:
            entries = _tuple_from_json(json.loads(text))
        except json.JSONDecodeError as e:
            raise ParseError(f"bad JSON tuple: {e}") from None
    else:
        entries = [e for e in re.split(r"[;\n]", text) if e.strip() and not e.strip().startswith("#")]
    if not entries:
        raise ParseError("empty permutation tuple")
    if n is None:
        image_lists = [e for e in entries if not e.strip().startswith("(")]
        if image_lists:
            n = len(image_lists[0].replace(",", " ").split())
        else:
            n = max(permutation_degree_hint(e) for e in entries)
    perms = tuple(parse_permutation(e, n) for e in entries)
    try:
        return PermTuple(perms)
    except ValueError as e:
        raise ParseError(str(e)) from None


def format_tuple(sigma, style="cycles"):
    return "\n".join(format_permutation(p, style) for p in sigma)


def parse_word_list(text, alphabet):
    return [parse_word(token, alphabet) for token in text.replace(",", " ").split()]


def parse_system(text, name=None):
    """Reads a system file body: alphabet line, then relators."""
    text = text.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
            alphabet = Alphabet.from_text(data["alphabet"])
            relator_text = " ".join(data["relators"])
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise ParseError(f"bad JSON system: {e}") from None
    else:
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
        if len(lines) < 2:
            raise ParseError("a system needs an alphabet line and at least one relator")
        alphabet = Alphabet.from_text(lines[0])
        relator_text = " ".join(lines[1:])
    relators = []
    for w in parse_word_list(relator_text, alphabet):
        if w.is_identity():
            raise ParseError("a relator reduces to the empty word")
        if w not in relators:
            relators.append(w)
    return EquationSystem(alphabet, tuple(relators), name)


def load_system(name_or_path):
    """A built-in system by name, or a system file."""
    if is_named_system(name_or_path):
        canonical = " ".join(name_or_path.replace(":", " ").replace("-", " ").split())
        return parse_system(named_system_text(name_or_path), canonical)
    path = Path(name_or_path)
    if not path.is_file():
        raise ParseError(f"{name_or_path!r} is neither a built-in system nor a file")
    return parse_system(path.read_text(), path.stem)


def load_tuple(text_or_path, n=None):
    path = Path(text_or_path)
    if len(text_or_path) < 256 and path.is_file():
        return parse_tuple(path.read_text(), n)
    return parse_tuple(text_or_path, n)


def load_gset(text_or_path, system=None):
    return GSet(load_tuple(text_or_path), system)


def parse_marginal(a_text, b_text, alphabet):
    return MarginalSpec(tuple(parse_word_list(a_text, alphabet)), tuple(parse_word_list(b_text, alphabet)))
