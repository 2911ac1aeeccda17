"""
Reduced words in the free group on a finite alphabet.

Text format: a lowercase name is a generator, the same name in uppercase is
its inverse, and the empty string is the identity. Words act on points from
the left, so ``(uv)(sigma)`` applies ``v`` first.
"""

from dataclasses import dataclass
from functools import lru_cache, total_ordering

from sympy.combinatorics.free_groups import free_group

from config import DEFAULT_ALPHABET
from modules.errors import AlphabetMismatchError, ArityError, ParseError
from modules.perm_core import Permutation


@dataclass(frozen=True, order=True)
class Generator:
    """A letter ``s_index`` or its inverse; ``index`` is 1-based."""

    index: int
    inverted: bool = False

    def __post_init__(self):
        if self.index < 1:
            raise ArityError(f"generator index must be >= 1, got {self.index}")

    def cancels(self, other):
        return self.index == other.index and self.inverted != other.inverted


@dataclass(frozen=True)
class Alphabet:
    names: tuple

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise ArityError("an alphabet needs at least one generator")
        for name in names:
            if len(name) != 1 or not name.isalpha() or not name.islower():
                raise ParseError(f"generator names must be single lowercase letters, got {name!r}")
        if len({name.lower() for name in names}) != len(names):
            raise ParseError(f"generator names must be distinct: {''.join(names)}")

    @classmethod
    def of_size(cls, k):
        if k < 1 or k > len(DEFAULT_ALPHABET):
            raise ArityError(f"no default alphabet of size {k}")
        return cls(tuple(DEFAULT_ALPHABET[:k]))

    @classmethod
    def from_text(cls, text):
        """Reads "xy", "x y" or "x,y"."""
        tokens = text.replace(",", " ").split()
        if len(tokens) == 1:
            tokens = list(tokens[0])
        return cls(tuple(tokens))

    @property
    def k(self):
        return len(self.names)

    def symbol(self, gen):
        name = self.names[gen.index - 1]
        return name.upper() if gen.inverted else name

    def letters(self):
        """All 2k letters in canonical order x, X, y, Y, ..."""
        return tuple(
            Generator(i, inverted) for i in range(1, self.k + 1) for inverted in (False, True)
        )

    def free_group(self):
        """The sympy free group on these names and its generators."""
        return _free_group(self.names)

    def __str__(self):
        return "".join(self.names)


@lru_cache(maxsize=None)
def _free_group(names):
    group, *generators = free_group(",".join(names))
    return group, tuple(generators)


def _element(letters, alphabet):
    group, generators = alphabet.free_group()
    result = group.identity
    for gen in letters:
        g = generators[gen.index - 1]
        result = result * (g**-1 if gen.inverted else g)
    return result


def _letter_rank(gen):
    return 2 * (gen.index - 1) + int(gen.inverted)


@total_ordering
@dataclass(frozen=True)
class Word:
    """
    A freely reduced word. Build through ``reduce``/``parse_word`` unless the
    letters are known to be reduced already.

    The letter tuple is the stored form; the group operations go through
    the matching sympy ``FreeGroupElement``.
    """

    alphabet: Alphabet
    letters: tuple = ()

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        for gen in letters:
            if gen.index > self.alphabet.k:
                raise ArityError(
                    f"generator index {gen.index} outside alphabet {self.alphabet} of size {self.alphabet.k}"
                )
        for a, b in zip(letters, letters[1:]):
            if a.cancels(b):
                raise ValueError(f"letters are not freely reduced: {self._text(letters)}")

    @classmethod
    def from_element(cls, alphabet, element):
        """Reads a sympy free group element back into letters."""
        index = {name: i for i, name in enumerate(alphabet.names, start=1)}
        letters = []
        for symbol, exponent in element.array_form:
            letters.extend([Generator(index[symbol.name], exponent < 0)] * abs(exponent))
        return cls(alphabet, tuple(letters))

    def element(self):
        return _element(self.letters, self.alphabet)

    def _text(self, letters):
        return "".join(self.alphabet.symbol(g) for g in letters)

    def length(self):
        return len(self.letters)

    def __len__(self):
        return len(self.letters)

    def is_identity(self):
        return not self.letters

    def shortlex_key(self):
        return (len(self.letters), tuple(_letter_rank(g) for g in self.letters))

    def __lt__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.shortlex_key() < other.shortlex_key()

    def __mul__(self, other):
        return concat(self, other)

    def __invert__(self):
        return invert(self)

    def __str__(self):
        return self._text(self.letters)

    def __repr__(self):
        return f"Word({str(self)!r})"


def reduce(letters, alphabet=None):
    """
    Freely reduces a letter sequence by multiplying it out in the free group.

    :param letters: Iterable of Generator.
    :param alphabet: Alphabet of the result; defaults to the smallest default
        alphabet that contains every letter.
    :return: The reduced Word.
    """
    letters = list(letters)
    if alphabet is None:
        alphabet = Alphabet.of_size(max((g.index for g in letters), default=1))
    for gen in letters:
        if gen.index > alphabet.k:
            raise ArityError(f"generator index {gen.index} outside alphabet {alphabet} of size {alphabet.k}")
    return Word.from_element(alphabet, _element(letters, alphabet))


def parse_word(text, alphabet):
    """
    Parses word text over ``alphabet`` and returns its reduced form.

    Whitespace is ignored. Positions in error messages are 1-based.
    """
    lookup = {}
    for i, name in enumerate(alphabet.names, start=1):
        lookup[name] = Generator(i, False)
        lookup[name.upper()] = Generator(i, True)
    letters = []
    for position, char in enumerate(text, start=1):
        if char.isspace():
            continue
        if char not in lookup:
            raise ParseError(f"unknown symbol in word {text!r}", char=char, position=position)
        letters.append(lookup[char])
    return reduce(letters, alphabet)


def shortlex_key(w):
    """Length first, then letters ranked x < X < y < Y < ..."""
    return w.shortlex_key()


def word_to_text(w):
    return str(w)


def _check_same_alphabet(u, v):
    if u.alphabet != v.alphabet:
        raise AlphabetMismatchError(f"alphabets differ: {u.alphabet} vs {v.alphabet}")


def invert(w):
    return Word.from_element(w.alphabet, w.element().inverse())


def concat(u, v):
    _check_same_alphabet(u, v)
    return Word.from_element(u.alphabet, u.element() * v.element())


def power(w, m):
    """``w`` to the ``m``-th power; negative exponents use the inverse."""
    return Word.from_element(w.alphabet, w.element() ** m)


def identity_word(alphabet):
    return Word(alphabet, ())


def evaluate(w, sigma):
    """
    Returns the permutation w(sigma).

    Letters are applied right to left, so that evaluation is a homomorphism
    for the composition ``(a * b)(x) = a(b(x))``.
    """
    if w.alphabet.k != sigma.k:
        raise ArityError(f"word over {w.alphabet.k} generators evaluated on a {sigma.k}-tuple")
    images = list(range(sigma.n))
    for gen in reversed(w.letters):
        perm = sigma.perms[gen.index - 1]
        table = perm.inverse_images if gen.inverted else perm.images
        images = [table[y] for y in images]
    return Permutation(tuple(images))


def evaluate_point_counted(w, oracle, x):
    """
    Applies ``w`` to the 0-based point ``x`` through ``oracle``.

    Each letter costs exactly one forward or backward lookup.
    """
    for gen in reversed(w.letters):
        if gen.inverted:
            x = oracle.backward(gen.index, x)
        else:
            x = oracle.forward(gen.index, x)
    return x


def enumerate_reduced_words(alphabet, max_len):
    """
    All reduced words of length at most ``max_len`` in shortlex order.

    The count is ``1 + sum_{l=1..r} 2k(2k-1)^(l-1)``.
    """
    if max_len < 0:
        raise ValueError(f"max_len must be >= 0, got {max_len}")
    letters = alphabet.letters()
    layer = [()]
    words = [Word(alphabet, ())]
    for _ in range(max_len):
        next_layer = []
        for prefix in layer:
            for gen in letters:
                if prefix and prefix[-1].cancels(gen):
                    continue
                next_layer.append(prefix + (gen,))
        # extending a shortlex-sorted layer letter by letter keeps it sorted
        words.extend(Word(alphabet, letters_) for letters_ in next_layer)
        layer = next_layer
    return words
