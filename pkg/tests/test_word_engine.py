import pytest

from encoders.text_formats import format_permutation, parse_tuple
from modules.errors import AlphabetMismatchError, ArityError, ParseError
from modules.perm_core import QueryOracle, random_tuple
from modules.seeding import create_rng
from modules.word_engine import (
    Alphabet,
    Word,
    concat,
    enumerate_reduced_words,
    evaluate,
    evaluate_point_counted,
    identity_word,
    invert,
    parse_word,
    power,
    reduce,
    shortlex_key,
    word_to_text,
)


def test_parse_reduces(xy):
    assert word_to_text(parse_word("xXy", xy)) == "y"
    assert word_to_text(parse_word("xyYX", xy)) == ""
    assert parse_word("", xy).is_identity()
    assert word_to_text(parse_word("x y X", xy)) == "xyX"


def test_parse_error_position(xy):
    with pytest.raises(ParseError) as info:
        parse_word("xqy", xy)
    assert info.value.char == "q"
    assert info.value.position == 2


def test_alphabet_validation():
    with pytest.raises(ParseError):
        Alphabet.from_text("xx")
    with pytest.raises(ParseError):
        Alphabet.from_text("X")
    assert Alphabet.from_text("x, y").names == ("x", "y")
    assert Alphabet.of_size(3).names == ("x", "y", "z")


def test_invert_and_concat(xy):
    w = parse_word("xyXY", xy)
    assert word_to_text(invert(w)) == "yxYX"
    assert concat(w, invert(w)).is_identity()
    assert word_to_text(parse_word("xy", xy) * parse_word("Yx", xy)) == "xx"


def test_concat_alphabet_mismatch(xy):
    with pytest.raises(AlphabetMismatchError):
        concat(parse_word("x", xy), parse_word("x", Alphabet.from_text("xyz")))


def test_power(xy):
    w = parse_word("xy", xy)
    assert word_to_text(power(w, 3)) == "xyxyxy"
    assert word_to_text(power(w, -2)) == "YXYX"
    assert power(w, 0) == identity_word(xy)


@pytest.mark.parametrize("k, r, expected", [(2, 2, 17), (1, 2, 5), (2, 0, 1), (2, 3, 53)])
def test_enumerate_reduced_words_count(k, r, expected):
    words = enumerate_reduced_words(Alphabet.of_size(k), r)
    assert len(words) == expected
    assert len(set(words)) == expected


def test_enumerate_reduced_words_shortlex(xy):
    words = enumerate_reduced_words(xy, 3)
    assert words == sorted(words, key=shortlex_key)
    assert [word_to_text(w) for w in words[:5]] == ["", "x", "X", "y", "Y"]


def test_evaluate_commutator(xy):
    sigma = parse_tuple("(1 2 3)\n(1 2)", 3)
    result = evaluate(parse_word("xyXY", xy), sigma)
    assert format_permutation(result) == "(1 3 2)"


def test_evaluate_conjugate(xy):
    sigma = parse_tuple("(1 2 3)\n(1 2)", 3)
    assert format_permutation(evaluate(parse_word("xyX", xy), sigma)) == "(2 3)"


def test_evaluate_is_homomorphism(xy):
    sigma = parse_tuple("(1 2 3 4)\n(1 3)", 4)
    u, v = parse_word("xyy", xy), parse_word("Yxy", xy)
    assert evaluate(u * v, sigma) == evaluate(u, sigma) * evaluate(v, sigma)
    assert evaluate(invert(u), sigma) == evaluate(u, sigma).inverse()


def test_evaluate_arity(xy):
    with pytest.raises(ArityError):
        evaluate(parse_word("x", xy), parse_tuple("(1 2)", 2))


def test_evaluate_point_counted(xy):
    sigma = parse_tuple("(1 2 3)\n(1 2)", 3)
    oracle = QueryOracle(sigma)
    assert evaluate_point_counted(parse_word("xyXY", xy), oracle, 0) == 2
    assert oracle.count == 4


def _random_word(alphabet, max_len, rng):
    letters = alphabet.letters()
    picks = rng.integers(0, len(letters), size=int(rng.integers(0, max_len + 1)))
    return reduce([letters[i] for i in picks.tolist()], alphabet)


def test_reduce_is_idempotent(xy):
    rng = create_rng(21)
    letters = xy.letters()
    for _ in range(200):
        raw = [letters[i] for i in rng.integers(0, 4, size=12).tolist()]
        once = reduce(raw, xy)
        assert reduce(once.letters, xy) == once


def test_reduce_matches_sympy_free_group(xy):
    _, (x, y) = xy.free_group()
    w = parse_word("xxXyYYy", xy)
    assert w.element() == x
    assert Word.from_element(xy, x * y**-2 * x) == parse_word("xYYx", xy)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("r", [0, 1, 2, 3, 4])
def test_reduced_word_count_formula(k, r):
    expected = 1 + sum(2 * k * (2 * k - 1) ** (length - 1) for length in range(1, r + 1))
    assert len(enumerate_reduced_words(Alphabet.of_size(k), r)) == expected


def test_random_homomorphism_and_inverse_laws(xy):
    rng = create_rng(22)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        sigma = random_tuple(2, n, rng)
        u, v = _random_word(xy, 6, rng), _random_word(xy, 6, rng)
        assert evaluate(u * v, sigma) == evaluate(u, sigma) * evaluate(v, sigma)
        assert evaluate(invert(u), sigma) == evaluate(u, sigma).inverse()
        assert evaluate(u * invert(u), sigma).is_identity()


def test_point_counted_agrees_with_evaluate(xy):
    rng = create_rng(23)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        sigma = random_tuple(2, n, rng)
        w = _random_word(xy, 8, rng)
        images = evaluate(w, sigma).images
        for x in range(n):
            oracle = QueryOracle(sigma)
            assert evaluate_point_counted(w, oracle, x) == images[x]
            assert oracle.count == len(w)
