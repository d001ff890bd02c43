import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from freeqm.words import (
    Alphabet,
    Word,
    WordParseError,
    count_words,
    cyclically_reduce,
    enumerate_words,
    invert,
    junction,
    multiply,
    parse_word,
    power,
)

S, T = "s", "t"
AB = Alphabet((S, T))

syllable = st.tuples(st.sampled_from([S, T]), st.integers(-4, 4).filter(bool))
words = st.lists(syllable, max_size=8).map(Word.of)


def W(*syl):
    return Word(tuple(syl))


def letters(w: Word) -> list[tuple[str, int]]:
    """Expand to single letters (s, +-1)."""
    out = []
    for g, e in w:
        out.extend([(g, 1 if e > 0 else -1)] * abs(e))
    return out


def letter_reduce(seq) -> tuple:
    """Independent free reduction on letters with a stack."""
    stack = []
    for g, e in seq:
        if stack and stack[-1] == (g, -e):
            stack.pop()
        else:
            stack.append((g, e))
    return tuple(stack)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("s^3 t^-2 s", ((S, 3), (T, -2), (S, 1))),
        ("s t t^-1 s^-1", ()),
        ("s^2 s^3", ((S, 5),)),
        ("", ()),
        ("  s^+2\tt ", ((S, 2), (T, 1))),
    ],
)
def test_parse_word(text, expected):
    assert parse_word(text, AB).syllables == expected


@pytest.mark.parametrize(
    "text, column, fragment",
    [("s u", 3, "unknown generator"), ("s^x", 1, "malformed exponent"), ("t s^0", 3, "zero exponent"),
     ("s^", 1, "malformed"), ("3s", 1, "malformed token")],
)
def test_parse_errors(text, column, fragment):
    with pytest.raises(WordParseError, match=fragment) as info:
        parse_word(text, AB)
    assert info.value.column == column


@pytest.mark.parametrize(
    "x, y, expected",
    [
        (W((S, 1)), W((S, -1)), W()),
        (W((S, 1), (T, -1)), W((T, 1), (S, 2)), W((S, 3))),
        (W((S, 2)), W((T, 1)), W((S, 2), (T, 1))),
    ],
)
def test_multiply_examples(x, y, expected):
    assert multiply(x, y) == expected
    assert x * y == expected


@pytest.mark.parametrize(
    "x, expected",
    [(W((S, 3), (T, -2)), W((T, 2), (S, -3))), (W(), W()), (W((S, 1)), W((S, -1)))],
)
def test_invert_examples(x, expected):
    assert invert(x) == expected


@pytest.mark.parametrize(
    "x, n, expected",
    [
        (W((S, 1), (T, 1)), 3, W((S, 1), (T, 1), (S, 1), (T, 1), (S, 1), (T, 1))),
        (W((S, 1), (T, 1), (S, -1)), 2, W((S, 1), (T, 2), (S, -1))),
        (W((S, 2)), -2, W((S, -4))),
        (W((S, 2), (T, 1)), 0, W()),
    ],
)
def test_power_examples(x, n, expected):
    assert power(x, n) == expected


@pytest.mark.parametrize(
    "x, conj, core",
    [
        (W((S, 1), (T, 1), (S, -1)), W((S, 1)), W((T, 1))),
        (W((S, 1), (T, 1)), W(), W((S, 1), (T, 1))),
        (W((S, 2), (T, 1), (S, -1)), W((S, 1)), W((S, 1), (T, 1))),
        (W((S, -2), (T, 3), (S, 2)), W((S, -2)), W((T, 3))),
        (W((S, 1), (T, 1), (S, 1)), W(), W((S, 1), (T, 1), (S, 1))),
        (W((T, 1), (S, 1), (T, 2), (S, -1), (T, -1)), W((T, 1), (S, 1)), W((T, 2))),
    ],
)
def test_cyclically_reduce_examples(x, conj, core):
    dec = cyclically_reduce(x)
    assert (dec.conjugator, dec.core) == (conj, core)
    assert dec.reconstruct() == x


def test_enumerate_examples():
    assert len(list(enumerate_words(AB, 1, 1))) == 5
    assert list(enumerate_words(AB, 1, 0)) == [Word()]
    assert len(list(enumerate_words(AB, 2, 2))) == 41


def brute_force_words(names, k, length):
    """Every product of <= length powers, reduced and deduplicated."""
    exps = [e for e in range(-k, k + 1) if e]
    found = set()
    for n in range(length + 1):
        for gens in itertools.product(names, repeat=n):
            for es in itertools.product(exps, repeat=n):
                w = Word.of(zip(gens, es))
                if len(w) <= length and all(abs(e) <= k for _, e in w):
                    found.add(w)
    return found


@pytest.mark.parametrize("names, k, length", [(("s", "t"), 1, 3), (("s", "t"), 2, 2), (("a", "b", "c"), 1, 2)])
def test_enumeration_matches_brute_force(names, k, length):
    got = list(enumerate_words(names, k, length))
    assert len(got) == len(set(got)) == count_words(len(names), k, length)
    assert set(got) == brute_force_words(names, k, length)


def test_alphabet_validation():
    with pytest.raises(ValueError):
        Alphabet(("s", "s"))
    with pytest.raises(ValueError):
        Alphabet(("1s", "t"))
    assert Alphabet.parse("a, b_2").names == ("a", "b_2")


def test_json_roundtrip():
    w = parse_word("s^3 t^-2 s", AB)
    assert w.to_json() == [["s", 3], ["t", -2], ["s", 1]]
    assert Word.from_json(w.to_json()) == w
    assert str(w) == "s^3 t^-2 s"


def test_big_exponents_are_exact():
    w = power(W((S, 10**30)), 10**10)
    assert w == W((S, 10**40))


@given(words, words, words)
def test_associativity(x, y, z):
    assert multiply(multiply(x, y), z) == multiply(x, multiply(y, z))


@given(words)
def test_identity_inverse_involution(x):
    assert multiply(Word(), x) == x == multiply(x, Word())
    assert multiply(x, invert(x)) == Word() == multiply(invert(x), x)
    assert invert(invert(x)) == x


@given(words, words)
def test_multiply_matches_letter_reduction(x, y):
    assert letters(multiply(x, y)) == list(letter_reduce(letters(x) + letters(y)))


@given(st.lists(syllable, max_size=10))
def test_word_of_is_reduced(syl):
    w = Word.of(syl)
    assert all(e != 0 for _, e in w)
    assert all(a[0] != b[0] for a, b in zip(w.syllables, w.syllables[1:]))
    assert letters(w) == list(letter_reduce(letters(Word(tuple(syl)))))


@given(words, st.integers(-6, 6))
def test_power_laws(x, n):
    assert power(x, -n) == invert(power(x, n))
    naive = Word()
    for _ in range(abs(n)):
        naive = multiply(naive, x if n > 0 else invert(x))
    assert power(x, n) == naive


@given(words)
def test_cyclic_decomposition(x):
    dec = cyclically_reduce(x)
    assert dec.reconstruct() == x
    core = dec.core.syllables
    if len(core) >= 2:
        assert not (core[0][0] == core[-1][0] and core[0][1] * core[-1][1] < 0)
    # letter-level: the core squared cancels nothing at the junction
    lc = letters(dec.core)
    if lc:
        assert lc[-1] != (lc[0][0], -lc[0][1])
    # minimal conjugator: core letters are what remain after stripping
    assert dec.conjugator.letter_length() * 2 + dec.core.letter_length() == x.letter_length()


@given(words, words)
def test_junction_describes_product(x, y):
    r, merged = junction(x, y)
    xy = multiply(x, y)
    expected_len = len(x) + len(y) - 2 * r - (1 if merged else 0)
    assert len(xy) == expected_len


def test_confluent_parsing_fuzz():
    rng = random.Random(7)
    for _ in range(300):
        syl = [(rng.choice("st"), rng.choice([-3, -2, -1, 1, 2, 3])) for _ in range(rng.randint(0, 6))]
        target = Word.of(syl)
        tokens = [f"{g}^{e}" for g, e in syl]
        for _ in range(3):
            g, e = rng.choice("st"), rng.randint(1, 3)
            pos = rng.randint(0, len(tokens))
            tokens[pos:pos] = [f"{g}^{e}", f"{g}^{-e}"]
        assert parse_word(" ".join(tokens), AB) == target
