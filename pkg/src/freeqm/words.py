"""Reduced words in a free group, stored as syllables ``(generator, exponent)``.

A word is kept in its unique shortest factorization into powers: adjacent
syllables never share a generator and no exponent is zero.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Alphabet",
    "CyclicDecomposition",
    "Word",
    "WordParseError",
    "cyclically_reduce",
    "enumerate_words",
    "count_words",
    "invert",
    "junction",
    "multiply",
    "parse_word",
    "power",
]

_NAME = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")
_TOKEN = re.compile(r"(?P<name>[a-zA-Z][a-zA-Z0-9_]*)(?:\^(?P<exp>[+-]?\d+))?\Z")

Syllable = tuple[str, int]


class WordParseError(ValueError):
    """Raised for malformed word text; carries the 1-based column of the bad token."""

    def __init__(self, message: str, column: int | None = None):
        self.column = column
        if column is not None:
            message = f"column {column}: {message}"
        super().__init__(message)


def _reduce(syllables: Iterable[Syllable]) -> tuple[Syllable, ...]:
    out: list[Syllable] = []
    for gen, exp in syllables:
        if exp == 0:
            continue
        if out and out[-1][0] == gen:
            merged = out[-1][1] + exp
            if merged:
                out[-1] = (gen, merged)
            else:
                out.pop()
        else:
            out.append((gen, exp))
    return tuple(out)


@dataclass(frozen=True, slots=True)
class Word:
    """Immutable reduced free-group word.

    Construct with :meth:`Word.of` (which reduces) unless the syllables are
    already known to be reduced.
    """

    syllables: tuple[Syllable, ...] = ()

    @classmethod
    def of(cls, syllables: Iterable[Sequence]) -> "Word":
        return cls(_reduce((str(g), int(e)) for g, e in syllables))

    @classmethod
    def identity(cls) -> "Word":
        return cls(())

    def __len__(self) -> int:
        return len(self.syllables)

    def __iter__(self) -> Iterator[Syllable]:
        return iter(self.syllables)

    def __getitem__(self, i):
        return self.syllables[i]

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __pow__(self, n: int) -> "Word":
        return power(self, n)

    def inverse(self) -> "Word":
        return invert(self)

    @property
    def generators(self) -> frozenset[str]:
        return frozenset(g for g, _ in self.syllables)

    def letter_length(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def is_power(self) -> bool:
        """True for the identity and single-syllable words ``s^k``."""
        return len(self.syllables) <= 1

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self) or '1'})"

    def to_json(self) -> list[list]:
        return [[g, e] for g, e in self.syllables]

    @classmethod
    def from_json(cls, data) -> "Word":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.of((g, e) for g, e in data)


@dataclass(frozen=True)
class Alphabet:
    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        for n in names:
            if not _NAME.match(n):
                raise ValueError(f"invalid generator name {n!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")

    @classmethod
    def parse(cls, text: str) -> "Alphabet":
        return cls(tuple(p.strip() for p in text.split(",") if p.strip()))

    def __contains__(self, name) -> bool:
        return name in self.names

    def __iter__(self):
        return iter(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def check(self, word: Word) -> None:
        for g, _ in word.syllables:
            if g not in self.names:
                raise ValueError(f"generator {g!r} is not in alphabet {list(self.names)}")


def format_word(x: Word) -> str:
    return " ".join(g if e == 1 else f"{g}^{e}" for g, e in x.syllables)


def parse_word(text: str, alphabet: Alphabet | Iterable[str]) -> Word:
    """Parse whitespace-separated tokens ``name`` or ``name^int`` into a reduced word.

    >>> parse_word("s^3 t^-2 s", ["s", "t"]).syllables
    (('s', 3), ('t', -2), ('s', 1))
    """
    names = alphabet.names if isinstance(alphabet, Alphabet) else tuple(alphabet)
    syllables = []
    for m in re.finditer(r"\S+", text):
        token, col = m.group(0), m.start() + 1
        tm = _TOKEN.match(token)
        if tm is None:
            if "^" in token and _NAME.match(token.split("^", 1)[0]):
                raise WordParseError(f"malformed exponent in {token!r}", col)
            raise WordParseError(f"malformed token {token!r}", col)
        name = tm.group("name")
        if name not in names:
            raise WordParseError(f"unknown generator {name!r}", col)
        exp = 1 if tm.group("exp") is None else int(tm.group("exp"))
        if exp == 0:
            raise WordParseError(f"zero exponent in {token!r}", col)
        syllables.append((name, exp))
    return Word(_reduce(syllables))


def junction(x: Word, y: Word) -> tuple[int, bool]:
    """Describe how ``x`` and ``y`` meet in the product ``xy``.

    Returns ``(r, merged)``: ``r`` syllable pairs cancel completely at the
    junction, and ``merged`` tells whether the next pair shares a generator
    and fuses into a single new syllable.
    """
    xs, ys = x.syllables, y.syllables
    r = 0
    n, m = len(xs), len(ys)
    while r < n and r < m:
        (g, a), (h, b) = xs[n - 1 - r], ys[r]
        if g != h:
            return r, False
        if a + b != 0:
            return r, True
        r += 1
    return r, False


def multiply(x: Word, y: Word) -> Word:
    r, merged = junction(x, y)
    xs, ys = x.syllables, y.syllables
    left = xs[: len(xs) - r]
    right = ys[r:]
    if merged:
        g, a = left[-1]
        middle = ((g, a + right[0][1]),)
        return Word(left[:-1] + middle + right[1:])
    return Word(left + right)


def invert(x: Word) -> Word:
    return Word(tuple((g, -e) for g, e in reversed(x.syllables)))


def power(x: Word, n: int) -> Word:
    if n < 0:
        return power(invert(x), -n)
    result = Word()
    base = x
    while n:
        if n & 1:
            result = multiply(result, base)
        n >>= 1
        if n:
            base = multiply(base, base)
    return result


@dataclass(frozen=True)
class CyclicDecomposition:
    """``word == conjugator * core * conjugator**-1`` with ``core`` cyclically reduced."""

    conjugator: Word
    core: Word

    def reconstruct(self) -> Word:
        return multiply(multiply(self.conjugator, self.core), invert(self.conjugator))


def cyclically_reduce(x: Word) -> CyclicDecomposition:
    """Split off the longest conjugator so that the remaining core is cyclically reduced.

    Boundary syllables of one generator with opposite-sign exponents give up
    their common part (``min(|a|, |b|)`` letters) to the conjugator; this repeats
    until the ends no longer cancel when the core is squared.
    """
    syl = list(x.syllables)
    conj: list[Syllable] = []
    while len(syl) >= 2:
        (g, a), (h, b) = syl[0], syl[-1]
        if g != h or (a > 0) == (b > 0):
            break
        step = min(abs(a), abs(b))
        c = step if a > 0 else -step
        conj.append((g, c))
        a -= c
        b += c
        inner = syl[1:-1]
        if a:
            inner.insert(0, (g, a))
        if b:
            inner.append((h, b))
        syl = inner
    return CyclicDecomposition(Word(_reduce(conj)), Word(tuple(syl)))


def count_words(n_generators: int, k: int, length: int) -> int:
    """Closed-form number of reduced words with at most ``length`` syllables and ``|exp| <= k``."""
    total = 1
    for ell in range(1, length + 1):
        total += n_generators * (n_generators - 1) ** (ell - 1) * (2 * k) ** ell
    return total


def enumerate_words(alphabet: Alphabet | Iterable[str], k: int, length: int) -> Iterator[Word]:
    """Yield every reduced word with at most ``length`` syllables and all ``|exponent| <= k``.

    Words come out by increasing syllable count; the identity is first.
    """
    if k < 1 or length < 0:
        raise ValueError("need k >= 1 and length >= 0")
    names = alphabet.names if isinstance(alphabet, Alphabet) else tuple(alphabet)
    exps = [e for e in range(-k, k + 1) if e]
    yield Word()
    layer: list[tuple[Syllable, ...]] = [()]
    for _ in range(length):
        nxt = []
        for w in layer:
            last = w[-1][0] if w else None
            for g, e in itertools.product(names, exps):
                if g != last:
                    nxt.append(w + ((g, e),))
        for w in nxt:
            yield Word(w)
        layer = nxt
