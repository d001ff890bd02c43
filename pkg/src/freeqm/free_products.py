"""Quasi-morphisms on free products of groups, and PSL(2, Z) as Z/2 * Z/3.

Factor groups are given as cyclic groups, the integers, or an explicit
multiplication table.  Elements are integers; ``0`` is always the identity.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .sequences import SequenceSpec, sequence_from_json, to_fraction

__all__ = [
    "FPWord",
    "FactorGroup",
    "FreeProduct",
    "OddBoundedMap",
    "PSL2",
    "fp_eval",
    "fp_injectivity_witness",
    "fp_multiply",
    "odd_map_dimension",
    "fp_bound",
    "fp_sigma_from_json",
    "psl2_default_sigma",
    "psl2_equal",
    "psl2_matrix",
    "psl2_parse",
    "psl2_qm",
    "v0_dimension",
]


class FactorGroup:
    """A factor of a free product.  ``kind`` is ``"cyclic"``, ``"integers"`` or ``"table"``."""

    def __init__(self, kind: str, order: int | None = None, table: Sequence[Sequence[int]] | None = None):
        self.kind = kind
        if kind == "cyclic":
            if order is None or order < 2:
                raise ValueError("cyclic factor needs order >= 2")
            self.order = order
        elif kind == "integers":
            self.order = None
        elif kind == "table":
            if table is None:
                raise ValueError("table factor needs a multiplication table")
            self.table = tuple(tuple(int(v) for v in row) for row in table)
            self.order = len(self.table)
            self._check_table()
            self._inverse = tuple(row.index(0) for row in self.table)
        else:
            raise ValueError(f"unknown factor kind {kind!r}")

    @classmethod
    def cyclic(cls, n: int) -> "FactorGroup":
        return cls("cyclic", order=n)

    @classmethod
    def integers(cls) -> "FactorGroup":
        return cls("integers")

    @classmethod
    def from_table(cls, table) -> "FactorGroup":
        return cls("table", table=table)

    def _check_table(self):
        n = len(self.table)
        if n < 2:
            raise ValueError("factor groups must be non-trivial")
        rng = range(n)
        for row in self.table:
            if len(row) != n or sorted(row) != list(rng):
                raise ValueError("table rows must be permutations of 0..n-1")
        for a in rng:
            if self.table[0][a] != a or self.table[a][0] != a:
                raise ValueError("element 0 must be the identity")
            if 0 not in self.table[a]:
                raise ValueError(f"element {a} has no inverse")
        for a, b, c in itertools.product(rng, rng, rng):
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise ValueError(f"table is not associative at ({a}, {b}, {c})")

    def __repr__(self):
        if self.kind == "cyclic":
            return f"Z{self.order}"
        if self.kind == "integers":
            return "Z"
        return f"TableGroup(order={self.order})"

    def __eq__(self, other):
        return isinstance(other, FactorGroup) and repr(self) == repr(other) and (
            self.kind != "table" or self.table == other.table
        )

    def __hash__(self):
        return hash(repr(self))

    def contains(self, a: int) -> bool:
        if self.kind == "integers":
            return isinstance(a, int)
        return 0 <= a < self.order

    def mul(self, a: int, b: int) -> int:
        if self.kind == "cyclic":
            return (a + b) % self.order
        if self.kind == "integers":
            return a + b
        return self.table[a][b]

    def inv(self, a: int) -> int:
        if self.kind == "cyclic":
            return (-a) % self.order
        if self.kind == "integers":
            return -a
        return self._inverse[a]

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        out = 0
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def elements(self, bound: int = 1) -> list[int]:
        """All elements, or ``-bound..bound`` for the integers."""
        if self.kind == "integers":
            return list(range(-bound, bound + 1))
        return list(range(self.order))


def _parse_factor(text: str) -> FactorGroup:
    text = text.strip()
    if text == "Z":
        return FactorGroup.integers()
    m = re.fullmatch(r"Z(\d+)", text)
    if m:
        return FactorGroup.cyclic(int(m.group(1)))
    raise ValueError(f"unknown factor {text!r}; use Z or Zn")


@dataclass(frozen=True)
class FPWord:
    """Alternating normal form: nonidentity letters, adjacent letters from distinct factors."""

    letters: tuple[tuple[str, int], ...] = ()

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self):
        return " ".join(f"{f}:{a}" for f, a in self.letters)

    def __repr__(self):
        return f"FPWord({self or '1'})"


class FreeProduct:
    """Free product of named factor groups."""

    def __init__(self, factors: Mapping[str, FactorGroup]):
        if len(factors) < 2:
            raise ValueError("a free product needs at least two factors")
        self.factors = dict(factors)

    @classmethod
    def parse(cls, text: str) -> "FreeProduct":
        """``"A=Z2,B=Z3"`` style description."""
        factors = {}
        for part in text.split(","):
            name, _, kind = part.partition("=")
            if not kind:
                raise ValueError(f"factor spec {part!r} must look like NAME=Zn")
            factors[name.strip()] = _parse_factor(kind)
        return cls(factors)

    def __repr__(self):
        return " * ".join(f"{n}={g!r}" for n, g in self.factors.items())

    def word(self, letters: Iterable[tuple[str, int]]) -> FPWord:
        """Normal form of an arbitrary product of letters."""
        out: list[tuple[str, int]] = []
        for f, a in letters:
            grp = self._factor(f)
            if not grp.contains(a):
                raise ValueError(f"{a} is not an element of factor {f} ({grp!r})")
            if a == 0:
                continue
            if out and out[-1][0] == f:
                c = grp.mul(out[-1][1], a)
                if c == 0:
                    out.pop()
                else:
                    out[-1] = (f, c)
            else:
                out.append((f, a))
        return FPWord(tuple(out))

    def _factor(self, f: str) -> FactorGroup:
        try:
            return self.factors[f]
        except KeyError:
            raise ValueError(f"unknown factor {f!r}") from None

    def parse_word(self, text: str) -> FPWord:
        letters = []
        for token in text.split():
            m = re.fullmatch(r"([A-Za-z][A-Za-z0-9_]*):(-?\d+)", token)
            if m is None:
                raise ValueError(f"malformed letter {token!r}; expected FACTOR:ELEMENT")
            letters.append((m.group(1), int(m.group(2))))
        return self.word(letters)

    def multiply(self, x: FPWord, y: FPWord) -> FPWord:
        return fp_multiply(self, x, y)

    def inverse(self, x: FPWord) -> FPWord:
        return FPWord(tuple((f, self.factors[f].inv(a)) for f, a in reversed(x.letters)))

    def power(self, x: FPWord, k: int) -> FPWord:
        if k < 0:
            x, k = self.inverse(x), -k
        out = FPWord()
        for _ in range(k):
            out = self.multiply(out, x)
        return out

    def enumerate(self, length: int, int_bound: int = 1) -> Iterator[FPWord]:
        """All normal forms with at most ``length`` letters (integer letters bounded by ``int_bound``)."""
        letters = {
            f: [a for a in g.elements(int_bound) if a != 0] for f, g in self.factors.items()
        }
        yield FPWord()
        layer: list[tuple] = [()]
        for _ in range(length):
            nxt = []
            for w in layer:
                last = w[-1][0] if w else None
                for f, elems in letters.items():
                    if f == last:
                        continue
                    for a in elems:
                        nxt.append(w + ((f, a),))
            for w in nxt:
                yield FPWord(w)
            layer = nxt


def fp_multiply(product: FreeProduct, x: FPWord, y: FPWord) -> FPWord:
    """Normal form of ``xy``: junction letters of one factor multiply, identities drop, cancellation cascades."""
    for f, _ in itertools.chain(x.letters, y.letters):
        product._factor(f)
    out = list(x.letters)
    rest = list(y.letters)
    while out and rest and out[-1][0] == rest[0][0]:
        f = out[-1][0]
        c = product.factors[f].mul(out.pop()[1], rest.pop(0)[1])
        if c != 0:
            out.append((f, c))
            break
    return FPWord(tuple(out + rest))


class OddBoundedMap:
    """Odd map ``f: G_s -> Q`` with ``f(a^-1) = -f(a)`` and ``f(e) = 0``.

    Finite factors carry an explicit value table; an integer factor carries a
    :class:`~freeqm.sequences.SequenceSpec`.
    """

    def __init__(self, group: FactorGroup, values: Mapping[int, object] | None = None,
                 sequence: SequenceSpec | None = None):
        self.group = group
        self.sequence = sequence
        if group.kind == "integers":
            if sequence is None:
                raise ValueError("integer factors need a sequence")
            self.values = {}
            return
        vals = {a: to_fraction(v) for a, v in (values or {}).items()}
        table: dict[int, Fraction] = {}
        for a in range(group.order):
            inv = group.inv(a)
            if a in vals:
                v = vals[a]
            elif inv in vals:
                v = -vals[inv]
            else:
                v = Fraction(0)
            table[a] = v
        for a in range(group.order):
            if table[a] != -table[group.inv(a)]:
                raise ValueError(f"map is not odd at element {a}")
        self.values = table

    @classmethod
    def free(cls, group: FactorGroup, values: Mapping[int, object]) -> "OddBoundedMap":
        """Prescribe values on a subset; inverses are filled by oddness, the rest is zero."""
        return cls(group, values)

    def __call__(self, a: int) -> Fraction:
        if self.sequence is not None:
            return self.sequence(a)
        return self.values[a]

    def sup_norm(self) -> Fraction:
        if self.sequence is not None:
            return self.sequence.sup_norm()
        return max((abs(v) for v in self.values.values()), default=Fraction(0))


def fp_eval(sigma: Mapping[str, OddBoundedMap], x: FPWord) -> Fraction:
    total = Fraction(0)
    for f, a in x.letters:
        if f not in sigma:
            raise ValueError(f"no odd map for factor {f!r}")
        total += sigma[f](a)
    return total


def fp_bound(sigma: Mapping[str, OddBoundedMap]) -> Fraction:
    return 3 * max(m.sup_norm() for m in sigma.values())


def fp_injectivity_witness(product: FreeProduct, sigma: Mapping[str, OddBoundedMap],
                           s: str, t: str, x: int, y: int, k: int, sign: int = 1) -> Fraction:
    """Evaluate ``g((x y^sign)^k)`` and check it equals ``k (sigma_s(x) + sign sigma_t(y))``."""
    if s == t:
        raise ValueError("factors must be distinct")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if x == 0 or y == 0:
        raise ValueError("x and y must be nonidentity")
    ty = y if sign == 1 else product.factors[t].inv(y)
    w = product.power(product.word([(s, x), (t, ty)]), k)
    value = fp_eval(sigma, w)
    expected = k * (sigma[s](x) + sign * sigma[t](y))
    if value != expected:
        raise AssertionError(f"witness mismatch: {value} != {expected}")
    return value


def odd_map_dimension(group: FactorGroup) -> int:
    """Dimension of the space of odd maps on a finite factor.

    Counts the pairs ``{a, a^-1}`` with ``a != a^-1``; involutions and the
    identity are forced to zero.
    """
    if group.kind == "integers":
        raise ValueError("the space of bounded odd maps on Z is infinite-dimensional")
    if group.kind == "cyclic":
        return (group.order - 1) // 2
    return sum(1 for a in range(group.order) if a < group.inv(a))


def v0_dimension(product: FreeProduct) -> int:
    return sum(odd_map_dimension(g) for g in product.factors.values())


# PSL(2, Z) = <a> * <b>, a = S (order 2), b = ST (order 3)

PSL2 = FreeProduct({"A": FactorGroup.cyclic(2), "B": FactorGroup.cyclic(3)})

_S = ((0, -1), (1, 0))
_ST = ((0, -1), (1, 1))
_I = ((1, 0), (0, 1))


def _matmul(m, n):
    return (
        (m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]),
        (m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]),
    )


def _as_matrix(matrix) -> tuple[tuple[int, int], tuple[int, int]]:
    if isinstance(matrix, str):
        matrix = json.loads(matrix)
    try:
        (a, b), (c, d) = matrix
        m = ((int(a), int(b)), (int(c), int(d)))
    except (TypeError, ValueError):
        raise ValueError("matrix must be [[a, b], [c, d]] with integer entries") from None
    if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 1:
        raise ValueError(f"matrix {matrix} is not unimodular (det != 1)")
    return m


def _t_power(q: int) -> FPWord:
    # T = a b in PSL2
    ab = PSL2.word([("A", 1), ("B", 1)])
    return PSL2.power(ab, q)


def psl2_parse(matrix) -> FPWord:
    """Normal form over ``A = Z/2`` and ``B = Z/3`` of a unimodular integer matrix.

    Euclid on the first column: ``M -> T^-q M`` makes ``|a| < |c|``, then
    ``M -> S M`` swaps the column entries.  When ``c = 0`` the remainder is
    ``+-T^b``.  The moves, inverted and composed, spell the word.
    """
    m = _as_matrix(matrix)
    moves: list[FPWord] = []
    a_letter = PSL2.word([("A", 1)])
    while m[1][0] != 0:
        q = m[0][0] // m[1][0]
        if q:
            m = ((m[0][0] - q * m[1][0], m[0][1] - q * m[1][1]), m[1])
            moves.append(_t_power(q))
        m = _matmul(_S, m)
        moves.append(a_letter)  # S^-1 = S in PSL2
    # now m = +-[[1, b], [0, 1]]
    sign = m[0][0]
    moves.append(_t_power(m[0][1] * sign))
    word = FPWord()
    for w in moves:
        word = PSL2.multiply(word, w)
    return word


def psl2_matrix(word: FPWord) -> tuple[tuple[int, int], tuple[int, int]]:
    """Multiply out a word over ``A``, ``B`` as an SL2 matrix (defined up to sign)."""
    m = _I
    for f, a in word.letters:
        gen = _S if f == "A" else _ST
        for _ in range(a):
            m = _matmul(m, gen)
    return m


def psl2_equal(m, n) -> bool:
    m, n = _as_matrix(m), _as_matrix(n)
    neg = tuple(tuple(-v for v in row) for row in n)
    return m == n or m == neg


def psl2_default_sigma(c=1) -> dict[str, OddBoundedMap]:
    """``sigma_A = 0`` (forced) and ``sigma_B(b) = c``; spans the one-dimensional V0."""
    return {
        "A": OddBoundedMap(PSL2.factors["A"], {}),
        "B": OddBoundedMap.free(PSL2.factors["B"], {1: c}),
    }


def psl2_qm(sigma: Mapping[str, OddBoundedMap], matrix) -> Fraction:
    return fp_eval(sigma, psl2_parse(matrix))


def fp_sigma_from_json(product: FreeProduct, data) -> dict[str, OddBoundedMap]:
    """``{"A": {"1": "p/q"}, "C": {"form": "sign", ...}}``; missing factors get the zero map."""
    if isinstance(data, str):
        data = json.loads(data)
    out = {}
    for name, grp in product.factors.items():
        spec = data.get(name, {})
        if grp.kind == "integers":
            if not spec:
                raise ValueError(f"integer factor {name} needs a sequence")
            out[name] = OddBoundedMap(grp, sequence=sequence_from_json(spec))
        else:
            out[name] = OddBoundedMap(grp, {int(k): v for k, v in spec.items()})
    unknown = set(data) - set(product.factors)
    if unknown:
        raise ValueError(f"sigma mentions unknown factors {sorted(unknown)}")
    return out
