"""Backend selection for the brute-force pair kernel.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` twin.  Setting ``FREEQM_PURE_PYTHON=1`` forces the
fallback.  Values are scaled to integers by a common denominator so both
backends stay exact.
"""
from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Callable, Sequence

from . import _pykernels
from .words import Word

try:
    if os.environ.get("FREEQM_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"

# headroom for sums of at most ~2**10 table entries in int64
_INT64_SAFE = 2**52


class PackedWords:
    """Flat integer encoding of a list of words over a fixed generator order."""

    def __init__(self, words: Sequence[Word], generators: Sequence[str]):
        index = {g: i for i, g in enumerate(generators)}
        self.words = list(words)
        self.generators = tuple(generators)
        gens, exps, offsets = [], [], [0]
        for w in self.words:
            for g, e in w.syllables:
                gens.append(index[g])
                exps.append(e)
            offsets.append(len(gens))
        self.gens, self.exps, self.offsets = gens, exps, offsets
        self.max_exp = max((abs(e) for e in exps), default=1)
        self.max_len = max((offsets[i + 1] - offsets[i] for i in range(len(self.words))), default=0)


def scaled_table(value: Callable[[str, int], Fraction], generators: Sequence[str], bound: int):
    """Integer table ``[gen][k + bound] = value(gen, k) * denom`` for ``|k| <= bound``."""
    raw = [[Fraction(value(g, k)) for k in range(-bound, bound + 1)] for g in generators]
    denom = 1
    for row in raw:
        for v in row:
            denom = math.lcm(denom, v.denominator)
    table = [[int(v * denom) for v in row] for row in raw]
    return table, denom


def coboundary_extremum(
    packed: PackedWords,
    value: Callable[[str, int], Fraction],
    left=None,
    right=None,
    backend: str | None = None,
) -> tuple[Fraction, Fraction, int, int]:
    """Exact ``max |f(x) + f(y) - f(xy)|`` over pairs of packed words.

    ``value(gen, k)`` gives the contribution of the syllable ``gen^k``.
    Returns ``(max_abs, signed_value, i, j)`` indexing ``packed.words``.
    """
    bound = 2 * packed.max_exp
    table, denom = scaled_table(value, packed.generators, bound)
    biggest = max((abs(v) for row in table for v in row), default=0)
    terms = 2 * (2 * packed.max_len + 1)
    impl = _select(backend)
    if impl is not _pykernels and biggest * terms >= _INT64_SAFE:
        impl = _pykernels
    if impl is not _pykernels:
        import numpy as np

        table = np.asarray(table, dtype=np.int64)
    best, signed, i, j = impl.coboundary_extremum(
        packed.gens, packed.exps, packed.offsets, table, bound, left, right
    )
    return Fraction(best, denom), Fraction(signed, denom), i, j


def _select(backend: str | None):
    if backend is None:
        return _ckernels if _ckernels is not None else _pykernels
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernel is not built")
        return _ckernels
    raise ValueError(f"unknown backend {backend!r}")
