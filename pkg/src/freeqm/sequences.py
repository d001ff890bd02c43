"""Finitely described bounded odd sequences ``Z -> Q`` and their defects.

Three forms are supported: a finite table (zero beyond its support), a
periodic table, and a scaled sign function.  Every form is extended oddly,
so ``sigma(0) == 0`` and ``sigma(-k) == -sigma(k)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

__all__ = [
    "FiniteTable",
    "Periodic",
    "SequenceSpec",
    "Sign",
    "ZERO",
    "eval_seq",
    "seq_defect",
    "seq_defect_argmax",
    "seq_defect_window_oracle",
    "sequence_from_json",
    "sequence_to_json",
    "sup_norm",
    "to_fraction",
]


def to_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, or ``"p/q"`` string; floats are rejected."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact rationals; pass a 'p/q' string")
    if isinstance(value, str):
        value = value.strip()
    return Fraction(value)


class SequenceSpec:
    """Base class; subclasses define ``_positive(k)`` for ``k >= 1`` and ``window``."""

    values: tuple[Fraction, ...]

    def __call__(self, k: int) -> Fraction:
        if k == 0:
            return Fraction(0)
        if k < 0:
            return -self._positive(-k)
        return self._positive(k)

    def _positive(self, k: int) -> Fraction:
        raise NotImplementedError

    @property
    def window(self) -> int:
        """Window half-width on which every value pattern of the defect is realized."""
        raise NotImplementedError

    def sup_norm(self) -> Fraction:
        return max((abs(v) for v in self.values), default=Fraction(0))


@dataclass(frozen=True)
class FiniteTable(SequenceSpec):
    """``sigma(k) = values[k-1]`` for ``1 <= k <= len(values)``, zero beyond."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(to_fraction(v) for v in self.values))

    def _positive(self, k: int) -> Fraction:
        return self.values[k - 1] if k <= len(self.values) else Fraction(0)

    @property
    def window(self) -> int:
        return 3 * max(len(self.values), 1)


@dataclass(frozen=True)
class Periodic(SequenceSpec):
    """``sigma(k) = values[(k-1) % p]`` for ``k >= 1``."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("periodic sequence needs at least one value")
        object.__setattr__(self, "values", tuple(to_fraction(v) for v in self.values))

    def _positive(self, k: int) -> Fraction:
        return self.values[(k - 1) % len(self.values)]

    @property
    def window(self) -> int:
        return 3 * len(self.values)


@dataclass(frozen=True)
class Sign(SequenceSpec):
    """``sigma(k) = amplitude * sign(k)``."""

    amplitude: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "amplitude", to_fraction(self.amplitude))

    @property
    def values(self) -> tuple[Fraction, ...]:
        return (self.amplitude,)

    def _positive(self, k: int) -> Fraction:
        return self.amplitude

    @property
    def window(self) -> int:
        return 3


ZERO = FiniteTable(())


def eval_seq(sigma: SequenceSpec, k: int) -> Fraction:
    return sigma(k)


def sup_norm(sigma: SequenceSpec) -> Fraction:
    return sigma.sup_norm()


def _partial(sigma: SequenceSpec, k: int, l: int) -> Fraction:
    return sigma(k) + sigma(l) - sigma(k + l)


def seq_defect_window_oracle(sigma: SequenceSpec, w: int) -> Fraction:
    """Max of ``|sigma(k) + sigma(l) - sigma(k+l)|`` over ``k, l`` in ``[-w, w]``."""
    if w < 1:
        raise ValueError("window must be >= 1")
    best = Fraction(0)
    for k in range(-w, w + 1):
        for l in range(-w, w + 1):
            v = abs(_partial(sigma, k, l))
            if v > best:
                best = v
    return best


def seq_defect_argmax(sigma: SequenceSpec) -> tuple[int, int, Fraction]:
    """Return ``(k, l, d)`` with ``d = sigma(k)+sigma(l)-sigma(k+l) = def sigma`` and ``d >= 0``.

    Ties are broken by smallest ``max(|k|, |l|)``, then lexicographically, with
    positive indices preferred.  For the zero sequence ``(1, 1, 0)`` is returned.
    """
    target = seq_defect(sigma)
    if target == 0:
        return 1, 1, Fraction(0)
    w = sigma.window
    order = sorted(
        ((k, l) for k in range(-w, w + 1) for l in range(-w, w + 1)),
        key=lambda kl: (max(abs(kl[0]), abs(kl[1])), -kl[0], -kl[1]),
    )
    for k, l in order:
        if _partial(sigma, k, l) == target:
            return k, l, target
    raise AssertionError("argmax of the defect not found inside the window")


def seq_defect(sigma: SequenceSpec) -> Fraction:
    """Exact defect ``sup_{k,l} |sigma(k)+sigma(l)-sigma(k+l)|``.

    Outside its window a finite or periodic sequence only repeats value
    patterns already present, so the window maximum is the supremum.  The
    doubled window is checked as a guard.
    """
    w = sigma.window
    value = seq_defect_window_oracle(sigma, w)
    doubled = seq_defect_window_oracle(sigma, 2 * w)
    if doubled != value:
        raise AssertionError(f"defect window did not stabilize: {value} at {w}, {doubled} at {2 * w}")
    return value


def sequence_to_json(sigma: SequenceSpec) -> dict:
    if isinstance(sigma, Sign):
        return {"form": "sign", "amplitude": str(sigma.amplitude)}
    form = "finite" if isinstance(sigma, FiniteTable) else "periodic"
    return {"form": form, "values": [str(v) for v in sigma.values]}


def sequence_from_json(data: Mapping | str) -> SequenceSpec:
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, Mapping) or "form" not in data:
        raise ValueError("sequence JSON must be an object with a 'form' key")
    form = data["form"]
    if form == "sign":
        return Sign(to_fraction(data.get("amplitude", "1")))
    if form in ("finite", "periodic"):
        values = data.get("values")
        if not isinstance(values, list):
            raise ValueError(f"{form} sequence needs a 'values' list")
        vals = tuple(to_fraction(v) for v in values)
        return FiniteTable(vals) if form == "finite" else Periodic(vals)
    raise ValueError(f"unknown sequence form {form!r}")
