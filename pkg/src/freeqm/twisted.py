"""Twisted quasi-morphisms with coefficients in a finite-dimensional unitary representation.

For a representation ``pi`` of the free group and vector-valued sequences
``sigma_s`` extended by ``sigma_s(-k) = -pi(s^-k) sigma_s(k)``, the map

    g(x_0 ... x_n) = sum_i pi(x_0 ... x_{i-1}) sigma(x_i)

has bounded twisted coboundary ``pi(x) g(y) - g(xy) + g(x)``.  Whether its
class is non-trivial is not decided here.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .metric_targets import RENORMALIZE_EVERY, TOL, random_unitary, reorthonormalize
from .words import Word, enumerate_words, multiply

__all__ = [
    "TwistedReport",
    "TwistedSequence",
    "UnitaryRep",
    "operator_norm",
    "random_twisted_setup",
    "rep_apply",
    "twisted_bound_check",
    "twisted_coboundary",
    "twisted_eval",
]


def operator_norm(a: np.ndarray, tol: float = 1e-12, max_iter: int = 10_000) -> float:
    """Largest singular value by power iteration on ``a^* a``."""
    a = np.asarray(a, dtype=complex)
    if not a.any():
        return 0.0
    m = a.conj().T @ a
    v = np.ones(m.shape[1], dtype=complex) / np.sqrt(m.shape[1])
    # deterministic start that is not orthogonal to the top eigenvector with probability 1
    v = v + 1e-3 * np.arange(1, m.shape[1] + 1)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = m @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        new = float(np.real(np.vdot(v, m @ v)))
        if abs(new - lam) <= tol * max(new, 1.0):
            lam = new
            break
        lam = new
    return float(np.sqrt(max(lam, 0.0)))


class UnitaryRep:
    """Homomorphism ``F -> U(d)`` given by unitary images of the generators."""

    def __init__(self, generators: Mapping[str, np.ndarray]):
        self.generators = {g: np.asarray(m, dtype=complex) for g, m in generators.items()}
        dims = {m.shape for m in self.generators.values()}
        if len(dims) != 1:
            raise ValueError("all generator images must have the same shape")
        (shape,) = dims
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError("generator images must be square matrices")
        self.dim = shape[0]
        eye = np.eye(self.dim)
        for g, m in self.generators.items():
            if operator_norm(m @ m.conj().T - eye) > TOL:
                raise ValueError(f"image of {g!r} is not unitary")

    @classmethod
    def trivial(cls, alphabet, dim: int) -> "UnitaryRep":
        return cls({g: np.eye(dim, dtype=complex) for g in alphabet})

    @classmethod
    def random(cls, alphabet, dim: int, rng: np.random.Generator) -> "UnitaryRep":
        return cls({g: random_unitary(dim, rng) for g in alphabet})

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(self.generators)

    def syllable(self, gen: str, k: int) -> np.ndarray:
        try:
            m = self.generators[gen]
        except KeyError:
            raise ValueError(f"generator {gen!r} is not in the representation") from None
        if k < 0:
            m, k = m.conj().T, -k
        return np.linalg.matrix_power(m, k)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "generators": {
                g: [[[z.real, z.imag] for z in row] for row in m] for g, m in self.generators.items()
            },
        }

    @classmethod
    def from_json(cls, data) -> "UnitaryRep":
        if isinstance(data, str):
            data = json.loads(data)
        gens = {
            g: np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
            for g, rows in data["generators"].items()
        }
        rep = cls(gens)
        if "dim" in data and int(data["dim"]) != rep.dim:
            raise ValueError(f"declared dim {data['dim']} does not match matrices of size {rep.dim}")
        return rep


def rep_apply(pi: UnitaryRep, x: Word) -> np.ndarray:
    out = np.eye(pi.dim, dtype=complex)
    for i, (g, k) in enumerate(x.syllables, 1):
        out = out @ pi.syllable(g, k)
        if i % RENORMALIZE_EVERY == 0:
            out = reorthonormalize(out)
    return out


class TwistedSequence:
    """Per-generator tables ``sigma_s(k)`` in ``C^d`` for ``1 <= k <= K``; zero beyond."""

    def __init__(self, pi: UnitaryRep, tables: Mapping[str, np.ndarray]):
        self.pi = pi
        self.tables = {g: np.atleast_2d(np.asarray(t, dtype=complex)) for g, t in tables.items()}
        for g, t in self.tables.items():
            if g not in pi.generators:
                raise ValueError(f"no representation image for generator {g!r}")
            if t.shape[1] != pi.dim:
                raise ValueError(f"vectors for {g!r} must have length {pi.dim}")

    def __call__(self, gen: str, k: int) -> np.ndarray:
        table = self.tables.get(gen)
        m = abs(k)
        if k == 0 or table is None or m > len(table):
            return np.zeros(self.pi.dim, dtype=complex)
        v = table[m - 1]
        if k > 0:
            return v
        return -(self.pi.syllable(gen, k) @ v)

    def sup_norm(self) -> float:
        return max((float(np.linalg.norm(v)) for t in self.tables.values() for v in t), default=0.0)

    @property
    def max_k(self) -> int:
        return max((len(t) for t in self.tables.values()), default=0)

    def oddness_defect(self) -> float:
        """Max of ``|sigma_s(k) + pi(s^k) sigma_s(-k)|`` over generators and ``|k| <= K``."""
        worst = 0.0
        for g in self.tables:
            for k in range(-self.max_k, self.max_k + 1):
                r = self(g, k) + self.pi.syllable(g, k) @ self(g, -k)
                worst = max(worst, float(np.linalg.norm(r)))
        return worst


def twisted_eval(pi: UnitaryRep, sigma: TwistedSequence, x: Word) -> np.ndarray:
    v = np.zeros(pi.dim, dtype=complex)
    prefix = np.eye(pi.dim, dtype=complex)
    for i, (g, k) in enumerate(x.syllables, 1):
        v = v + prefix @ sigma(g, k)
        prefix = prefix @ pi.syllable(g, k)
        if i % RENORMALIZE_EVERY == 0:
            prefix = reorthonormalize(prefix)
    return v


def twisted_coboundary(pi: UnitaryRep, sigma: TwistedSequence, x: Word, y: Word) -> np.ndarray:
    """``pi(x) g(y) - g(xy) + g(x)``."""
    return (
        rep_apply(pi, x) @ twisted_eval(pi, sigma, y)
        - twisted_eval(pi, sigma, multiply(x, y))
        + twisted_eval(pi, sigma, x)
    )


@dataclass
class TwistedReport:
    dim: int
    bound: float
    observed_max: float
    oddness_defect: float
    witness: tuple[Word, Word]
    pairs_checked: int
    seed: int | None = None

    @property
    def holds(self) -> bool:
        return self.observed_max <= self.bound + TOL and self.oddness_defect <= TOL

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "bound": self.bound,
            "observed_max": self.observed_max,
            "oddness_defect": self.oddness_defect,
            "witness": [str(self.witness[0]), str(self.witness[1])],
            "pairs_checked": self.pairs_checked,
            "seed": self.seed,
            "holds": self.holds,
        }


def twisted_bound_check(pi: UnitaryRep, sigma: TwistedSequence, k: int, l: int,
                        seed: int | None = None) -> TwistedReport:
    """Largest twisted coboundary norm over enumerated pairs against ``3 sup ||sigma||``."""
    words = list(enumerate_words(pi.alphabet, k, l))
    g_cache: dict[Word, np.ndarray] = {}

    def g(w):
        if w not in g_cache:
            g_cache[w] = twisted_eval(pi, sigma, w)
        return g_cache[w]

    best, witness = -1.0, (Word(), Word())
    for x in words:
        px = rep_apply(pi, x)
        gx = g(x)
        for y in words:
            c = px @ g(y) - g(multiply(x, y)) + gx
            n = float(np.linalg.norm(c))
            if n > best:
                best, witness = n, (x, y)
    return TwistedReport(
        dim=pi.dim,
        bound=3 * sigma.sup_norm(),
        observed_max=best,
        oddness_defect=sigma.oddness_defect(),
        witness=witness,
        pairs_checked=len(words) ** 2,
        seed=seed,
    )


def random_twisted_setup(alphabet, dim: int, k: int, seed: int) -> tuple[UnitaryRep, TwistedSequence]:
    """Seeded random representation and sequence tables of length ``k``."""
    rng = np.random.default_rng(seed)
    pi = UnitaryRep.random(alphabet, dim, rng)
    tables = {
        g: rng.standard_normal((k, dim)) + 1j * rng.standard_normal((k, dim)) for g in alphabet
    }
    return pi, TwistedSequence(pi, tables)
