"""Quasi-morphisms from a free group into groups with a bi-invariant metric.

Supported targets are the reals, the circle group U(1) with angular distance,
and U(d) with the operator-norm distance.  Arithmetic is float64; equality
checks use a tolerance of ``1e-9``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .sequences import SequenceSpec
from .words import Word, enumerate_words, junction, multiply

__all__ = [
    "EpsRepReport",
    "GroupSequenceSpec",
    "MetricGroup",
    "NontrivialityReport",
    "Verdict",
    "eps_defect_bruteforce",
    "grp_eval",
    "metric_distance",
    "nontriviality_check",
    "random_unitary",
    "small_subgroup_probe",
]

TOL = 1e-9
RENORMALIZE_EVERY = 64


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def reorthonormalize(u: np.ndarray) -> np.ndarray:
    """Nearest unitary (polar factor) of a drifted product."""
    w, _, vh = np.linalg.svd(u)
    return w @ vh


class MetricGroup:
    """Target group with a bi-invariant metric and a no-small-subgroups radius.

    ``kind`` is ``"reals"``, ``"circle"`` or ``"unitary"``.  The radius
    ``nss_epsilon`` is configuration: it defaults to infinity for the reals,
    2.0 for the circle and 0.5 for unitary groups.
    """

    DEFAULT_EPS = {"reals": math.inf, "circle": 2.0, "unitary": 0.5}

    def __init__(self, kind: str, dim: int = 1, nss_epsilon: float | None = None):
        if kind not in self.DEFAULT_EPS:
            raise ValueError(f"unknown group kind {kind!r}")
        if kind == "unitary" and dim < 1:
            raise ValueError("unitary dimension must be >= 1")
        self.kind = kind
        self.dim = dim if kind == "unitary" else 1
        self.nss_epsilon = self.DEFAULT_EPS[kind] if nss_epsilon is None else float(nss_epsilon)
        if not self.nss_epsilon > 0:
            raise ValueError("nss_epsilon must be positive")

    @classmethod
    def reals(cls, eps=None):
        return cls("reals", nss_epsilon=eps)

    @classmethod
    def circle(cls, eps=None):
        return cls("circle", nss_epsilon=eps)

    @classmethod
    def unitary(cls, d: int, eps=None):
        return cls("unitary", d, eps)

    @classmethod
    def parse(cls, name: str, eps=None) -> "MetricGroup":
        """``reals``, ``u1`` (circle) or ``uN`` for N >= 2."""
        name = name.strip().lower()
        if name in ("reals", "r"):
            return cls.reals(eps)
        if name in ("u1", "circle"):
            return cls.circle(eps)
        if name.startswith("u") and name[1:].isdigit():
            return cls.unitary(int(name[1:]), eps)
        raise ValueError(f"unknown group {name!r}; use reals, u1 or uN")

    @property
    def name(self) -> str:
        return {"reals": "reals", "circle": "u1"}.get(self.kind, f"u{self.dim}")

    def __repr__(self):
        return f"MetricGroup({self.name}, eps={self.nss_epsilon})"

    def identity(self):
        if self.kind == "reals":
            return 0.0
        if self.kind == "circle":
            return 1.0 + 0.0j
        return np.eye(self.dim, dtype=complex)

    def mul(self, g, h):
        if self.kind == "reals":
            return g + h
        if self.kind == "circle":
            return g * h
        return g @ h

    def inv(self, g):
        if self.kind == "reals":
            return -g
        if self.kind == "circle":
            return g.conjugate()
        return g.conj().T

    def distance(self, g, h) -> float:
        if self.kind == "reals":
            return abs(g - h)
        if self.kind == "circle":
            return abs(float(np.angle(g * np.conjugate(h))))
        g, h = np.asarray(g), np.asarray(h)
        if g.shape != (self.dim, self.dim) or h.shape != (self.dim, self.dim):
            raise ValueError(f"expected {self.dim}x{self.dim} matrices, got {g.shape} and {h.shape}")
        return float(np.linalg.norm(g - h, 2))

    def distances(self, gs, hs) -> np.ndarray:
        """Vectorized :meth:`distance` over stacked elements."""
        gs, hs = np.asarray(gs), np.asarray(hs)
        if self.kind == "reals":
            return np.abs(gs - hs)
        if self.kind == "circle":
            return np.abs(np.angle(gs * np.conjugate(hs)))
        return np.linalg.svd(gs - hs, compute_uv=False)[..., 0]

    def norm(self, g) -> float:
        return self.distance(g, self.identity())

    def element(self, value):
        """Element from JSON-friendly data: a number, an angle, or rows of ``[re, im]`` pairs."""
        if self.kind == "reals":
            return float(value)
        if self.kind == "circle":
            return complex(math.cos(float(value)), math.sin(float(value)))
        m = np.array([[complex(re, im) for re, im in row] for row in value], dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix")
        if np.linalg.norm(m @ m.conj().T - np.eye(self.dim), 2) > TOL:
            raise ValueError("matrix is not unitary")
        return m

    def element_to_json(self, g):
        if self.kind == "reals":
            return g
        if self.kind == "circle":
            return float(np.angle(g))
        return [[[z.real, z.imag] for z in row] for row in np.asarray(g)]

    def random(self, rng: np.random.Generator, scale: float = 1.0):
        if self.kind == "reals":
            return float(rng.normal(scale=scale))
        if self.kind == "circle":
            return complex(np.exp(1j * rng.uniform(-math.pi, math.pi)))
        return random_unitary(self.dim, rng)


def metric_distance(group: MetricGroup, g, h) -> float:
    return group.distance(g, h)


class GroupSequenceSpec:
    """Odd map ``Z -> G`` given by ``values[k-1]`` for ``1 <= k <= K`` (identity beyond),
    or by a single element for every positive ``k`` (``form="sign"``).

    ``sigma(0) = e`` and ``sigma(-k) = sigma(k)^-1``.
    """

    def __init__(self, group: MetricGroup, values: Sequence, form: str = "finite"):
        if form not in ("finite", "sign"):
            raise ValueError("form must be 'finite' or 'sign'")
        if form == "sign" and len(values) != 1:
            raise ValueError("sign form takes exactly one element")
        self.group = group
        self.form = form
        self.values = list(values)

    @classmethod
    def from_rational(cls, seq: SequenceSpec, group: MetricGroup | None = None) -> "GroupSequenceSpec":
        """Real-valued copy of a rational sequence (finite or sign forms)."""
        from .sequences import Periodic, Sign

        group = group or MetricGroup.reals()
        if isinstance(seq, Sign):
            return cls(group, [float(seq.amplitude)], "sign")
        if isinstance(seq, Periodic):
            raise ValueError("periodic sequences have no finite group-valued form")
        return cls(group, [float(v) for v in seq.values])

    @classmethod
    def circle_sign(cls, angle: float, group: MetricGroup | None = None) -> "GroupSequenceSpec":
        group = group or MetricGroup.circle()
        return cls(group, [group.element(angle)], "sign")

    def __call__(self, k: int):
        if k == 0:
            return self.group.identity()
        m = abs(k)
        if self.form == "sign":
            v = self.values[0]
        elif m <= len(self.values):
            v = self.values[m - 1]
        else:
            return self.group.identity()
        return v if k > 0 else self.group.inv(v)

    def sup_norm(self) -> float:
        return max((self.group.norm(v) for v in self.values), default=0.0)

    def to_json(self) -> dict:
        return {
            "group": self.group.name,
            "form": self.form,
            "values": [self.group.element_to_json(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, data, group: MetricGroup | None = None) -> "GroupSequenceSpec":
        if isinstance(data, str):
            data = json.loads(data)
        if group is None:
            group = MetricGroup.parse(data.get("group", "u1"))
        values = data.get("values")
        if not isinstance(values, list):
            raise ValueError("group sequence JSON needs a 'values' list")
        form = data.get("form", "finite")
        return cls(group, [group.element(v) for v in values], form)


def grp_eval(sigma: GroupSequenceSpec, x: Word):
    """Ordered product of ``sigma(k)`` over the syllables of ``x``."""
    group = sigma.group
    out = group.identity()
    for i, (_, k) in enumerate(x.syllables, 1):
        out = group.mul(out, sigma(k))
        if group.kind == "unitary" and i % RENORMALIZE_EVERY == 0:
            out = reorthonormalize(out)
    return out


@dataclass
class EpsRepReport:
    group: str
    bound_claimed: float
    observed_max: float
    witness: tuple[Word, Word]
    pairs_checked: int
    complete_cancellation_pairs: int
    complete_cancellation_max: float
    smallness: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.observed_max <= self.bound_claimed + TOL

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "bound_claimed": self.bound_claimed,
            "observed_max": self.observed_max,
            "witness": [str(self.witness[0]), str(self.witness[1])],
            "pairs_checked": self.pairs_checked,
            "complete_cancellation_pairs": self.complete_cancellation_pairs,
            "complete_cancellation_max": self.complete_cancellation_max,
            "smallness": self.smallness,
            "holds": self.holds,
        }


def eps_defect_bruteforce(
    sigma: GroupSequenceSpec, k: int, l: int, alphabet: Iterable[str] = ("s", "t"), check: bool = True
) -> EpsRepReport:
    """Max of ``d(g(xy), g(x) g(y))`` over all enumerated pairs.

    Pairs whose junction cancels completely (at least one syllable pair
    removed, no merge) are tallied separately; their distance should vanish.
    """
    if k < 1 or l < 1:
        raise ValueError("need K, L >= 1")
    group = sigma.group
    words = list(enumerate_words(tuple(alphabet), k, l))
    cache: dict[Word, object] = {}

    def g(w: Word):
        v = cache.get(w)
        if v is None:
            v = cache[w] = grp_eval(sigma, w)
        return v

    lhs, rhs, complete = [], [], []
    for x in words:
        gx = g(x)
        for y in words:
            lhs.append(g(multiply(x, y)))
            rhs.append(group.mul(gx, g(y)))
            r, merged = junction(x, y)
            complete.append(r >= 1 and not merged)
    dist = group.distances(np.array(lhs), np.array(rhs))
    complete = np.array(complete)
    idx = int(np.argmax(dist))
    n = len(words)
    bound = 3 * sigma.sup_norm()
    smallness = {
        str(j): small_subgroup_probe(group, sigma(j), group.nss_epsilon).value
        for j in range(1, (1 if sigma.form == "sign" else len(sigma.values)) + 1)
    }
    report = EpsRepReport(
        group=group.name,
        bound_claimed=bound,
        observed_max=float(dist[idx]),
        witness=(words[idx // n], words[idx % n]),
        pairs_checked=len(dist),
        complete_cancellation_pairs=int(complete.sum()),
        complete_cancellation_max=float(dist[complete].max()) if complete.any() else 0.0,
        smallness=smallness,
    )
    if check and not report.holds:
        raise AssertionError(f"bound violated: {report.observed_max} > {bound}")
    return report


class Verdict(str, enum.Enum):
    ESCAPES = "escapes"
    PERIODIC_SMALL = "periodic_small"
    INCONCLUSIVE = "inconclusive"


def small_subgroup_probe(group: MetricGroup, g, eps: float, max_iter: int = 1000) -> Verdict:
    """Classify the cyclic subgroup generated by ``g`` against the ball of radius ``eps``.

    Powers ``g, g^2, ...`` are formed until one leaves the ball (escapes), one
    returns to the identity with all earlier powers inside (periodic_small), or
    ``max_iter`` is reached.  Dense subgroups such as irrational rotations can
    only ever be inconclusive or escape.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    h = group.identity()
    for i in range(1, max_iter + 1):
        h = group.mul(h, g)
        if group.kind == "unitary" and i % RENORMALIZE_EVERY == 0:
            h = reorthonormalize(h)
        dist = group.norm(h)
        if dist >= eps:
            return Verdict.ESCAPES
        if dist <= TOL:
            return Verdict.PERIODIC_SMALL
    return Verdict.INCONCLUSIVE


@dataclass
class NontrivialityReport:
    verdict: str
    sup_norm: float
    eps: float
    reason: str
    probes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "sup_norm": self.sup_norm,
            "eps": self.eps,
            "reason": self.reason,
            "probes": self.probes,
        }


def nontriviality_check(
    sigma: GroupSequenceSpec, eps: float | None = None, max_iter: int = 1000
) -> NontrivialityReport:
    """Certify that ``g`` is at distance more than ``||sigma||`` from every homomorphism.

    Applies when ``0 < ||sigma|| < eps / 2`` for the no-small-subgroups radius
    ``eps``.  The elements ``g(s^l t^{+-1}) = sigma(l) sigma(1)^{+-1}``, whose
    powers are values of ``g``, are probed as supporting evidence.
    """
    group = sigma.group
    eps = group.nss_epsilon if eps is None else float(eps)
    eps0 = sigma.sup_norm()
    if not eps0 > TOL:
        return NontrivialityReport("not applicable", eps0, eps, "sigma is trivial")
    if not eps0 < eps / 2:
        return NontrivialityReport(
            "not applicable", eps0, eps, f"||sigma|| = {eps0:.6g} is not below eps/2 = {eps / 2:.6g}"
        )
    probes = {}
    top = 1 if sigma.form == "sign" else len(sigma.values)
    one = sigma(1)
    for l in range(1, top + 1):
        for sgn, other in (("+", one), ("-", group.inv(one))):
            w = group.mul(sigma(l), other)
            probes[f"g(s^{l} t^{sgn}1)"] = small_subgroup_probe(group, w, eps, max_iter).value
    return NontrivialityReport(
        "non-trivial",
        eps0,
        eps,
        f"0 < ||sigma|| = {eps0:.6g} < eps/2 = {eps / 2:.6g}; no homomorphism lies within ||sigma||",
        probes,
    )
