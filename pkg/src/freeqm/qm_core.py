"""Syllable-sum quasi-morphisms on free groups.

``g(x)`` is the sum of ``sigma_s(k)`` over the syllables ``s^k`` of the reduced
word ``x``.  Everything here is exact rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from . import kernels
from .sequences import SequenceSpec, seq_defect, seq_defect_argmax
from .words import (
    Alphabet,
    Word,
    cyclically_reduce,
    enumerate_words,
    multiply,
    power,
)

__all__ = [
    "DefectCertificate",
    "GromovNormReport",
    "SyllableQM",
    "coboundary",
    "defect_bruteforce",
    "defect_exact",
    "defect_radius",
    "evaluate",
    "gromov_witness",
    "gromov_witness_words",
    "homogenize_closed_form",
    "homogenize_limit",
    "homogenized_coboundary",
    "homogenized_coboundary_identity",
    "injectivity_witness",
    "qm_bound",
]

QuasiMorphism = Callable[[Word], Fraction]


class WitnessMismatch(AssertionError):
    """A closed-form identity failed; indicates a bug or a violated hypothesis."""


@dataclass(frozen=True)
class SyllableQM:
    alphabet: Alphabet
    family: Mapping[str, SequenceSpec]

    def __post_init__(self):
        if not isinstance(self.alphabet, Alphabet):
            object.__setattr__(self, "alphabet", Alphabet(tuple(self.alphabet)))
        if len(self.alphabet) < 2:
            raise ValueError("need at least two generators")
        missing = [g for g in self.alphabet if g not in self.family]
        if missing:
            raise ValueError(f"no sequence for generators {missing}")
        object.__setattr__(self, "family", dict(self.family))

    @classmethod
    def uniform(cls, alphabet, sigma: SequenceSpec) -> "SyllableQM":
        alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(tuple(alphabet))
        return cls(alphabet, {g: sigma for g in alphabet})

    def syllable_value(self, gen: str, k: int) -> Fraction:
        return self.family[gen](k)

    def __call__(self, x: Word) -> Fraction:
        return evaluate(self, x)

    def sup_norm(self) -> Fraction:
        return max(s.sup_norm() for s in self.family.values())

    def is_uniform(self) -> bool:
        return len(set(self.family[g] for g in self.alphabet)) == 1


def evaluate(qm: SyllableQM, x: Word) -> Fraction:
    total = Fraction(0)
    for g, k in x.syllables:
        if g not in qm.family:
            raise ValueError(f"generator {g!r} is not in alphabet {list(qm.alphabet)}")
        total += qm.family[g](k)
    return total


eval = evaluate  # noqa: A001 - module-level alias, call as ``qm_core.eval``


def coboundary(f: QuasiMorphism, x: Word, y: Word) -> Fraction:
    """``f(x) + f(y) - f(xy)``."""
    return f(x) + f(y) - f(multiply(x, y))


def qm_bound(qm: SyllableQM) -> Fraction:
    """Uniform bound ``3 * max_s ||sigma_s||`` on every coboundary value."""
    return 3 * qm.sup_norm()


@dataclass
class DefectCertificate:
    claimed: Fraction
    oracle_value: Fraction
    argmax_pair: tuple[Word, Word]
    argmax_value: Fraction
    k: int
    l: int
    pairs_checked: int
    covered: bool = True
    sampled: bool = False
    seed: int | None = None

    @property
    def agrees(self) -> bool:
        return self.claimed == self.oracle_value

    @property
    def consistent(self) -> bool:
        """Never above the exact defect, and equal to it when the budget covers the argmax."""
        if self.oracle_value > self.claimed:
            return False
        return self.agrees or not (self.covered and not self.sampled)

    def to_json(self) -> dict:
        return {
            "claimed": str(self.claimed),
            "oracle_value": str(self.oracle_value),
            "argmax_pair": [str(self.argmax_pair[0]), str(self.argmax_pair[1])],
            "argmax_value": str(self.argmax_value),
            "budget": {"K": self.k, "L": self.l},
            "pairs_checked": self.pairs_checked,
            "covered": self.covered,
            "sampled": self.sampled,
            "seed": self.seed,
            "agrees": self.agrees,
        }


def defect_exact(qm: SyllableQM) -> Fraction:
    """``def g = def sigma``; for per-generator families the max over generators."""
    return max(seq_defect(s) for s in set(qm.family.values()))


def defect_radius(qm: SyllableQM) -> int:
    """Smallest ``r`` such that ``|sigma_s(k)+sigma_s(l)-sigma_s(k+l)|`` reaches the defect
    for some generator ``s`` and ``|k|, |l| <= r``; word budgets with ``K >= r`` see it."""
    target = defect_exact(qm)
    if target == 0:
        return 1
    best = None
    for sigma in set(qm.family.values()):
        k, l, d = seq_defect_argmax(sigma)
        if d == target:
            r = max(abs(k), abs(l))
            best = r if best is None else min(best, r)
    return best


def defect_bruteforce(
    qm: SyllableQM,
    k: int,
    l: int,
    *,
    sample: int | None = None,
    seed: int = 0,
    backend: str | None = None,
) -> DefectCertificate:
    """Max ``|coboundary|`` over pairs of enumerated words with ``|exp| <= k`` and ``<= l`` syllables.

    All ordered pairs are visited unless ``sample`` is given, in which case that
    many pairs are drawn uniformly (seeded).
    """
    if k < 1 or l < 1:
        raise ValueError("need K, L >= 1")
    words = list(enumerate_words(qm.alphabet, k, l))
    packed = kernels.PackedWords(words, qm.alphabet.names)
    left = right = None
    n = len(words)
    if sample is not None and sample < n * n:
        import numpy as np

        rng = np.random.default_rng(seed)
        left = rng.integers(0, n, size=sample, dtype=np.int64)
        right = rng.integers(0, n, size=sample, dtype=np.int64)
        checked = sample
    else:
        checked = n * n
    best, signed, i, j = kernels.coboundary_extremum(
        packed, qm.syllable_value, left, right, backend=backend
    )
    return DefectCertificate(
        claimed=defect_exact(qm),
        oracle_value=best,
        argmax_pair=(words[i], words[j]),
        argmax_value=signed,
        k=k,
        l=l,
        pairs_checked=checked,
        covered=k >= defect_radius(qm),
        sampled=left is not None,
        seed=seed if left is not None else None,
    )


def injectivity_witness(qm: SyllableQM, s: str, t: str, l: int, k: int) -> Fraction:
    """Evaluate ``g((s^l t^l)^k)``; for a shared sequence it must equal ``2k sigma(l)``."""
    if s == t:
        raise ValueError("s and t must be distinct")
    x = power(Word.of([(s, l), (t, l)]), k)
    value = qm(x)
    if qm.family[s] == qm.family[t]:
        expected = 2 * k * qm.family[s](l)
        if value != expected:
            raise WitnessMismatch(f"g((s^{l} t^{l})^{k}) = {value}, expected {expected}")
    return value


def homogenize_limit(
    f: QuasiMorphism, x: Word, n: int, defect: Fraction | None = None
) -> tuple[Fraction, Fraction]:
    """``(f(x^n) / n, def f / n)``; the homogenization lies within the bound of the estimate."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if defect is None:
        if not isinstance(f, SyllableQM):
            raise ValueError("pass the defect of f explicitly")
        defect = defect_exact(f)
    return Fraction(f(power(x, n)), n), Fraction(defect, n)


def homogenize_closed_form(qm: SyllableQM, x: Word) -> Fraction:
    """Homogenization of ``g`` at ``x``, evaluated on the cyclically reduced core.

    A core of at most one syllable is a power and gives 0; otherwise the value
    is ``g(y) - coboundary(y, y)`` for the core ``y``.  Working on the core is
    what makes the formula valid for conjugates of powers such as ``s t s^-1``.
    """
    core = cyclically_reduce(x).core
    if core.is_power():
        return Fraction(0)
    return qm(core) - coboundary(qm, core, core)


def homogenized_coboundary(qm: SyllableQM, x: Word, y: Word) -> Fraction:
    """Coboundary of the homogenized quasi-morphism; cross-checked against the
    four-term identity whenever none of ``x``, ``y``, ``xy`` is conjugate to a power."""
    xy = multiply(x, y)
    value = (
        homogenize_closed_form(qm, x)
        + homogenize_closed_form(qm, y)
        - homogenize_closed_form(qm, xy)
    )
    if not any(cyclically_reduce(w).core.is_power() for w in (x, y, xy)):
        lemma = homogenized_coboundary_identity(qm, x, y)
        if lemma != value:
            raise WitnessMismatch(f"four-term identity gives {lemma}, closed form {value}")
    return value


def homogenized_coboundary_identity(qm: SyllableQM, x: Word, y: Word) -> Fraction:
    """``cb(x,y) + cb(xy,xy) - cb(x,x) - cb(y,y)`` with ``cb`` the coboundary of ``g``."""
    xy = multiply(x, y)
    return (
        coboundary(qm, x, y)
        + coboundary(qm, xy, xy)
        - coboundary(qm, x, x)
        - coboundary(qm, y, y)
    )


def gromov_witness_words(s: str, t: str, k: int, l: int) -> tuple[Word, Word]:
    x = Word.of([(s, -k), (t, -k), (s, 1), (t, -l), (s, k)])
    y = Word.of([(s, l), (t, -l), (s, 1), (t, -k), (s, -l)])
    return x, y


@dataclass
class GromovNormReport:
    defect: Fraction
    homogenized_defect_lower_bound: Fraction
    witness: tuple[Word, Word]
    conclusion: Fraction
    d: Fraction
    k: int
    l: int
    relations: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "defect": str(self.defect),
            "homogenized_defect_lower_bound": str(self.homogenized_defect_lower_bound),
            "witness": [str(self.witness[0]), str(self.witness[1])],
            "conclusion": str(self.conclusion),
            "d": str(self.d),
            "k": self.k,
            "l": self.l,
            "relations": {key: str(v) for key, v in self.relations.items()},
        }


def gromov_witness(qm: SyllableQM, s: str, t: str, k: int, l: int) -> GromovNormReport:
    """Certify the Gromov norm of the bounded class of ``g``.

    Builds the two witness words, checks the four coboundary relations exactly,
    evaluates the homogenized coboundary (``2d``) and concludes
    ``norm = def sigma`` when ``2d >= 2 def sigma``.  The conclusion combines
    ``norm <= ||cb g|| = def sigma`` with Bavard's bound
    ``norm >= ||cb g_h|| / 2``.
    """
    if s == t:
        raise ValueError("s and t must be distinct")
    if k == 0 or l == 0 or k + l == 0:
        raise WitnessMismatch("need k, l and k + l nonzero")
    sigma = qm.family[s]
    if qm.family[t] != sigma:
        raise ValueError("the witness construction needs sigma_s == sigma_t")
    d = sigma(k) + sigma(l) - sigma(k + l)
    x, y = gromov_witness_words(s, t, k, l)
    xy = multiply(x, y)
    relations = {
        "cb(x,y)": coboundary(qm, x, y),
        "cb(x,x)": coboundary(qm, x, x),
        "cb(y,y)": coboundary(qm, y, y),
        "cb(xy,xy)": coboundary(qm, xy, xy),
    }
    expected = {"cb(x,y)": d, "cb(x,x)": -d, "cb(y,y)": -d, "cb(xy,xy)": -d}
    for key, want in expected.items():
        if relations[key] != want:
            raise WitnessMismatch(f"{key} = {relations[key]}, expected {want}")
    hcb = homogenized_coboundary(qm, x, y)
    if hcb != 2 * d:
        raise WitnessMismatch(f"homogenized coboundary {hcb} != 2d = {2 * d}")
    relations["cb_h(x,y)"] = hcb
    defect = defect_exact(qm)
    lower = abs(hcb)
    if lower < 2 * defect:
        raise WitnessMismatch(
            f"witness at (k, l) = ({k}, {l}) gives {lower} < 2 def = {2 * defect}; pick the argmax"
        )
    return GromovNormReport(
        defect=defect,
        homogenized_defect_lower_bound=lower,
        witness=(x, y),
        conclusion=defect,
        d=d,
        k=k,
        l=l,
        relations=relations,
    )


def gromov_certificate(qm: SyllableQM, s: str | None = None, t: str | None = None) -> GromovNormReport:
    """Run :func:`gromov_witness` at the defect argmax of the shared sequence."""
    names = qm.alphabet.names
    s = s or names[0]
    t = t or next(g for g in names if g != s)
    k, l, _ = seq_defect_argmax(qm.family[s])
    return gromov_witness(qm, s, t, k, l)


__all__.append("gromov_certificate")
