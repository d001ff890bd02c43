"""Property suites behind ``freeqm suite``; each check returns pass/fail with a short detail."""
from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import free_products as fp
from . import metric_targets as mt
from . import qm_core as qc
from . import sequences as sq
from . import twisted as tw
from .words import (
    Alphabet,
    Word,
    count_words,
    cyclically_reduce,
    enumerate_words,
    invert,
    multiply,
    parse_word,
    power,
)

ALPHABET = Alphabet(("s", "t"))


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str
    seconds: float

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
        }


def sample_sequences() -> list[sq.SequenceSpec]:
    return [
        sq.Sign(1),
        sq.FiniteTable([1]),
        sq.FiniteTable(["1/2", "-1", "3/4"]),
        sq.Periodic(["1", "-1/3"]),
        sq.ZERO,
    ]


def random_word(rng: random.Random, max_len: int = 6, k: int = 3, names=("s", "t")) -> Word:
    n = rng.randint(0, max_len)
    return Word.of((rng.choice(names), rng.choice([e for e in range(-k, k + 1) if e])) for _ in range(n))


# -- words ---------------------------------------------------------------------


def _words_checks(k, l, seed):
    rng = random.Random(seed)

    def group_laws():
        for _ in range(500):
            x, y, z = (random_word(rng) for _ in range(3))
            if multiply(multiply(x, y), z) != multiply(x, multiply(y, z)):
                return False, f"associativity fails at {x}, {y}, {z}"
            if multiply(x, invert(x)) or multiply(Word(), x) != x or invert(invert(x)) != x:
                return False, f"inverse/identity law fails at {x}"
        return True, "500 random triples"

    def counts():
        for n_gen, kk, ll in itertools.product((2, 3), range(1, k + 1), range(0, min(l, 3) + 1)):
            names = ("s", "t", "u")[:n_gen]
            words = list(enumerate_words(names, kk, ll))
            if len(words) != count_words(n_gen, kk, ll) or len(set(words)) != len(words):
                return False, f"count mismatch at |S|={n_gen}, K={kk}, L={ll}"
        return True, "enumeration matches closed-form count"

    def cyclic():
        n = 0
        for w in enumerate_words(ALPHABET, k, l):
            dec = cyclically_reduce(w)
            core = dec.core.syllables
            if dec.reconstruct() != w:
                return False, f"reconstruction fails at {w}"
            if len(core) >= 2 and core[0][0] == core[-1][0] and core[0][1] + core[-1][1] == 0:
                return False, f"core not cyclically reduced at {w}"
            n += 1
        return True, f"{n} words"

    def parse_roundtrip():
        for _ in range(300):
            w = random_word(rng)
            text = str(w)
            # insert a cancelling pair at a random token position
            tokens = text.split()
            pos = rng.randint(0, len(tokens))
            g = rng.choice("st")
            tokens[pos:pos] = [f"{g}^2", f"{g}^-2"]
            if parse_word(" ".join(tokens), ALPHABET) != w:
                return False, f"parse mismatch for {text}"
        return True, "300 insert-cancel spellings"

    return [("group laws", group_laws), ("enumeration count", counts),
            ("cyclic decomposition", cyclic), ("confluent parsing", parse_roundtrip)]


# -- sequences -------------------------------------------------------------------


def _sequences_checks(k, l, seed):
    def oddness():
        for s in sample_sequences():
            for j in range(-100, 101):
                if s(j) + s(-j) != 0:
                    return False, f"{s} not odd at {j}"
        return True, "k in [-100, 100]"

    def triangle():
        for s in sample_sequences():
            if sq.seq_defect(s) > 3 * s.sup_norm():
                return False, f"def > 3 sup for {s}"
        return True, "def <= 3 sup"

    def stabilization():
        for s in sample_sequences():
            w = s.window
            if sq.seq_defect_window_oracle(s, w) != sq.seq_defect_window_oracle(s, 2 * w):
                return False, f"window does not stabilize for {s}"
        return True, "window vs doubled window"

    return [("oddness", oddness), ("triangle bound", triangle), ("window stabilization", stabilization)]


# -- qm_core ---------------------------------------------------------------------


def _qm_checks(k, l, seed, extra=(), sample=10**6):
    qms = [qc.SyllableQM.uniform(ALPHABET, s) for s in [*sample_sequences(), *extra]]
    qms.append(qc.SyllableQM(ALPHABET, {"s": sq.Sign("1/2"), "t": sq.FiniteTable(["1", "-2"])}))
    words = list(enumerate_words(ALPHABET, min(k, 2), min(l, 3)))

    def bound_and_equality():
        for qm in qms:
            full = qc.defect_bruteforce(qm, k, min(l, 3))
            bound = qc.qm_bound(qm)
            if full.oracle_value > bound or full.oracle_value > full.claimed:
                return False, f"bound exceeded for {qm.family}"
            if not full.consistent:
                return False, f"brute force {full.oracle_value} != exact {full.claimed}"
            if l >= 4:
                samp = qc.defect_bruteforce(qm, k, l, sample=sample, seed=seed)
                if samp.oracle_value > full.claimed:
                    return False, f"sampled pairs exceed exact defect for {qm.family}"
        note = f"all pairs at K={k}, L={min(l, 3)}"
        if l >= 4:
            note += f"; {sample} sampled pairs at L={l}"
        return True, note

    def oddness():
        for qm in qms:
            for x in words:
                if qm(invert(x)) != -qm(x):
                    return False, f"g not odd at {x}"
        return True, f"{len(words)} words"

    def decomposition():
        for qm in qms:
            c = qc.defect_exact(qm)
            for x in words:
                if abs(qm(x) - qc.homogenize_closed_form(qm, x)) > c:
                    return False, f"|g - g_h| > def at {x}"
        return True, "|g - g_h| <= def"

    def two_path():
        for qm in qms:
            c = qc.defect_exact(qm)
            for x in words:
                h = qc.homogenize_closed_form(qm, x)
                for n in (64, 256, 1024):
                    est, err = qc.homogenize_limit(qm, x, n, c)
                    if abs(h - est) > err:
                        return False, f"closed form vs limit at {x}, n={n}"
        return True, "n in {64, 256, 1024}"

    def homogeneity_conjugation():
        rng = random.Random(seed)
        for qm in qms:
            for x in words:
                h = qc.homogenize_closed_form(qm, x)
                for m in range(-5, 6):
                    if qc.homogenize_closed_form(qm, power(x, m)) != m * h:
                        return False, f"homogeneity fails at {x}, m={m}"
                w = random_word(rng)
                if qc.homogenize_closed_form(qm, multiply(multiply(w, x), invert(w))) != h:
                    return False, f"conjugation invariance fails at {x}, w={w}"
        return True, "m in [-5, 5], random conjugators"

    def witness_relations():
        n = 0
        for qm in qms[:-1]:
            for kk, ll in itertools.product(range(-4, 5), repeat=2):
                if kk == 0 or ll == 0 or kk + ll == 0:
                    continue
                sigma = qm.family["s"]
                d = sigma(kk) + sigma(ll) - sigma(kk + ll)
                x, y = qc.gromov_witness_words("s", "t", kk, ll)
                xy = multiply(x, y)
                got = (qc.coboundary(qm, x, y), qc.coboundary(qm, x, x),
                       qc.coboundary(qm, y, y), qc.coboundary(qm, xy, xy),
                       qc.homogenized_coboundary(qm, x, y))
                if got != (d, -d, -d, -d, 2 * d):
                    return False, f"relations fail at (k, l) = ({kk}, {ll})"
                n += 1
        return True, f"{n} (sequence, k, l) cases"

    def gromov():
        for qm in qms[:-1]:
            rep = qc.gromov_certificate(qm)
            if rep.conclusion != qc.defect_exact(qm):
                return False, f"norm {rep.conclusion} != def"
        return True, "norm = def sigma"

    def injectivity():
        for qm in qms[:-1]:
            for ll in range(-3, 4):
                for kk in range(-10, 11):
                    if ll:
                        qc.injectivity_witness(qm, "s", "t", ll, kk)
        return True, "l in [-3, 3], k in [-10, 10]"

    return [("quasi-morphism bound and defect equality", bound_and_equality),
            ("oddness of g", oddness), ("bounded decomposition", decomposition),
            ("two-path homogenization", two_path),
            ("homogeneity and conjugation invariance", homogeneity_conjugation),
            ("witness relations", witness_relations), ("Gromov norm", gromov),
            ("injectivity witness", injectivity)]


# -- free products ---------------------------------------------------------------


def _fp_checks(k, l, seed):
    z5z = fp.FreeProduct({"A": fp.FactorGroup.cyclic(5), "C": fp.FactorGroup.integers()})
    z5z_sigma = {
        "A": fp.OddBoundedMap.free(z5z.factors["A"], {1: "1/2", 2: "-1"}),
        "C": fp.OddBoundedMap(z5z.factors["C"], sequence=sq.FiniteTable(["1", "1/3"])),
    }
    psl_sigma = fp.psl2_default_sigma(1)

    def associativity():
        rng = random.Random(seed)
        elems = list(z5z.enumerate(3, int_bound=2))
        for _ in range(500):
            x, y, z = (rng.choice(elems) for _ in range(3))
            if z5z.multiply(z5z.multiply(x, y), z) != z5z.multiply(x, z5z.multiply(y, z)):
                return False, f"associativity fails at {x}, {y}, {z}"
        return True, "500 random triples in Z5 * Z"

    def bound():
        out = []
        for prod, sigma, ib in ((fp.PSL2, psl_sigma, 1), (z5z, z5z_sigma, min(k, 2))):
            words = list(prod.enumerate(min(l, 4), int_bound=ib))
            bnd = fp.fp_bound(sigma)
            vals = {w: fp.fp_eval(sigma, w) for w in words}
            worst = Fraction(0)
            for x in words:
                for y in words:
                    c = abs(vals[x] + vals[y] - fp.fp_eval(sigma, prod.multiply(x, y)))
                    worst = max(worst, c)
            if worst > bnd:
                return False, f"bound exceeded in {prod!r}: {worst} > {bnd}"
            out.append(f"{prod!r}: max {worst} <= {bnd}")
        return True, "; ".join(out)

    def dimensions():
        for n in range(2, 13):
            table = [[(a + b) % n for b in range(n)] for a in range(n)]
            if fp.odd_map_dimension(fp.FactorGroup.from_table(table)) != (n - 1) // 2:
                return False, f"dimension mismatch for Z{n}"
            if fp.odd_map_dimension(fp.FactorGroup.cyclic(n)) != (n - 1) // 2:
                return False, f"closed form mismatch for Z{n}"
        if fp.v0_dimension(fp.PSL2) != 1:
            return False, "dim V0(Z2 * Z3) != 1"
        return True, "n = 2..12; dim V0(Z2 * Z3) = 1"

    def psl2():
        lim = 10 if k < 2 else 50
        n = 0
        for m in unimodular_matrices(-lim, lim):
            if not fp.psl2_equal(fp.psl2_matrix(fp.psl2_parse(m)), m):
                return False, f"roundtrip fails for {m}"
            n += 1
        for j in range(-20, 21):
            if fp.psl2_qm(psl_sigma, [[1, j], [0, 1]]) != j:
                return False, f"g(T^{j}) != {j}"
        return True, f"{n} matrices with entries in [-{lim}, {lim}]"

    return [("associativity", associativity), ("quasi-morphism bound", bound),
            ("odd map dimensions", dimensions), ("PSL2 roundtrip and T^k", psl2)]


def unimodular_matrices(lo: int, hi: int):
    """Every integer matrix with entries in ``[lo, hi]`` and determinant 1."""
    rng = range(lo, hi + 1)
    for a, b, c in itertools.product(rng, rng, rng):
        if a == 0:
            if b * c == -1:
                for d in rng:
                    yield ((a, b), (c, d))
        elif (1 + b * c) % a == 0 and lo <= (1 + b * c) // a <= hi:
            yield ((a, b), (c, (1 + b * c) // a))


# -- metric targets --------------------------------------------------------------


def unitary_sigma(amplitude: float, rng: np.random.Generator, d: int = 2, length: int = 2):
    """Finite table in U(d) whose largest distance to the identity is ``amplitude``."""
    group = mt.MetricGroup.unitary(d)
    theta = 2 * math.asin(amplitude / 2)
    values = []
    for i in range(length):
        v = mt.random_unitary(d, rng)
        angle = theta if i == 0 else theta * rng.uniform(0.2, 1.0)
        phases = np.exp(1j * angle * np.linspace(1, -1, d))
        values.append(v @ np.diag(phases) @ v.conj().T)
    return mt.GroupSequenceSpec(group, values)


def circle_sigma(amplitude: float, rng: np.random.Generator, length: int = 2):
    group = mt.MetricGroup.circle()
    angles = [amplitude] + [amplitude * rng.uniform(-1, 1) for _ in range(length - 1)]
    return mt.GroupSequenceSpec(group, [group.element(a) for a in angles])


def _metric_checks(k, l, seed):
    kk, ll = min(k, 2), min(l, 3)

    def bi_invariance():
        rng = np.random.default_rng(seed)
        for group in (mt.MetricGroup.reals(), mt.MetricGroup.circle(), mt.MetricGroup.unitary(2)):
            for _ in range(1000):
                g, x, y = (group.random(rng) for _ in range(3))
                dxy = group.distance(x, y)
                if abs(group.distance(group.mul(g, x), group.mul(g, y)) - dxy) > 1e-9:
                    return False, f"left invariance fails in {group.name}"
                if abs(group.distance(group.mul(x, g), group.mul(y, g)) - dxy) > 1e-9:
                    return False, f"right invariance fails in {group.name}"
        return True, "1000 triples per group"

    def bound():
        rng = np.random.default_rng(seed)
        notes = []
        for sigma in (circle_sigma(0.3, rng), unitary_sigma(0.3, rng)):
            rep = mt.eps_defect_bruteforce(sigma, kk, ll, check=False)
            if not rep.holds:
                return False, f"{rep.group}: {rep.observed_max} > {rep.bound_claimed}"
            if rep.complete_cancellation_pairs and rep.complete_cancellation_max > 1e-9:
                return False, f"{rep.group}: complete cancellation distance {rep.complete_cancellation_max}"
            group = sigma.group
            for x in enumerate_words(ALPHABET, kk, ll):
                if group.distance(mt.grp_eval(sigma, invert(x)), group.inv(mt.grp_eval(sigma, x))) > 1e-9:
                    return False, f"{rep.group}: oddness fails at {x}"
            notes.append(f"{rep.group} max {rep.observed_max:.4f} <= {rep.bound_claimed:.4f}")
        return True, "; ".join(notes)

    def reals_agree():
        for s in sample_sequences():
            if isinstance(s, sq.Periodic):
                continue
            qm = qc.SyllableQM.uniform(ALPHABET, s)
            gs = mt.GroupSequenceSpec.from_rational(s)
            for x in enumerate_words(ALPHABET, kk, ll):
                if mt.grp_eval(gs, x) != float(qm(x)):
                    return False, f"reals path disagrees at {x}"
        return True, "exact float agreement"

    def nontriviality():
        circle = mt.MetricGroup.circle(2.0)
        ok = (
            mt.nontriviality_check(mt.GroupSequenceSpec.circle_sign(0.3, circle)).verdict == "non-trivial"
            and mt.nontriviality_check(mt.GroupSequenceSpec.circle_sign(0.0, circle)).verdict == "not applicable"
            and mt.nontriviality_check(mt.GroupSequenceSpec.circle_sign(1.5, circle)).verdict == "not applicable"
            and mt.small_subgroup_probe(circle, complex(np.exp(1j * math.pi / 4)), 0.5) == "escapes"
        )
        return ok, "amplitudes 0.3 / 0 / 1.5 at eps = 2.0"

    return [("bi-invariance", bi_invariance), ("epsilon-representation bound", bound),
            ("reals path agreement", reals_agree), ("non-triviality logic", nontriviality)]


# -- twisted ---------------------------------------------------------------------


def _twisted_checks(k, l, seed):
    kk, ll = min(k, 2), min(l, 3)

    def bound():
        worst = 0.0
        for i in range(5):
            pi, sigma = tw.random_twisted_setup(ALPHABET, 2, kk, seed + i)
            rep = tw.twisted_bound_check(pi, sigma, kk, ll, seed + i)
            if not rep.holds:
                return False, f"seed {seed + i}: {rep.observed_max} vs {rep.bound}, oddness {rep.oddness_defect}"
            worst = max(worst, rep.observed_max / rep.bound)
        return True, f"5 random reps, max ratio {worst:.3f}"

    def trivial_reduction():
        s = sq.FiniteTable(["1/2", "-1"])
        qm = qc.SyllableQM.uniform(ALPHABET, s)
        pi = tw.UnitaryRep.trivial(ALPHABET, 2)
        tables = {g: np.array([[0, float(s(j))] for j in (1, 2)]) for g in ALPHABET}
        sigma = tw.TwistedSequence(pi, tables)
        words = list(enumerate_words(ALPHABET, kk, ll))
        for x in words:
            if tw.twisted_eval(pi, sigma, x)[1] != float(qm(x)):
                return False, f"trivial rep disagrees at {x}"
        return True, f"{len(words)} words"

    def unitarity():
        rng = random.Random(seed)
        pi, _ = tw.random_twisted_setup(ALPHABET, 2, 1, seed)
        for _ in range(50):
            w = Word.of((rng.choice("st"), rng.choice([-3, -2, -1, 1, 2, 3])) for _ in range(64))
            u = tw.rep_apply(pi, w)
            if tw.operator_norm(u @ u.conj().T - np.eye(2)) > 1e-9:
                return False, f"unitarity drift at {w}"
        return True, "50 words of 64 syllables"

    return [("coboundary bound and oddness", bound), ("trivial rep reduction", trivial_reduction),
            ("unitarity", unitarity)]


SUITES: dict[str, Callable] = {
    "words": _words_checks,
    "sequences": _sequences_checks,
    "qm_core": _qm_checks,
    "free_products": _fp_checks,
    "metric_targets": _metric_checks,
    "twisted": _twisted_checks,
}


def run_suite(k: int = 3, l: int = 4, seed: int = 0, only: list[str] | None = None,
              extra_sequences: tuple[sq.SequenceSpec, ...] = ()) -> list[CheckResult]:
    """Run the module suites; ``extra_sequences`` join the quasi-morphism checks."""
    results = []
    for suite, factory in SUITES.items():
        if only and suite not in only:
            continue
        checks = factory(k, l, seed, extra_sequences) if suite == "qm_core" else factory(k, l, seed)
        for name, check in checks:
            t0 = time.perf_counter()
            try:
                passed, detail = check()
            except Exception as exc:  # a crash is a failed check, not a crashed suite
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            results.append(CheckResult(suite, name, bool(passed), detail, time.perf_counter() - t0))
    return results
