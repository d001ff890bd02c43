import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freeqm.metric_targets import random_unitary
from freeqm.qm_core import SyllableQM, coboundary
from freeqm.sequences import FiniteTable
from freeqm.twisted import (
    TwistedSequence,
    UnitaryRep,
    operator_norm,
    random_twisted_setup,
    rep_apply,
    twisted_bound_check,
    twisted_coboundary,
    twisted_eval,
)
from freeqm.words import Alphabet, Word, enumerate_words, multiply, parse_word

AB = Alphabet(("s", "t"))
words = st.lists(
    st.tuples(st.sampled_from("st"), st.integers(-3, 3).filter(bool)), max_size=6
).map(Word.of)


def test_operator_norm_examples():
    assert operator_norm(np.eye(3)) == pytest.approx(1.0)
    assert operator_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0)
    assert operator_norm(np.zeros((2, 2))) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_operator_norm_matches_svd(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert operator_norm(a) == pytest.approx(np.linalg.svd(a, compute_uv=False)[0], rel=1e-9)


def test_rep_validation():
    with pytest.raises(ValueError):
        UnitaryRep({"s": np.eye(2), "t": 2 * np.eye(2)})
    with pytest.raises(ValueError):
        UnitaryRep({"s": np.eye(2), "t": np.eye(3)})


def test_rep_json_roundtrip():
    pi = UnitaryRep.random(AB, 2, np.random.default_rng(4))
    back = UnitaryRep.from_json(pi.to_json())
    for g in AB:
        assert np.allclose(back.generators[g], pi.generators[g])


@given(words, words)
def test_rep_is_homomorphism(x, y):
    pi = UnitaryRep.random(AB, 2, np.random.default_rng(9))
    assert np.allclose(rep_apply(pi, multiply(x, y)), rep_apply(pi, x) @ rep_apply(pi, y), atol=1e-9)


def naive_twisted_eval(pi, sigma, x):
    """Direct sum over syllables with the prefix recomputed each time."""
    total = np.zeros(pi.dim, dtype=complex)
    for i, (g, k) in enumerate(x.syllables):
        prefix = rep_apply(pi, Word(x.syllables[:i]))
        total += prefix @ sigma(g, k)
    return total


@settings(max_examples=50, deadline=None)
@given(words, st.integers(0, 50))
def test_eval_matches_naive(x, seed):
    pi, sigma = random_twisted_setup(AB, 2, 2, seed)
    assert np.allclose(twisted_eval(pi, sigma, x), naive_twisted_eval(pi, sigma, x), atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(words, words, st.integers(0, 50))
def test_twisted_coboundary_bounded(x, y, seed):
    pi, sigma = random_twisted_setup(AB, 2, 2, seed)
    c = twisted_coboundary(pi, sigma, x, y)
    assert np.linalg.norm(c) <= 3 * sigma.sup_norm() + 1e-9


@pytest.mark.parametrize("seed", range(3))
def test_oddness(seed):
    _, sigma = random_twisted_setup(AB, 2, 3, seed)
    assert sigma.oddness_defect() <= 1e-9


def test_bound_check_report():
    pi, sigma = random_twisted_setup(AB, 2, 2, 0)
    rep = twisted_bound_check(pi, sigma, 2, 2, seed=0)
    assert rep.holds
    assert rep.pairs_checked == len(list(enumerate_words(AB, 2, 2))) ** 2
    x, y = rep.witness
    assert np.linalg.norm(twisted_coboundary(pi, sigma, x, y)) == pytest.approx(rep.observed_max)


@given(words, words)
def test_trivial_rep_reduces_to_real_path(x, y):
    pi = UnitaryRep.trivial(AB, 1)
    table = np.array([[0.5], [-1.25]])
    sigma = TwistedSequence(pi, {"s": table, "t": table})
    qm = SyllableQM.uniform(AB, FiniteTable(["1/2", "-5/4"]))
    assert twisted_eval(pi, sigma, x)[0] == pytest.approx(float(qm(x)))
    assert twisted_coboundary(pi, sigma, x, y)[0].real == pytest.approx(float(coboundary(qm, x, y)))


def test_sequence_validation():
    pi = UnitaryRep({"s": random_unitary(2, np.random.default_rng(1)), "t": np.eye(2)})
    with pytest.raises(ValueError):
        TwistedSequence(pi, {"s": np.ones((1, 3))})
    with pytest.raises(ValueError):
        TwistedSequence(pi, {"u": np.ones((1, 2))})
    sigma = TwistedSequence(pi, {"s": np.ones((1, 2))})
    assert np.allclose(sigma("s", 5), 0) and np.allclose(sigma("t", 1), 0)
    assert np.allclose(twisted_eval(pi, sigma, parse_word("", AB)), 0)


def test_rep_apply_examples():
    pi = UnitaryRep({"s": np.diag([1j, 1]), "t": np.eye(2)})
    assert np.allclose(rep_apply(pi, Word((("s", 2),))), np.diag([-1, 1]))
    assert np.allclose(rep_apply(pi, Word()), np.eye(2))
    with pytest.raises(ValueError):
        rep_apply(pi, Word((("u", 1),)))
