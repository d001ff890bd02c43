import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freeqm import kernels
from freeqm.qm_core import SyllableQM, coboundary
from freeqm.sequences import FiniteTable, Periodic, Sign
from freeqm.words import Alphabet, enumerate_words

AB = Alphabet(("s", "t"))
needs_ext = pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernel not built")

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=9)
specs = st.one_of(
    st.lists(rationals, max_size=3).map(FiniteTable),
    st.lists(rationals, min_size=1, max_size=2).map(Periodic),
    rationals.map(Sign),
)


def slow_extremum(qm, ws, pairs):
    best, arg = Fraction(-1), None
    for i, j in pairs:
        v = coboundary(qm, ws[i], ws[j])
        if abs(v) > best:
            best, arg = abs(v), v
    return best, arg


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
    with pytest.raises(ValueError):
        kernels._select("fortran")


@settings(max_examples=25, deadline=None)
@given(specs)
def test_python_kernel_matches_fraction_path(sigma):
    qm = SyllableQM.uniform(AB, sigma)
    ws = list(enumerate_words(AB, 1, 2))
    packed = kernels.PackedWords(ws, AB.names)
    best, signed, i, j = kernels.coboundary_extremum(packed, qm.syllable_value, backend="python")
    n = len(ws)
    ref, _ = slow_extremum(qm, ws, [(a, b) for a in range(n) for b in range(n)])
    assert best == ref
    assert coboundary(qm, ws[i], ws[j]) == signed and abs(signed) == best


@needs_ext
@settings(max_examples=25, deadline=None)
@given(specs, st.integers(1, 2), st.integers(1, 3))
def test_backends_agree(sigma, k, l):
    qm = SyllableQM.uniform(AB, sigma)
    ws = list(enumerate_words(AB, k, l))
    packed = kernels.PackedWords(ws, AB.names)
    py = kernels.coboundary_extremum(packed, qm.syllable_value, backend="python")
    cy = kernels.coboundary_extremum(packed, qm.syllable_value, backend="cython")
    assert py == cy


@needs_ext
def test_backends_agree_on_sampled_pairs():
    qm = SyllableQM.uniform(AB, FiniteTable(["1/3", "-5/7"]))
    ws = list(enumerate_words(AB, 3, 3))
    packed = kernels.PackedWords(ws, AB.names)
    rng = np.random.default_rng(11)
    left = rng.integers(0, len(ws), size=4000, dtype=np.int64)
    right = rng.integers(0, len(ws), size=4000, dtype=np.int64)
    py = kernels.coboundary_extremum(packed, qm.syllable_value, left, right, backend="python")
    cy = kernels.coboundary_extremum(packed, qm.syllable_value, left, right, backend="cython")
    assert py == cy
    ref, _ = slow_extremum(qm, ws, zip(left.tolist(), right.tolist()))
    assert py[0] == ref


def test_huge_values_fall_back_exactly():
    qm = SyllableQM.uniform(AB, FiniteTable([10**40, Fraction(1, 3)]))
    ws = list(enumerate_words(AB, 2, 2))
    packed = kernels.PackedWords(ws, AB.names)
    best, *_ = kernels.coboundary_extremum(packed, qm.syllable_value)
    n = len(ws)
    ref, _ = slow_extremum(qm, ws, [(a, b) for a in range(n) for b in range(n)])
    assert best == ref


def test_scaled_table():
    table, denom = kernels.scaled_table(lambda g, k: Fraction(k, 6) if g == "s" else Fraction(k, 4), "st", 1)
    assert denom == 12
    assert table == [[-2, 0, 2], [-3, 0, 3]]


def test_env_var_forces_python_backend():
    env = dict(os.environ, FREEQM_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import freeqm; print(freeqm.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "python"
