import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freeqm import free_products as fp
from freeqm.free_products import (
    PSL2,
    FactorGroup,
    FPWord,
    FreeProduct,
    OddBoundedMap,
    fp_bound,
    fp_eval,
    fp_injectivity_witness,
    fp_multiply,
    fp_sigma_from_json,
    odd_map_dimension,
    psl2_default_sigma,
    psl2_equal,
    psl2_matrix,
    psl2_parse,
    psl2_qm,
    v0_dimension,
)
from freeqm.sequences import Sign

Z2, Z3, Z = FactorGroup.cyclic(2), FactorGroup.cyclic(3), FactorGroup.integers()
G = FreeProduct({"A": Z2, "B": Z3})
H = FreeProduct({"A": Z3, "C": Z})
T_WORD = PSL2.word([("A", 1), ("B", 1)])

fp_letters = st.lists(st.tuples(st.sampled_from("AB"), st.integers(0, 2)), max_size=8).map(
    lambda ls: [(f, a % (2 if f == "A" else 3)) for f, a in ls]
)


def odd_dimension_oracle(group: FactorGroup) -> int:
    """Null-space dimension of the linear constraints f(a) + f(a^-1) = 0 over all a."""
    n = group.order
    rows = []
    for a in range(n):
        r = np.zeros(n)
        r[a] += 1
        r[group.inv(a)] += 1
        rows.append(r)
    return n - np.linalg.matrix_rank(np.array(rows))


@pytest.mark.parametrize("n, expected", [(2, 0), (3, 1), (4, 1), (5, 2), (6, 2)])
def test_odd_map_dimension(n, expected):
    g = FactorGroup.cyclic(n)
    assert odd_map_dimension(g) == expected == odd_dimension_oracle(g)


def test_odd_map_dimension_klein_table():
    klein = FactorGroup.from_table([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]])
    assert odd_map_dimension(klein) == 0 == odd_dimension_oracle(klein)


def test_odd_map_dimension_integers_raises():
    with pytest.raises(ValueError):
        odd_map_dimension(Z)
    with pytest.raises(ValueError):
        FactorGroup.cyclic(1)


def test_bad_table_rejected():
    with pytest.raises(ValueError):
        FactorGroup.from_table([[0, 1], [1, 1]])


def test_v0_dimension():
    assert v0_dimension(G) == 1
    assert v0_dimension(FreeProduct.parse("A=Z2,B=Z2")) == 0
    assert v0_dimension(FreeProduct.parse("A=Z3,B=Z5,C=Z7")) == 6


@pytest.mark.parametrize(
    "x, y, expected",
    [
        ([("A", 1)], [("A", 1)], []),
        ([("B", 1)], [("B", 1)], [("B", 2)]),
        ([("A", 1), ("B", 1)], [("B", 2), ("A", 1)], []),
    ],
)
def test_fp_multiply_examples(x, y, expected):
    assert fp_multiply(G, G.word(x), G.word(y)) == FPWord(tuple(expected))


def test_fp_eval_examples():
    sigma = psl2_default_sigma(1)
    assert fp_eval(sigma, G.word([("A", 1), ("B", 1)])) == 1
    assert fp_eval(sigma, G.word([("B", 2)])) == -1
    assert fp_eval(sigma, FPWord()) == 0


def test_odd_map_checks():
    m = OddBoundedMap.free(Z3, {1: "1/2"})
    assert m(2) == Fraction(-1, 2) and m(0) == 0
    with pytest.raises(ValueError):
        OddBoundedMap(Z2, {1: 1})
    with pytest.raises(ValueError):
        OddBoundedMap(Z)


@given(fp_letters, fp_letters, fp_letters)
def test_associativity(a, b, c):
    x, y, z = G.word(a), G.word(b), G.word(c)
    assert G.multiply(G.multiply(x, y), z) == G.multiply(x, G.multiply(y, z))
    # normal form of a concatenation equals the product of normal forms
    assert G.word(a + b) == G.multiply(x, y)


@given(fp_letters)
def test_inverse(a):
    x = G.word(a)
    assert G.multiply(x, G.inverse(x)) == FPWord()
    assert G.inverse(G.inverse(x)) == x


@given(fp_letters, fp_letters)
def test_antisymmetry_and_bound(a, b):
    sigma = {"A": OddBoundedMap(Z2, {}), "B": OddBoundedMap.free(Z3, {1: "2/3"})}
    x, y = G.word(a), G.word(b)
    assert fp_eval(sigma, G.inverse(x)) == -fp_eval(sigma, x)
    cb = fp_eval(sigma, x) + fp_eval(sigma, y) - fp_eval(sigma, G.multiply(x, y))
    assert abs(cb) <= fp_bound(sigma)


def test_bound_on_enumerated_pairs_with_integer_factor():
    sigma = {"A": OddBoundedMap.free(Z3, {1: 1}), "C": OddBoundedMap(Z, sequence=Sign(1))}
    ws = list(H.enumerate(3, 2))
    worst = max(
        abs(fp_eval(sigma, x) + fp_eval(sigma, y) - fp_eval(sigma, H.multiply(x, y)))
        for x in ws
        for y in ws
    )
    assert worst <= fp_bound(sigma) == 3


def test_enumerate_counts():
    ws = list(G.enumerate(4))
    assert len(ws) == len(set(ws))
    brute = {G.word(ls) for n in range(5) for ls in itertools.product([("A", 1), ("B", 1), ("B", 2)], repeat=n)}
    assert {w for w in brute if len(w) <= 4} == set(ws)


@pytest.mark.parametrize("k", [-3, -1, 0, 1, 5])
def test_fp_injectivity_witness(k):
    sigma = psl2_default_sigma(Fraction(1, 2))
    assert fp_injectivity_witness(G, sigma, "A", "B", 1, 1, k) == Fraction(k, 2)
    assert fp_injectivity_witness(G, sigma, "A", "B", 1, 1, k, sign=-1) == Fraction(-k, 2)


@pytest.mark.parametrize(
    "m, word",
    [
        ([[0, -1], [1, 0]], "A:1"),
        ([[0, -1], [1, 1]], "B:1"),
        ([[1, 0], [0, 1]], ""),
        ([[-1, 0], [0, -1]], ""),
        ([[1, 1], [0, 1]], "A:1 B:1"),
        ([[1, 5], [0, 1]], "A:1 B:1 A:1 B:1 A:1 B:1 A:1 B:1 A:1 B:1"),
    ],
)
def test_psl2_parse_examples(m, word):
    assert str(psl2_parse(m)) == word
    assert psl2_equal(psl2_matrix(psl2_parse(m)), m)


def test_psl2_rejects_bad_matrices():
    with pytest.raises(ValueError):
        psl2_parse([[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        psl2_parse("[[1, 2]]")


@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30))
def test_psl2_roundtrip_random(a, b, c):
    # build a unimodular matrix from a product of elementary moves
    m = ((1, a), (0, 1))
    m = fp._matmul(m, ((1, 0), (b, 1)))
    m = fp._matmul(m, ((1, c), (0, 1)))
    assert psl2_equal(psl2_matrix(psl2_parse(m)), m)


def test_psl2_word_is_normal_form_of_matrix_product():
    # parse(M N) equals the group product of parse(M) and parse(N)
    ms = [[[2, 1], [1, 1]], [[1, -3], [0, 1]], [[0, -1], [1, 4]], [[5, 2], [2, 1]]]
    for m, n in itertools.product(ms, repeat=2):
        prod = fp._matmul(fp._as_matrix(m), fp._as_matrix(n))
        assert psl2_parse(prod) == PSL2.multiply(psl2_parse(m), psl2_parse(n))


@pytest.mark.parametrize("k", range(-20, 21, 5))
def test_t_powers(k):
    c = Fraction(3, 7)
    sigma = psl2_default_sigma(c)
    assert psl2_qm(sigma, [[1, k], [0, 1]]) == k * c
    assert fp_eval(sigma, PSL2.power(T_WORD, k)) == k * c


def test_sigma_from_json():
    sigma = fp_sigma_from_json(PSL2, json.dumps({"A": {}, "B": {"1": "1"}}))
    assert fp_eval(sigma, T_WORD) == 1
    with pytest.raises(ValueError):
        fp_sigma_from_json(PSL2, {"A": {}, "Q": {}})
    h = fp_sigma_from_json(H, {"C": {"form": "sign", "amplitude": "1"}})
    assert fp_eval(h, H.word([("C", 5)])) == 1
    with pytest.raises(ValueError):
        fp_sigma_from_json(H, {})


def test_parse_word_errors():
    assert G.parse_word("A:1 B:2 B:1") == G.word([("A", 1)])
    with pytest.raises(ValueError):
        G.parse_word("A1")
    with pytest.raises(ValueError):
        G.parse_word("Q:1")
    with pytest.raises(ValueError):
        G.parse_word("A:5")
