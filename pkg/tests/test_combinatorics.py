"""Binomial tables, the weight-basis Hadamard matrix, and tail bounds."""

import math
from fractions import Fraction

import numpy as np
import pytest

from gaplab.combinatorics import (
    chernoff_lower_tail,
    chernoff_upper_tail,
    exact_binomial_tail,
    krawtchouk_matrix,
    log_binomial_table,
)


def exact_tail_fraction(n, p_num, p_den, threshold, side):
    """Independent oracle: exact rational tail via big integers."""
    p = Fraction(p_num, p_den)
    total = Fraction(0)
    ks = range(threshold, n + 1) if side == "upper" else range(0, threshold + 1)
    for k in ks:
        total += math.comb(n, k) * p**k * (1 - p) ** (n - k)
    return total


def test_table_n1():
    assert log_binomial_table(1).log_choose.tolist() == [0.0, 0.0]


def test_table_n4_pascal_row():
    row = np.exp(log_binomial_table(4).log_choose)
    assert np.allclose(row, [1, 4, 6, 4, 1], rtol=1e-14, atol=0)


def test_table_matches_exact_integers():
    lc = log_binomial_table(50).log_choose
    for k in (0, 1, 7, 25, 50):
        exact = math.comb(50, k)
        assert abs(math.exp(lc[k]) - exact) / exact < 1e-12


def test_table_endpoints_and_symmetry_bit_exact():
    for n in (3, 17, 64, 1001):
        lc = log_binomial_table(n).log_choose
        assert lc[0] == 0.0 and lc[n] == 0.0
        for k in range(n + 1):
            assert lc[k] == lc[n - k]


def test_table_rejects_bad_n():
    with pytest.raises(ValueError):
        log_binomial_table(0)
    with pytest.raises(ValueError):
        log_binomial_table(100_001)


def test_krawtchouk_n1_is_hadamard():
    q = krawtchouk_matrix(1).entries
    assert np.allclose(q, np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-15)


def test_krawtchouk_n2_involution():
    q = krawtchouk_matrix(2).entries
    assert np.abs(q @ q - np.eye(3)).max() <= 1e-14


@pytest.mark.parametrize("n", [5, 12, 25, 40])
def test_krawtchouk_involution_and_rows(n):
    q = krawtchouk_matrix(n).entries
    assert np.abs(q - q.T).max() == 0.0
    assert np.abs(q @ q - np.eye(n + 1)).max() <= 1e-8
    assert np.abs(np.linalg.norm(q, axis=1) - 1.0).max() <= 1e-10


def test_krawtchouk_matches_exact_integer_sum():
    n = 12
    q = krawtchouk_matrix(n).entries
    for j in range(n + 1):
        for k in range(n + 1):
            kr = sum(
                (-1) ** i * math.comb(j, i) * math.comb(n - j, k - i)
                for i in range(0, min(j, k) + 1)
            )
            expected = kr * math.sqrt(math.comb(n, j) / math.comb(n, k)) / 2 ** (n / 2)
            assert abs(q[j, k] - expected) <= 1e-12


def test_krawtchouk_rejects_above_cap():
    with pytest.raises(ValueError):
        krawtchouk_matrix(65)
    # the cap is configurable for callers who accept the accuracy loss
    q = krawtchouk_matrix(65, cap=70).entries
    assert np.abs(np.linalg.norm(q, axis=1) - 1.0).max() <= 1e-10


def test_exact_tail_cap():
    with pytest.raises(ValueError):
        exact_binomial_tail(10_001, 0.5, 5000, "upper")


def test_chernoff_upper_at_mean_is_one():
    assert chernoff_upper_tail(100, 0.5, 50) == 1.0


def test_chernoff_upper_formula():
    # delta = 0.5, mu = 50 -> exp(-25/6)
    assert chernoff_upper_tail(100, 0.5, 75) == pytest.approx(math.exp(-25 / 6), rel=1e-15)


def test_chernoff_lower_formula():
    assert chernoff_lower_tail(100, 0.5, 50) == 1.0
    assert chernoff_lower_tail(100, 0.5, 25) == pytest.approx(math.exp(-6.25), rel=1e-15)


def test_exact_tail_small_cases():
    assert exact_binomial_tail(2, 0.5, 2, "upper") == pytest.approx(0.25, abs=1e-15)
    assert exact_binomial_tail(2, 0.5, 0, "lower") == pytest.approx(0.25, abs=1e-15)


def test_exact_tail_frozen_value():
    # sum_{k=15..20} C(20,k) / 2^20 = 21700 / 1048576
    expected = 21700 / 1048576
    assert exact_binomial_tail(20, 0.5, 15, "upper") == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("side,threshold", [("upper", 13), ("lower", 4)])
def test_exact_tail_vs_rational_oracle(side, threshold):
    got = exact_binomial_tail(18, 0.3, threshold, side)
    want = float(exact_tail_fraction(18, 3, 10, threshold, side))
    assert got == pytest.approx(want, abs=1e-14)


def test_exact_tail_edges():
    assert exact_binomial_tail(10, 0.5, 0, "upper") == 1.0
    assert exact_binomial_tail(10, 0.5, 11, "upper") == 0.0
    assert exact_binomial_tail(10, 0.5, 10, "lower") == 1.0


def test_chernoff_dominates_exact_all_small_n():
    for n in range(1, 15):
        for theta in range(0, n + 1):
            assert exact_binomial_tail(n, 0.5, theta, "upper") <= chernoff_upper_tail(
                n, 0.5, theta
            ) + 1e-15
            assert exact_binomial_tail(n, 0.5, theta, "lower") <= chernoff_lower_tail(
                n, 0.5, theta
            ) + 1e-15


def test_tail_args_validated():
    with pytest.raises(ValueError):
        chernoff_upper_tail(10, 1.5, 8)
    with pytest.raises(ValueError):
        exact_binomial_tail(10, 0.5, 3, "sideways")
