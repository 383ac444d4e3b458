import math

import numpy as np
import pytest

from dppkit import lcs_length, lcs_length_dp, rate_experiment, sample_prefix


def test_examples():
    assert lcs_length("1010", "1010", 4) == 4      # identical prefixes
    assert lcs_length("0000", "1111", 4) == 0      # disjoint alphabets
    assert lcs_length("0110", "1001", 4) == 2      # "01" and "10" but nothing longer


def test_prefix_restriction():
    x = "0001111"
    y = "1111000"
    assert lcs_length(x, y, 3) == 0   # "000" vs "111"
    assert lcs_length(x, y, 7) == 4   # both contain "1111"


def test_input_validation():
    with pytest.raises(ValueError):
        lcs_length("01", "0101", 3)
    with pytest.raises(ValueError):
        lcs_length("012", "010", 3)


def test_oracle_agreement_random_pairs():
    rng = np.random.default_rng(55)
    for _ in range(200):
        n = int(np.exp(rng.uniform(0, math.log(2000))))
        n = max(1, n)
        x = rng.integers(0, 2, n)
        y = rng.integers(0, 2, n)
        assert lcs_length(x, y, n) == lcs_length_dp(x, y, n)


def test_monotone_in_n():
    rng = np.random.default_rng(56)
    x = rng.integers(0, 2, 400)
    y = rng.integers(0, 2, 400)
    vals = [lcs_length(x, y, n) for n in (50, 100, 200, 400)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_symmetry():
    rng = np.random.default_rng(57)
    for _ in range(20):
        n = int(rng.integers(1, 300))
        x = rng.integers(0, 2, n)
        y = rng.integers(0, 2, n)
        assert lcs_length(x, y, n) == lcs_length(y, x, n)


def test_accepts_binary_sequences(fair):
    x = sample_prefix(fair, 100, seed=1)
    y = sample_prefix(fair, 100, seed=2)
    assert lcs_length(x, y, 100) == lcs_length(x.bits, y.bits, 100)


def test_rate_experiment_rows(fair):
    rows = rate_experiment(fair, [256, 1024], trials=8, seed=99, dim2=1.0)
    assert [r.n for r in rows] == [256, 1024]
    for row in rows:
        assert row.trials == 8
        assert 0 < row.mean_Mn < row.n
        assert row.ratio == pytest.approx(row.mean_Mn / math.log(row.n))
        assert row.target == pytest.approx(2.0 / math.log(2.0))
        assert 0 < row.ratio_loglog < 1.0


def test_rate_experiment_threads_deterministic(fair):
    a = rate_experiment(fair, [512], trials=6, seed=4, dim2=1.0)
    b = rate_experiment(fair, [512], trials=6, seed=4, dim2=1.0, threads=3)
    assert a == b


def test_rate_experiment_default_dim2(fair):
    rows = rate_experiment(fair, [128], trials=2, seed=1, dim2_nmax=6)
    assert rows[0].target == pytest.approx(2.0 / math.log(2.0), abs=1e-9)


def test_identical_pair_guard():
    # degenerate harness self-check: x = y gives M_n = n, ratio n/ln n
    x = "01" * 64
    n = 128
    assert lcs_length(x, x, n) == n
