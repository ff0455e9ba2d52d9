import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import binary_entropy, naive_block_counts
from sru.errors import UsageError
from sru.grid import GridArray
from sru.sources import bernoulli, generator, sample
from sru.stats import choose_k, empirical_distribution, entropy, entropy_from_counts, per_site_entropy


def as_tuples(dist):
    return {tuple(w.tolist()): c for w, c in dist.counts.items()}


def test_empirical_distribution_examples():
    dist = empirical_distribution(GridArray([0, 1, 0, 1], 2), 2)
    assert as_tuples(dist) == {(0, 1): 2} and dist.total_blocks == 2
    assert as_tuples(empirical_distribution(GridArray([0, 0, 1, 1], 2), 2)) == {(0, 0): 1, (1, 1): 1}
    dist = empirical_distribution(GridArray([[0, 1], [1, 0]], 2), 1)
    assert as_tuples(dist) == {(0,): 2, (1,): 2} and dist.total_blocks == 4


def test_k_larger_than_n_is_usage_error():
    with pytest.raises(UsageError):
        empirical_distribution(GridArray([0, 1], 2), 3)


def test_probabilities_are_exact_and_sum_to_one():
    x = GridArray(np.random.default_rng(1).integers(0, 2, (9, 9)), 2)
    dist = empirical_distribution(x, 2)
    assert sum(dist.counts.values()) == dist.total_blocks == 16
    assert sum(dist.probabilities().values()) == Fraction(1)


def test_entropy_examples():
    assert entropy(empirical_distribution(GridArray([1, 1, 1, 1], 2), 2), 2) == 0.0
    assert entropy(empirical_distribution(GridArray([0, 1], 2), 1), 2) == pytest.approx(1.0)
    # -3/4 log2 3/4 - 1/4 log2 1/4, evaluated independently
    expected = 2 - 0.75 * math.log2(3)
    assert entropy_from_counts([3, 1], 2) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.811278, abs=1e-6)


def test_per_site_entropy_examples():
    assert per_site_entropy(GridArray(np.zeros((6, 6), int), 2), 3) == 0.0
    assert per_site_entropy(GridArray([0, 0, 1, 1], 2), 2) == pytest.approx(0.5)


def test_per_site_entropy_uniform_bits_monte_carlo():
    x = GridArray(generator(5).integers(0, 2, (256, 256)), 2)
    assert abs(per_site_entropy(x, 1) - 1.0) <= 0.01


def test_choose_k_examples():
    assert choose_k(512, 2, 2) == 4
    assert choose_k(4, 1, 2) == 2
    assert choose_k(1000, 1, 256) == 1
    with pytest.raises(UsageError):
        choose_k(1, 2, 2)


@given(st.integers(2, 5000), st.integers(1, 4), st.sampled_from([2, 3, 4, 16, 256]))
def test_choose_k_matches_float_formula_away_from_ties(n, d, A):
    f = (d * math.log(n) / math.log(A)) ** (1 / d)
    if abs(f - round(f)) > 1e-9:
        assert choose_k(n, d, A) == max(1, math.floor(f))


@settings(max_examples=60)
@given(st.integers(1, 2), st.integers(1, 9), st.integers(2, 4), st.data())
def test_distribution_matches_site_loop_oracle(d, n, A, data):
    k = data.draw(st.integers(1, n))
    a = np.array(data.draw(st.lists(st.integers(0, A - 1), min_size=n ** d, max_size=n ** d)))
    a = a.reshape((n,) * d)
    assert as_tuples(empirical_distribution(GridArray(a, A), k)) == naive_block_counts(a, k)


@settings(max_examples=60)
@given(st.lists(st.integers(0, 3), min_size=36, max_size=36), st.integers(1, 3),
       st.permutations(range(4)))
def test_entropy_bounds_and_relabel_invariance(symbols, k, perm):
    a = np.array(symbols).reshape(6, 6)
    x = GridArray(a, 4)
    dist = empirical_distribution(x, k)
    H = entropy(dist, 4)
    assert 0 <= H <= math.log(dist.distinct, 4) + 1e-12 <= k ** 2 + 1e-12
    y = GridArray(np.array(perm)[a], 4)
    assert per_site_entropy(y, k) == pytest.approx(per_site_entropy(x, k), abs=1e-12)
    counts = list(dist.counts.values())
    assert entropy_from_counts(counts[::-1], 4) == pytest.approx(H, abs=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("p", [0.1, 0.2, 0.3, 0.5])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_bernoulli_per_site_entropy_converges(p, k):
    x = sample(bernoulli(p, d=2, n=512, seed=11))
    assert abs(per_site_entropy(x, k) - binary_entropy(p)) <= 0.02


@pytest.mark.slow
@pytest.mark.parametrize("p", [0.05, 0.1])
def test_bernoulli_per_site_entropy_k4_low_entropy(p):
    x = sample(bernoulli(p, d=2, n=512, seed=11))
    assert abs(per_site_entropy(x, 4) - binary_entropy(p)) <= 0.02


def test_k4_plugin_estimate_is_biased_low_when_undersampled():
    # 16384 blocks cannot resolve 2**16 equiprobable 4x4 words
    x = sample(bernoulli(0.5, d=2, n=512, seed=11))
    h4 = per_site_entropy(x, 4)
    assert h4 < 1.0 - 0.1
    assert h4 <= math.log2(128 * 128) / 16 + 1e-12


def test_distinct_count_matches_counter():
    x = GridArray(np.random.default_rng(3).integers(0, 2, (8, 8)), 2)
    dist = empirical_distribution(x, 2)
    assert dist.distinct == len(Counter(naive_block_counts(x.data, 2)))
