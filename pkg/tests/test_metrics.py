import functools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnatty import (ConfigError, DistanceCounter, EditDistanceMetric, EuclideanMetric,
                    edit_distance, euclidean_distance, generate_random_words,
                    generate_uniform_vectors, metric_by_name)


def edit_oracle(s: str, t: str) -> int:
    """Independent reference: memoized recursion over all edit scripts."""

    @functools.cache
    def go(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(go(i - 1, j) + 1,
                   go(i, j - 1) + 1,
                   go(i - 1, j - 1) + (s[i - 1] != t[j - 1]))

    return go(len(s), len(t))


def test_euclidean_examples():
    assert euclidean_distance((0, 0), (0, 0)) == 0.0
    assert euclidean_distance((0, 0), (3, 4)) == 5.0
    assert euclidean_distance((1, 1, 1), (2, 2, 2)) == pytest.approx(math.sqrt(3))


def test_euclidean_dimension_mismatch():
    with pytest.raises(ConfigError):
        euclidean_distance((1, 2), (1, 2, 3))
    with pytest.raises(ConfigError):
        EuclideanMetric().distance((1,), (1, 2))


def test_edit_examples():
    assert edit_distance("", "abc") == 3
    assert edit_distance("abc", "abc") == 0
    assert edit_oracle("kitten", "sitting") == 3
    assert edit_distance("kitten", "sitting") == 3


@given(st.text(alphabet="abcd", max_size=8), st.text(alphabet="abcd", max_size=8))
def test_edit_matches_oracle(s, t):
    assert edit_distance(s, t) == edit_oracle(s, t)


@given(st.text(alphabet="abcdef", max_size=12), st.text(alphabet="abcdef", max_size=12))
def test_edit_properties(s, t):
    d = edit_distance(s, t)
    assert d == edit_distance(t, s)
    assert d <= max(len(s), len(t))
    assert edit_distance(s, "") == len(s)


def _axiom_check(metric, objects, n_triples, seed, tol):
    import numpy as np

    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(objects), size=(n_triples, 3))
    for i, j, k in idx:
        x, y, z = objects[int(i)], objects[int(j)], objects[int(k)]
        assert metric.distance(x, x) == 0.0
        dxy = metric.distance(x, y)
        assert dxy >= 0.0
        assert dxy == metric.distance(y, x)
        assert dxy <= metric.distance(x, z) + metric.distance(z, y) + tol


def test_metric_axioms_euclidean(euclid):
    objects = generate_uniform_vectors(400, 8, seed=9).objects
    _axiom_check(euclid, objects, 10_000, seed=2, tol=1e-9)


def test_metric_axioms_edit(editm):
    objects = generate_random_words(300, seed=9).objects
    _axiom_check(editm, objects, 10_000, seed=2, tol=0)


def test_distance_counter_exact_and_repeatable(euclid):
    ds = generate_uniform_vectors(50, 4, seed=0)
    workload = [(ds[i], ds[j]) for i in range(10) for j in range(10)]

    def run():
        counter = DistanceCounter(euclid)
        for a, b in workload:
            assert counter.distance(a, b) == euclid.distance(a, b)
        return counter.count

    first, second = run(), run()
    assert first == second == len(workload)


def test_metric_by_name():
    assert isinstance(metric_by_name("euclidean"), EuclideanMetric)
    assert isinstance(metric_by_name("edit"), EditDistanceMetric)
    with pytest.raises(ConfigError):
        metric_by_name("cosine")
