import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnatty import (BuildConfig, ConfigError, ConstantArity, EuclideanMetric,
                    FixedPointParams, PowerArity, RangeQuery, build,
                    egnat_range_search, generate_uniform_vectors, gnat_range_search,
                    iter_nodes, knn_search, prune_check, subtree_object_ids,
                    with_fixed_point)
from gnatty.bench import calibrate_radius, linear_scan_knn, linear_scan_range

EUCLID = EuclideanMetric()


def test_prune_check_examples():
    assert prune_check(5, 1, 7, 9)          # 6 < 7
    assert not prune_check(5, 2, 7, 9)      # closed intervals touch at 7
    assert prune_check(10, 0.5, 7, 9)       # 9.5 > 9
    assert not prune_check(8, 0, 7, 9)


def test_range_query_validation():
    with pytest.raises(ConfigError):
        RangeQuery((0.0,), -1.0)


@pytest.fixture(scope="module")
def small_world():
    ds = generate_uniform_vectors(320, 5, seed=11)
    tree = build(ds, EUCLID, BuildConfig(arity=ConstantArity(6), seed=11))
    return ds, tree


def test_radius_covers_everything(small_world):
    ds, tree = small_world
    q = (0.5,) * 5
    for search in (gnat_range_search, egnat_range_search):
        stats = search(tree, RangeQuery(q, 10.0), EUCLID)
        assert stats.results == set(range(len(ds)))
        assert stats.distance_evals == len(ds)


def test_radius_below_minimum_is_empty(small_world):
    ds, tree = small_world
    q = (5.0,) * 5  # far outside the unit cube
    for search in (gnat_range_search, egnat_range_search):
        assert search(tree, RangeQuery(q, 0.5), EUCLID).results == set()


def test_monotone_in_radius(small_world):
    ds, tree = small_world
    q = ds[3]
    previous = set()
    for r in (0.05, 0.2, 0.4, 0.8):
        results = gnat_range_search(tree, RangeQuery(q, r), EUCLID).results
        assert previous <= results
        previous = results


def test_evals_never_exceed_n(small_world):
    ds, tree = small_world
    for i in range(0, 300, 17):
        for search in (gnat_range_search, egnat_range_search):
            stats = search(tree, RangeQuery(ds[i], 0.3), EUCLID)
            assert stats.distance_evals <= len(ds)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000),
       n=st.integers(2, 60),
       partition=st.sampled_from(["hyperplane", "ball"]),
       constant=st.booleans(),
       codec=st.sampled_from(["exact", "fp"]),
       reduce_factor=st.sampled_from([1.0, 2.0]),
       mode=st.sampled_from(["gnat", "egnat"]),
       radius=st.floats(0.0, 1.5))
def test_exactness_everywhere(seed, n, partition, constant, codec, reduce_factor, mode, radius):
    """Master property: every variant must agree with the linear scan."""
    ds = generate_uniform_vectors(n, 3, seed=seed)
    fp = FixedPointParams(8, 2, 0.2) if codec == "fp" else None
    config = BuildConfig(arity=ConstantArity(3) if constant else PowerArity(0.5),
                         partition=partition, reduce_factor=reduce_factor,
                         fixed_point=fp, seed=seed)
    tree = build(ds, EUCLID, config)
    q = (0.25, 0.5, 0.75)
    search = gnat_range_search if mode == "gnat" else egnat_range_search
    stats = search(tree, RangeQuery(q, radius), EUCLID)
    assert stats.results == linear_scan_range(ds, q, radius, EUCLID)
    assert stats.distance_evals <= n


def test_pruning_is_safe_for_every_entry():
    """Any (pivot, child) elimination the tables could ever justify must be
    sound: no object under that child may lie within the query ball."""
    ds = generate_uniform_vectors(400, 4, seed=17)
    tree = build(ds, EUCLID, BuildConfig(arity=PowerArity(0.5), partition="ball", seed=17))
    queries = generate_uniform_vectors(5, 4, seed=18)
    for q in queries:
        r = calibrate_radius(ds, EUCLID, q, 10)
        for node in iter_nodes(tree.root):
            for row, pos in enumerate(node.measuring_set):
                e = EUCLID.distance(q, ds[node.centers[pos]])
                for col in range(len(node.centers)):
                    iv = node.table.interval(row, col)
                    if prune_check(e, r, iv.lo, iv.hi):
                        covered = [node.centers[col]] + subtree_object_ids(node.children[col])
                        assert all(EUCLID.distance(q, ds[oid]) > r for oid in covered)


def test_fixed_point_same_results_more_evals(small_world):
    ds, tree = small_world
    fp_tree = with_fixed_point(tree, FixedPointParams(8, 2, 0.2))
    total_exact = total_fp = 0
    for i in range(0, 320, 7):
        q = ds[i]
        r = 0.35
        a = gnat_range_search(tree, RangeQuery(q, r), EUCLID)
        b = gnat_range_search(fp_tree, RangeQuery(q, r), EUCLID)
        assert a.results == b.results
        total_exact += a.distance_evals
        total_fp += b.distance_evals
    assert total_fp >= total_exact


def test_saturated_tables_stay_exact():
    # distances way beyond the representable fixed-point range: upper
    # bounds saturate and must stop pruning instead of lying
    from gnatty import Dataset, iter_nodes

    base = generate_uniform_vectors(300, 4, seed=1)
    big = Dataset([tuple(c * 2000.0 for c in v) for v in base])
    tree = build(big, EUCLID, BuildConfig(arity=PowerArity(0.5),
                                          fixed_point=FixedPointParams(8, 2, 0.2), seed=1))
    assert any(node.table.hi_saturated for node in iter_nodes(tree.root))
    for i in range(0, 300, 23):
        for r in (100.0, 400.0, 1500.0):
            for search in (gnat_range_search, egnat_range_search):
                got = search(tree, RangeQuery(big[i], r), EUCLID).results
                assert got == linear_scan_range(big, big[i], r, EUCLID)


def test_egnat_single_node_measures_all_centers():
    ds = generate_uniform_vectors(24, 4, seed=2)
    tree = build(ds, EUCLID, BuildConfig(arity=ConstantArity(24), seed=2))
    stats = egnat_range_search(tree, RangeQuery((0.5,) * 4, 0.4), EUCLID)
    assert stats.distance_evals == 24
    assert stats.results == linear_scan_range(ds, (0.5,) * 4, 0.4, EUCLID)


def test_egnat_costs_at_least_gnat_in_aggregate():
    ds = generate_uniform_vectors(800, 6, seed=19)
    tree = build(ds, EUCLID, BuildConfig(arity=ConstantArity(16), seed=19))
    queries = generate_uniform_vectors(50, 6, seed=20)
    total_gnat = total_egnat = 0
    for q in queries:
        r = calibrate_radius(ds, EUCLID, q, 10)
        total_gnat += gnat_range_search(tree, RangeQuery(q, r), EUCLID).distance_evals
        total_egnat += egnat_range_search(tree, RangeQuery(q, r), EUCLID).distance_evals
    assert total_egnat >= total_gnat


def test_reduced_tables_report_unmeasured_centers():
    ds = generate_uniform_vectors(300, 4, seed=23)
    config = BuildConfig(arity=ConstantArity(8), reduce_factor=3.0, seed=23)
    tree = build(ds, EUCLID, config)
    assert any(len(node.measuring_set) < len(node.centers) for node in iter_nodes(tree.root))
    for i in range(0, 300, 23):
        q = ds[i]
        for search in (gnat_range_search, egnat_range_search):
            assert search(tree, RangeQuery(q, 0.3), EUCLID).results == \
                linear_scan_range(ds, q, 0.3, EUCLID)


# ---------------------------------------------------------------- kNN


def test_knn_examples(small_world):
    ds, tree = small_world
    q = ds[42]
    ranked, _ = knn_search(tree, q, 1, EUCLID)
    assert ranked == [(42, 0.0)]
    everything, _ = knn_search(tree, q, len(ds), EUCLID)
    assert everything == linear_scan_knn(ds, q, len(ds), EUCLID)
    dists = [d for _, d in everything]
    assert dists == sorted(dists)


def test_knn_validation(small_world):
    ds, tree = small_world
    with pytest.raises(ConfigError):
        knn_search(tree, ds[0], 0, EUCLID)
    with pytest.raises(ConfigError):
        knn_search(tree, ds[0], len(ds) + 1, EUCLID)
    with pytest.raises(ConfigError):
        knn_search(tree, ds[0], 5, EUCLID, mode="fast")


@pytest.mark.parametrize("mode", ["gnat", "egnat"])
def test_knn_matches_bruteforce(small_world, mode):
    ds, tree = small_world
    queries = generate_uniform_vectors(40, 5, seed=12)
    for q in queries:
        for k in (1, 5, 10):
            ranked, stats = knn_search(tree, q, k, EUCLID, mode=mode)
            assert ranked == linear_scan_knn(ds, q, k, EUCLID)
            assert stats.distance_evals <= len(ds)


def test_knn_tie_prefers_lower_id():
    from gnatty import Dataset

    ds = Dataset([(0.0,), (1.0,), (-1.0,), (2.0,)])
    tree = build(ds, EUCLID, BuildConfig(arity=ConstantArity(2), seed=0))
    ranked, _ = knn_search(tree, (0.0,), 2, EUCLID)
    # objects 1 and 2 are both at distance 1; the lower id wins
    assert ranked == [(0, 0.0), (1, 1.0)]
