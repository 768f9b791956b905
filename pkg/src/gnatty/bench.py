"""Experiment harness: build index variants over a parameter grid, run
query workloads, and report distance-evaluation and memory counts.

The workload follows the classic methodology: a query set is split off
the dataset, the database is indexed, and every configuration runs the
same queries.  Radii are either given absolutely or calibrated per query
so the query returns about target_k neighbors.  Calibration and build
distances are counted separately from query distances.
"""

from __future__ import annotations

import csv
import heapq
import logging
import statistics
import time
from dataclasses import dataclass

from .baselines import aesa_build, aesa_range_search, lc_build, lc_range_search, lc_stored_reals
from .datasets import (Dataset, generate_random_words, generate_uniform_vectors,
                       load_strings, load_vectors, split_queries)
from .errors import ConfigError
from .fixedpoint import FixedPointParams, params_for_integer_range
from .metrics import MetricSpace, metric_by_name
from .search import RangeQuery, egnat_range_search, gnat_range_search
from .tree import (BuildConfig, ConstantArity, PowerArity, build,
                   table_bytes, table_entry_count)

log = logging.getLogger("gnatty")


def linear_scan_range(database: Dataset, obj, radius: float, metric: MetricSpace) -> set[int]:
    """Brute-force oracle for range queries."""
    dist = metric.distance
    return {i for i in range(len(database)) if dist(obj, database[i]) <= radius}


def linear_scan_knn(database: Dataset, obj, k: int, metric: MetricSpace) -> list[tuple[int, float]]:
    """Brute-force oracle for k-NN: ascending (distance, id), lower id on ties."""
    dist = metric.distance
    scored = heapq.nsmallest(k, ((dist(obj, database[i]), i) for i in range(len(database))))
    return [(i, d) for d, i in scored]


def calibrate_radius(database: Dataset, metric: MetricSpace, obj, target_k: int) -> float:
    """Distance from obj to its target_k-th nearest database object.

    Computed by brute force; these evaluations are workload setup and are
    never charged to query statistics.
    """
    if not 1 <= target_k <= len(database):
        raise ConfigError(f"target_k must be in [1, {len(database)}], got {target_k}")
    dist = metric.distance
    return heapq.nsmallest(target_k, (dist(obj, database[i]) for i in range(len(database))))[-1]


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: dataset source, workload, and the variant grid."""

    metric: str = "euclidean"
    dataset_path: str | None = None
    n: int = 0                 # synthetic only: total objects, queries split out
    dim: int = 2               # synthetic vectors only
    queries: int = 100
    seeds: tuple[int, ...] = (0,)
    indexes: tuple[str, ...] = ("gnatty",)
    partitions: tuple[str, ...] | None = None   # None: ball for gnatty, hyperplane for gnat
    alphas: tuple[float, ...] = (0.5,)
    arity_consts: tuple[int, ...] = (8,)
    gammas: tuple[float, ...] = (0.9,)
    buckets: tuple[int, ...] = (0,)
    codecs: tuple[str, ...] = ("exact",)
    fp_bits: int | None = None
    fp_mag: int | None = None
    beta: float | None = None
    reduces: tuple[float, ...] = (1.0,)
    searches: tuple[str, ...] = ("gnat",)
    radii: tuple[float, ...] = ()
    target_ks: tuple[int, ...] = ()
    lc_buckets: tuple[int, ...] = (32,)


@dataclass
class ResultRow:
    index: str
    metric: str
    source: str
    n: int
    dim: int
    queries: int
    seed: int
    partition: str
    arity: str
    gamma: str
    bucket: str
    codec: str
    reduce: str
    search: str
    radius_mode: str
    radius_param: str
    mean_radius: float
    build_distance_evals: int
    entries: int
    table_bytes: float
    mean_distance_evals: float
    median_distance_evals: float
    mean_result_size: float
    build_seconds: float
    query_seconds: float


# Column order for emitted CSVs; the two wall-clock columns are appended
# only on request because they are not reproducible across runs.
CSV_COLUMNS = [
    "index", "metric", "source", "n", "dim", "queries", "seed", "partition",
    "arity", "gamma", "bucket", "codec", "reduce", "search", "radius_mode",
    "radius_param", "mean_radius", "build_distance_evals", "entries",
    "table_bytes", "mean_distance_evals", "median_distance_evals",
    "mean_result_size",
]
TIME_COLUMNS = ["build_seconds", "query_seconds"]


def emit_csv(rows, path, include_times: bool = False) -> None:
    """Write rows as UTF-8 CSV with a header and '.' decimal separator.

    Identical rows always produce identical bytes; wall-clock columns are
    opt-in since they would break that.
    """
    columns = CSV_COLUMNS + (TIME_COLUMNS if include_times else [])
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([getattr(row, col) for col in columns])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def prepare_workload(spec: ExperimentSpec, seed: int) -> tuple[Dataset, Dataset, str]:
    """(queries, database, source label) for one seed."""
    if spec.dataset_path is not None:
        if spec.metric == "edit":
            dataset = load_strings(spec.dataset_path)
        else:
            dataset = load_vectors(spec.dataset_path)
        source = str(spec.dataset_path)
    elif spec.metric == "edit":
        dataset = generate_random_words(spec.n, seed)
        source = "synthetic"
    else:
        dataset = generate_uniform_vectors(spec.n, spec.dim, seed)
        source = "synthetic"
    queries, database = split_queries(dataset, spec.queries, seed)
    return queries, database, source


def resolve_fp_params(spec: ExperimentSpec, database: Dataset) -> FixedPointParams:
    """Codec params for the sweep, derived from the database when omitted.

    Integer metrics default to an identity transform with just enough
    magnitude bits for the largest possible distance (the longest string);
    continuous metrics default to the 8-bit, 2-magnitude-bit, beta=1/5
    layout that suits unit-cube distances.
    """
    bits = spec.fp_bits if spec.fp_bits is not None else 8
    if spec.metric == "edit" and spec.fp_mag is None and spec.beta is None:
        longest = max((len(s) for s in database), default=1)
        return params_for_integer_range(longest, bits)
    mag = spec.fp_mag if spec.fp_mag is not None else 2
    beta = spec.beta if spec.beta is not None else 0.2
    return FixedPointParams(total_bits=bits, magnitude_bits=mag, beta=beta)


def validate_spec(spec: ExperimentSpec) -> None:
    """Reject grid values outside their declared domains.

    Domain violations are configuration errors; only data-relative
    infeasibility (a cell that cannot run on this dataset) is skipped
    later with a warning.
    """
    metric_by_name(spec.metric)
    if spec.dataset_path is None and spec.n < 0:
        raise ConfigError(f"n must be >= 0, got {spec.n}")
    if spec.queries < 0:
        raise ConfigError(f"queries must be >= 0, got {spec.queries}")
    for index in spec.indexes:
        if index not in ("gnatty", "gnat", "aesa", "lc"):
            raise ConfigError(f"unknown index {index!r}")
    for partition in spec.partitions or ():
        if partition not in ("hyperplane", "ball"):
            raise ConfigError(f"unknown partition {partition!r}")
    for alpha in spec.alphas:
        if not 0.0 < alpha <= 1.0:
            raise ConfigError(f"alpha must be in (0, 1], got {alpha}")
    for m in spec.arity_consts:
        if m < 2:
            raise ConfigError(f"constant arity must be >= 2, got {m}")
    for gamma in spec.gammas:
        if not 0.0 < gamma <= 1.0:
            raise ConfigError(f"gamma must be in (0, 1], got {gamma}")
    for bucket in spec.buckets:
        if bucket < 0:
            raise ConfigError(f"bucket_size must be >= 0, got {bucket}")
    for codec in spec.codecs:
        if codec not in ("exact", "fp"):
            raise ConfigError(f"unknown codec {codec!r}")
    for reduce_factor in spec.reduces:
        if reduce_factor < 1.0:
            raise ConfigError(f"reduce_factor must be >= 1, got {reduce_factor}")
    for search in spec.searches:
        if search not in ("gnat", "egnat"):
            raise ConfigError(f"unknown search mode {search!r}")
    for radius in spec.radii:
        if radius < 0:
            raise ConfigError(f"radius must be >= 0, got {radius}")
    for k in spec.target_ks:
        if k < 1:
            raise ConfigError(f"target_k must be >= 1, got {k}")
    for bucket in spec.lc_buckets:
        if bucket < 1:
            raise ConfigError(f"lc bucket size must be >= 1, got {bucket}")


@dataclass
class Variant:
    """One built structure plus the coordinates identifying it."""

    index: str
    coords: dict
    search: str
    runner: object           # callable(obj, radius) -> QueryStats
    structure: object        # the GnatTree / AesaMatrix / ClusterList itself
    build_distance_evals: int
    entries: int
    bytes: float
    build_seconds: float

    @property
    def label(self) -> str:
        parts = [self.index] + [f"{k}={v}" for k, v in self.coords.items() if v != ""]
        parts.append(f"search={self.search}")
        return " ".join(parts)


def _tree_variants(index, spec, database, metric, seed):
    partitions = spec.partitions
    if partitions is None:
        partitions = ("ball",) if index == "gnatty" else ("hyperplane",)
    if index == "gnatty":
        arities = [("alpha:%g" % a, PowerArity, a) for a in spec.alphas]
    else:
        arities = [("const:%d" % m, ConstantArity, m) for m in spec.arity_consts]
    fp = None
    if "fp" in spec.codecs:
        fp = resolve_fp_params(spec, database)
    for partition in partitions:
        for arity_label, arity_cls, arity_value in arities:
            for gamma in spec.gammas:
                for bucket in spec.buckets:
                    for codec in spec.codecs:
                        for reduce_factor in spec.reduces:
                            try:
                                config = BuildConfig(
                                    arity=arity_cls(arity_value), partition=partition, gamma=gamma,
                                    bucket_size=bucket, reduce_factor=reduce_factor,
                                    fixed_point=fp if codec == "fp" else None, seed=seed)
                                started = time.perf_counter()
                                tree = build(database, metric, config)
                                elapsed = time.perf_counter() - started
                            except ConfigError as exc:
                                log.warning("skipping infeasible %s cell: %s", index, exc)
                                continue
                            coords = {"partition": partition, "arity": arity_label,
                                      "gamma": "%g" % gamma, "bucket": str(bucket),
                                      "codec": codec, "reduce": "%g" % reduce_factor}
                            for search in spec.searches:
                                run = gnat_range_search if search == "gnat" else egnat_range_search
                                yield Variant(
                                    index, coords, search,
                                    (lambda obj, radius, _tree=tree, _run=run:
                                     _run(_tree, RangeQuery(obj, radius), metric)),
                                    tree, tree.build_distance_evals, table_entry_count(tree),
                                    table_bytes(tree), elapsed)


def build_variants(spec: ExperimentSpec, database: Dataset, metric: MetricSpace, seed: int):
    """Build every structure in the grid; infeasible cells are logged and skipped."""
    for index in spec.indexes:
        if index in ("gnatty", "gnat"):
            yield from _tree_variants(index, spec, database, metric, seed)
        elif index == "aesa":
            started = time.perf_counter()
            matrix = aesa_build(database, metric)
            elapsed = time.perf_counter() - started
            coords = {"partition": "", "arity": "", "gamma": "", "bucket": "",
                      "codec": "exact", "reduce": ""}
            yield Variant(
                "aesa", coords, "aesa",
                (lambda obj, radius, _m=matrix:
                 aesa_range_search(_m, database, RangeQuery(obj, radius), metric)),
                matrix, matrix.build_distance_evals, len(matrix.entries),
                len(matrix.entries) * 4.0, elapsed)
        elif index == "lc":
            for lc_bucket in spec.lc_buckets:
                try:
                    started = time.perf_counter()
                    clusters = lc_build(database, metric, lc_bucket)
                    elapsed = time.perf_counter() - started
                except ConfigError as exc:
                    log.warning("skipping infeasible lc cell: %s", exc)
                    continue
                coords = {"partition": "", "arity": "", "gamma": "",
                          "bucket": str(lc_bucket), "codec": "exact", "reduce": ""}
                yield Variant(
                    "lc", coords, "lc",
                    (lambda obj, radius, _c=clusters:
                     lc_range_search(_c, RangeQuery(obj, radius), metric)),
                    clusters, clusters.build_distance_evals, lc_stored_reals(clusters),
                    lc_stored_reals(clusters) * 4.0, elapsed)
        else:
            raise ConfigError(f"unknown index {index!r}")


def _radius_specs(spec: ExperimentSpec):
    specs = [("r", r) for r in spec.radii] + [("k", k) for k in spec.target_ks]
    if not specs:
        raise ConfigError("need at least one radius or target neighbor count")
    return specs


def _per_query_radii(mode, value, queries, database, metric):
    if mode == "r":
        return [float(value)] * len(queries)
    return [calibrate_radius(database, metric, obj, int(value)) for obj in queries]


def run_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Cartesian sweep over the grid; one ResultRow per cell.

    Deterministic per seed: all randomness flows from the spec seeds, and
    query radii are calibrated identically for every variant.
    """
    validate_spec(spec)
    rows: list[ResultRow] = []
    radius_specs = _radius_specs(spec)
    for seed in spec.seeds:
        queries, database, source = prepare_workload(spec, seed)
        metric = metric_by_name(spec.metric)
        dim = database.dim or 0
        radii_cache = {}
        for mode, value in radius_specs:
            try:
                radii_cache[(mode, value)] = _per_query_radii(mode, value, queries,
                                                              database, metric)
            except ConfigError as exc:
                log.warning("skipping %s=%s workload: %s", mode, value, exc)
        for variant in build_variants(spec, database, metric, seed):
            for mode, value in radius_specs:
                if (mode, value) not in radii_cache:
                    continue
                radii = radii_cache[(mode, value)]
                evals = []
                sizes = []
                started = time.perf_counter()
                for obj, radius in zip(queries, radii):
                    stats = variant.runner(obj, radius)
                    evals.append(stats.distance_evals)
                    sizes.append(len(stats.results))
                elapsed = time.perf_counter() - started
                rows.append(ResultRow(
                    index=variant.index, metric=spec.metric, source=source,
                    n=len(database), dim=dim, queries=len(queries), seed=seed,
                    search=variant.search, radius_mode=mode,
                    radius_param="%g" % value,
                    mean_radius=statistics.fmean(radii) if radii else 0.0,
                    build_distance_evals=variant.build_distance_evals,
                    entries=variant.entries, table_bytes=variant.bytes,
                    mean_distance_evals=statistics.fmean(evals) if evals else 0.0,
                    median_distance_evals=float(statistics.median(evals)) if evals else 0.0,
                    mean_result_size=statistics.fmean(sizes) if sizes else 0.0,
                    build_seconds=variant.build_seconds, query_seconds=elapsed,
                    **variant.coords))
    return rows


def oracle_check(spec: ExperimentSpec) -> list[str]:
    """Compare every grid variant against the linear-scan oracle.

    Returns the labels of variants that disagreed on any query (empty
    list means everything is exact).
    """
    validate_spec(spec)
    failures: list[str] = []
    radius_specs = _radius_specs(spec)
    for seed in spec.seeds:
        queries, database, source = prepare_workload(spec, seed)
        metric = metric_by_name(spec.metric)
        workloads = []
        for mode, value in radius_specs:
            try:
                radii = _per_query_radii(mode, value, queries, database, metric)
            except ConfigError as exc:
                log.warning("skipping %s=%s workload: %s", mode, value, exc)
                continue
            expected = [linear_scan_range(database, obj, radius, metric)
                        for obj, radius in zip(queries, radii)]
            workloads.append((mode, value, radii, expected))
        for variant in build_variants(spec, database, metric, seed):
            for mode, value, radii, expected in workloads:
                ok = True
                for obj, radius, want in zip(queries, radii, expected):
                    got = variant.runner(obj, radius).results
                    if got != want:
                        ok = False
                        break
                if not ok:
                    failures.append(f"seed={seed} {mode}={value} {variant.label}")
    return failures


def find_equal_memory_arity(database: Dataset, metric: MetricSpace, target_entries: int,
                            partition: str = "hyperplane", gamma: float = 0.9,
                            seed: int = 0, max_m: int | None = None) -> tuple[int, int]:
    """Constant arity whose tree stores a table-entry count closest to the
    target (used for equal-memory comparisons against variable-arity trees).

    Entry counts grow with m, so a binary search over [2, n] suffices;
    both the arity and its achieved entry count are returned rather than
    pretending the match is exact.
    """
    n = len(database)
    hi = min(max_m or n, n)
    if hi < 2:
        raise ConfigError("database too small for a constant-arity tree")
    cache: dict[int, int] = {}

    def entries(m: int) -> int:
        if m not in cache:
            config = BuildConfig(arity=ConstantArity(m), partition=partition,
                                 gamma=gamma, seed=seed)
            cache[m] = table_entry_count(build(database, metric, config))
        return cache[m]

    lo = 2
    while lo < hi:
        mid = (lo + hi) // 2
        if entries(mid) < target_entries:
            lo = mid + 1
        else:
            hi = mid
    candidates = sorted({max(2, lo - 1), lo})
    best = min(candidates, key=lambda m: (abs(entries(m) - target_entries), m))
    return best, entries(best)
