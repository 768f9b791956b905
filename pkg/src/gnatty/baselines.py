"""Flat competitors: AESA's full distance matrix and List of Clusters.

AESA stores all pairwise distances (half of the symmetric matrix) and
prunes with them directly; it is the distance-evaluation lower bar and the
memory upper bar.  List of Clusters stores one covering radius per
cluster, linear space, and prunes far less.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .datasets import Dataset
from .errors import ConfigError
from .metrics import DistanceCounter, MetricSpace
from .search import QueryStats, RangeQuery


class AesaMatrix:
    """Half of the symmetric n x n distance matrix in condensed layout:
    entry (i, j) with i < j sits at i*n - i*(i+1)/2 + (j-i-1)."""

    __slots__ = ("n", "entries", "build_distance_evals")

    def __init__(self, n: int, entries: np.ndarray, build_distance_evals: int = 0):
        self.n = n
        self.entries = entries
        self.build_distance_evals = build_distance_evals

    def _offset(self, i: int) -> int:
        return i * self.n - i * (i + 1) // 2

    def lookup(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        if i > j:
            i, j = j, i
        return float(self.entries[self._offset(i) + (j - i - 1)])

    def row(self, u: int) -> np.ndarray:
        """Distances from object u to all objects (row[u] = 0)."""
        n = self.n
        out = np.empty(n, dtype=np.float64)
        out[u] = 0.0
        if u + 1 < n:
            start = self._offset(u)
            out[u + 1:] = self.entries[start:start + (n - u - 1)]
        if u > 0:
            i = np.arange(u)
            out[:u] = self.entries[i * n - i * (i + 1) // 2 + (u - i - 1)]
        return out


def aesa_build(dataset: Dataset, metric: MetricSpace) -> AesaMatrix:
    """Precompute all n(n-1)/2 pairwise distances."""
    n = len(dataset)
    counter = DistanceCounter(metric)
    entries = np.empty(n * (n - 1) // 2, dtype=np.float64)
    pos = 0
    for i in range(n):
        a = dataset[i]
        for j in range(i + 1, n):
            entries[pos] = counter.distance(a, dataset[j])
            pos += 1
    return AesaMatrix(n, entries, counter.count)


def aesa_range_search(matrix: AesaMatrix, dataset: Dataset, query: RangeQuery,
                      metric: MetricSpace) -> QueryStats:
    """Exact range query by iterated pivot elimination.

    The first pivot is object 0; afterwards the surviving object with the
    smallest accumulated lower bound max_p |e_p - d(u, p)| is measured
    next (lowest index on ties).  Each round eliminates every survivor
    whose stored distance to the pivot falls outside [e - r, e + r], one
    linear pass over the matrix row.
    """
    n = matrix.n
    if n != len(dataset):
        raise ConfigError(f"matrix built over {n} objects, dataset has {len(dataset)}")
    stats = QueryStats()
    q, r = query.obj, query.radius
    dist = metric.distance
    alive = np.ones(n, dtype=bool)
    lower = np.zeros(n, dtype=np.float64)
    while alive.any():
        pivot = int(np.argmin(np.where(alive, lower, np.inf)))
        stats.distance_evals += 1
        e = dist(q, dataset[pivot])
        alive[pivot] = False
        if e <= r:
            stats.results.add(pivot)
        idx = np.nonzero(alive)[0]
        if idx.size == 0:
            break
        stats.entries_inspected += int(idx.size)
        diffs = np.abs(e - matrix.row(pivot)[idx])
        alive[idx[diffs > r]] = False
        lower[idx] = np.maximum(lower[idx], diffs)
    return stats


@dataclass
class Cluster:
    center: int
    radius: float        # covering radius: max distance to a member
    members: list[int]   # ascending by (distance to center, object id)


@dataclass
class ClusterList:
    clusters: list[Cluster] = field(default_factory=list)
    dataset: Dataset | None = None
    build_distance_evals: int = 0


def lc_build(dataset: Dataset, metric: MetricSpace, bucket_size: int) -> ClusterList:
    """Greedy cluster list: the lowest remaining object id becomes a center
    and claims its bucket_size nearest remaining objects."""
    if bucket_size < 1:
        raise ConfigError(f"bucket_size must be >= 1, got {bucket_size}")
    counter = DistanceCounter(metric)
    remaining = list(range(len(dataset)))
    clusters: list[Cluster] = []
    while remaining:
        center = remaining[0]
        rest = remaining[1:]
        if not rest:
            clusters.append(Cluster(center, 0.0, []))
            break
        center_obj = dataset[center]
        take = min(bucket_size, len(rest))
        nearest = heapq.nsmallest(
            take, ((counter.distance(dataset[oid], center_obj), oid) for oid in rest))
        taken = {oid for _, oid in nearest}
        clusters.append(Cluster(center, nearest[-1][0], [oid for _, oid in nearest]))
        remaining = [oid for oid in rest if oid not in taken]
    return ClusterList(clusters, dataset, counter.count)


def lc_range_search(cluster_list: ClusterList, query: RangeQuery,
                    metric: MetricSpace) -> QueryStats:
    """Exact range query over a cluster list.

    Clusters are visited in build order; a bucket is scanned only when the
    query ball intersects the covering ball.  When the query ball lies
    strictly inside a covering ball the remaining clusters cannot hold
    results (their objects were all farther from this center than the
    covering radius) and the scan stops.
    """
    stats = QueryStats()
    dataset = cluster_list.dataset
    q, r = query.obj, query.radius
    dist = metric.distance
    for cluster in cluster_list.clusters:
        stats.nodes_visited += 1
        stats.distance_evals += 1
        e = dist(q, dataset[cluster.center])
        if e <= r:
            stats.results.add(cluster.center)
        stats.entries_inspected += 1
        if e <= cluster.radius + r:
            for oid in cluster.members:
                stats.distance_evals += 1
                if dist(q, dataset[oid]) <= r:
                    stats.results.add(oid)
        if not (e + cluster.radius < r) and e < cluster.radius - r:
            break
    return stats


def lc_stored_reals(cluster_list: ClusterList) -> int:
    """Reals the structure stores for pruning: one covering radius per cluster."""
    return len(cluster_list.clusters)
