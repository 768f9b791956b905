"""GNAT-family index construction.

A tree node holds a set of pivot objects (centers), one child per center,
and a distance range table: entry (i, j) is the [min, max] of distances
from measuring pivot i to everything stored under child j, child center
included.  Queries later intersect the query ball with these intervals to
prune whole subtrees.

Construction offers two partitioning rules (nearest-center hyperplane
cells, or greedy balls of controlled capacity), constant or size-dependent
arities, optional fixed-point table compression, and optional reduced
tables that keep rows only for a random subset of the centers.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .datasets import Dataset, rng_stream
from .errors import ConfigError
from .fixedpoint import FixedPointParams, decode_lut, encode_interval, hi_saturates
from .metrics import DistanceCounter, MetricSpace


@dataclass(frozen=True)
class Interval:
    """Closed distance interval with 0 <= lo <= hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi):
            raise ConfigError(f"invalid interval [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class ConstantArity:
    """Every internal node gets min(m, node object count) centers."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ConfigError(f"constant arity must be >= 2, got {self.m}")


@dataclass(frozen=True)
class PowerArity:
    """Node with n objects gets about n**alpha centers; alpha = 1 degenerates
    to a single flat node (every object a center), alpha near 0 to a binary
    hyperplane tree."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")


ArityPolicy = ConstantArity | PowerArity


@dataclass(frozen=True)
class BuildConfig:
    arity: ArityPolicy
    partition: str = "hyperplane"  # "hyperplane" | "ball"
    gamma: float = 0.9             # ball capacity exponent, ball partition only
    bucket_size: int = 0           # 0 = build the whole way down
    reduce_factor: float = 1.0     # rows kept = ceil(centers / reduce_factor)
    fixed_point: FixedPointParams | None = None
    seed: int = 0

    def __post_init__(self):
        if self.partition not in ("hyperplane", "ball"):
            raise ConfigError(f"unknown partition {self.partition!r}")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.bucket_size < 0:
            raise ConfigError(f"bucket_size must be >= 0, got {self.bucket_size}")
        if self.reduce_factor < 1.0:
            raise ConfigError(f"reduce_factor must be >= 1, got {self.reduce_factor}")


class RangeTable:
    """Interval matrix indexed (measuring pivot row, child column).

    Exact tables store float64 bounds; fixed-point tables store uint16
    codes plus the codec params.  When any upper bound saturated during
    encoding the table carries a flag and saturated codes decode to +inf,
    which disables upper-bound pruning for those entries but keeps every
    query exact.
    """

    __slots__ = ("lo", "hi", "fixed_point", "hi_saturated", "_decoded")

    def __init__(self, lo: np.ndarray, hi: np.ndarray,
                 fixed_point: FixedPointParams | None = None,
                 hi_saturated: bool = False):
        self.lo = lo
        self.hi = hi
        self.fixed_point = fixed_point
        self.hi_saturated = hi_saturated
        self._decoded = None

    @property
    def rows(self) -> int:
        return self.lo.shape[0]

    @property
    def cols(self) -> int:
        return self.lo.shape[1]

    @property
    def entry_count(self) -> int:
        return self.lo.shape[0] * self.lo.shape[1]

    @property
    def value_bytes(self) -> float:
        """Accounting width of one stored bound: 4-byte floats, or b/8."""
        return 4.0 if self.fixed_point is None else self.fixed_point.value_bytes

    def decoded_bounds(self) -> tuple[list, list]:
        """Bounds as row lists of floats, decoding fixed-point codes once."""
        if self._decoded is None:
            if self.fixed_point is None:
                self._decoded = (self.lo.tolist(), self.hi.tolist())
            else:
                lut = decode_lut(self.fixed_point)
                lo = lut[self.lo]
                hi = lut[self.hi]
                if self.hi_saturated:
                    hi = np.where(self.hi == self.fixed_point.max_code, np.inf, hi)
                self._decoded = (lo.tolist(), hi.tolist())
        return self._decoded

    def interval(self, row: int, col: int) -> Interval:
        lo, hi = self.decoded_bounds()
        return Interval(lo[row][col], hi[row][col])

    def __eq__(self, other):
        if not isinstance(other, RangeTable):
            return NotImplemented
        return (
            self.fixed_point == other.fixed_point
            and self.hi_saturated == other.hi_saturated
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )


@dataclass
class Bucket:
    """Leaf holding raw object ids, scanned linearly at query time."""

    object_ids: list[int]


@dataclass
class GnatNode:
    centers: list[int]          # object ids, ascending
    table: RangeTable
    children: list              # GnatNode | Bucket, one per center
    measuring_set: list[int]    # center positions with a table row, ascending


@dataclass
class GnatTree:
    root: GnatNode | Bucket
    config: BuildConfig
    dataset: Dataset
    size: int
    build_distance_evals: int = 0


def arity_for(node_size: int, policy: ArityPolicy) -> int:
    """Center count for a node with node_size objects.

    Power arities round n**alpha to nearest and clamp to [2, n]; nodes with
    fewer than 2 objects keep their size (the builder turns them into
    leaves before this matters).
    """
    if node_size < 1:
        raise ConfigError(f"node size must be >= 1, got {node_size}")
    if isinstance(policy, ConstantArity):
        return min(policy.m, node_size)
    if node_size < 2:
        return node_size
    return max(2, min(node_size, int(node_size**policy.alpha + 0.5)))


def select_pivots(object_ids, m: int, rng: np.random.Generator) -> list[int]:
    """m distinct object ids sampled uniformly without replacement.

    The sampled set is returned sorted ascending, which makes the lowest
    center position coincide with the lowest object id everywhere
    tie-breaking matters.
    """
    if m > len(object_ids):
        raise ValueError(f"cannot select {m} pivots from {len(object_ids)} objects")
    picked = rng.choice(len(object_ids), size=m, replace=False)
    return sorted(object_ids[i] for i in picked)


def hyperplane_partition(object_ids, center_ids, dataset: Dataset,
                         metric: MetricSpace) -> list[list[int]]:
    """Assign every object to its nearest center (nearest-center cells).

    Ties go to the lowest center position.  Costs exactly
    len(object_ids) * len(center_ids) distance evaluations.
    """
    if not center_ids:
        raise ConfigError("hyperplane partition needs at least one center")
    dist = metric.distance
    centers = [dataset[cid] for cid in center_ids]
    assigned: list[list[int]] = [[] for _ in center_ids]
    for oid in object_ids:
        obj = dataset[oid]
        best = math.inf
        best_pos = 0
        for pos, center in enumerate(centers):
            d = dist(obj, center)
            if d < best:
                best = d
                best_pos = pos
        assigned[best_pos].append(oid)
    return assigned


def ball_capacity(object_count: int, m: int, gamma: float) -> int:
    """Per-ball capacity: ceil(object_count**gamma / m), at least 1."""
    if object_count == 0:
        return 1
    return max(1, math.ceil(object_count**gamma / m))


def ball_partition(object_ids, center_ids, gamma: float, dataset: Dataset,
                   metric: MetricSpace) -> list[list[int]]:
    """Greedy balls: each center but the last takes its nearest unclaimed
    objects up to a fixed capacity; the last center takes the leftovers.

    Capacities use the initial object count, so gamma < 1 starves the
    early balls and funnels mass into the last child (an unbalanced,
    right-deep tree).  Ties at the ball boundary go to the lower object id.
    """
    m = len(center_ids)
    if m == 0:
        raise ConfigError("ball partition needs at least one center")
    capacity = ball_capacity(len(object_ids), m, gamma)
    dist = metric.distance
    remaining = list(object_ids)
    assigned: list[list[int]] = []
    for pos in range(m - 1):
        if not remaining:
            assigned.append([])
            continue
        center = dataset[center_ids[pos]]
        take = min(capacity, len(remaining))
        nearest = heapq.nsmallest(take, ((dist(dataset[oid], center), oid) for oid in remaining))
        taken = {oid for _, oid in nearest}
        assigned.append([oid for oid in remaining if oid in taken])
        remaining = [oid for oid in remaining if oid not in taken]
    assigned.append(remaining)
    return assigned


def compute_range_table(measuring_ids, center_ids, partitions, dataset: Dataset,
                        metric: MetricSpace) -> RangeTable:
    """Exact [min, max] of distances from each measuring pivot to each
    child's objects, the child's center included.

    The only distance shortcut taken is d(x, x) = 0 when the measuring
    pivot is the child center itself.
    """
    rows, cols = len(measuring_ids), len(center_ids)
    lo = np.zeros((rows, cols), dtype=np.float64)
    hi = np.zeros((rows, cols), dtype=np.float64)
    dist = metric.distance
    for i, pid in enumerate(measuring_ids):
        pivot = dataset[pid]
        for j, cid in enumerate(center_ids):
            d = 0.0 if pid == cid else dist(pivot, dataset[cid])
            d_min = d_max = d
            for oid in partitions[j]:
                d = dist(pivot, dataset[oid])
                if d < d_min:
                    d_min = d
                elif d > d_max:
                    d_max = d
            lo[i, j] = d_min
            hi[i, j] = d_max
    return RangeTable(lo, hi)


def encode_table(table: RangeTable, params: FixedPointParams) -> RangeTable:
    """Fixed-point twin of an exact table (lo rounded down, hi rounded up)."""
    if table.fixed_point is not None:
        raise ConfigError("table is already fixed-point encoded")
    rows, cols = table.rows, table.cols
    lo_codes = np.zeros((rows, cols), dtype=np.uint16)
    hi_codes = np.zeros((rows, cols), dtype=np.uint16)
    saturated = False
    for i in range(rows):
        for j in range(cols):
            lo_c, hi_c = encode_interval(float(table.lo[i, j]), float(table.hi[i, j]), params)
            lo_codes[i, j] = lo_c
            hi_codes[i, j] = hi_c
            if hi_c == params.max_code and hi_saturates(float(table.hi[i, j]), params):
                saturated = True
    return RangeTable(lo_codes, hi_codes, fixed_point=params, hi_saturated=saturated)


def build(dataset: Dataset, metric: MetricSpace, config: BuildConfig) -> GnatTree:
    """Build a tree over the whole dataset.

    Recursion stops at a bucket once a node's object count drops to
    bucket_size (or to a single object when bucket_size is 0).  Every
    object ends up in exactly one place: a center of one internal node or
    a member of one bucket.
    """
    if len(dataset) == 0:
        raise ConfigError("cannot build an index over an empty dataset")
    counter = DistanceCounter(metric)
    pivot_rng = rng_stream(config.seed, "pivots")
    reduce_rng = rng_stream(config.seed, "reduce")
    root = _build_node(list(range(len(dataset))), dataset, counter, config,
                       pivot_rng, reduce_rng)
    return GnatTree(root, config, dataset, len(dataset), counter.count)


def _build_node(object_ids, dataset, metric, config, pivot_rng, reduce_rng):
    if len(object_ids) <= max(1, config.bucket_size):
        return Bucket(object_ids)
    m = arity_for(len(object_ids), config.arity)
    centers = select_pivots(object_ids, m, pivot_rng)
    center_set = set(centers)
    rest = [oid for oid in object_ids if oid not in center_set]
    if config.partition == "ball":
        partitions = ball_partition(rest, centers, config.gamma, dataset, metric)
    else:
        partitions = hyperplane_partition(rest, centers, dataset, metric)
    if config.reduce_factor > 1.0:
        keep = math.ceil(m / config.reduce_factor)
        positions = sorted(reduce_rng.choice(m, size=keep, replace=False).tolist())
    else:
        positions = list(range(m))
    table = compute_range_table([centers[p] for p in positions], centers,
                                partitions, dataset, metric)
    if config.fixed_point is not None:
        table = encode_table(table, config.fixed_point)
    children = [_build_node(part, dataset, metric, config, pivot_rng, reduce_rng)
                for part in partitions]
    return GnatNode(centers, table, children, positions)


def with_fixed_point(tree: GnatTree, params: FixedPointParams) -> GnatTree:
    """Same tree shape with tables re-encoded in fixed point.

    Useful for paired comparisons: the twin is guaranteed to differ only
    in table storage, never in structure.
    """
    if tree.config.fixed_point is not None:
        raise ConfigError("tree tables are already fixed-point encoded")

    def convert(node):
        if isinstance(node, Bucket):
            return Bucket(list(node.object_ids))
        return GnatNode(list(node.centers), encode_table(node.table, params),
                        [convert(child) for child in node.children],
                        list(node.measuring_set))

    config = BuildConfig(arity=tree.config.arity, partition=tree.config.partition,
                         gamma=tree.config.gamma, bucket_size=tree.config.bucket_size,
                         reduce_factor=tree.config.reduce_factor, fixed_point=params,
                         seed=tree.config.seed)
    return GnatTree(convert(tree.root), config, tree.dataset, tree.size,
                    tree.build_distance_evals)


def iter_nodes(root):
    """Pre-order iteration over internal nodes."""
    stack = [root]
    while stack:
        node = stack.pop()
        if isinstance(node, GnatNode):
            yield node
            stack.extend(reversed(node.children))


def subtree_object_ids(node) -> list[int]:
    """All object ids stored in a subtree (centers and bucket members)."""
    out: list[int] = []
    stack = [node]
    while stack:
        node = stack.pop()
        if isinstance(node, Bucket):
            out.extend(node.object_ids)
        else:
            out.extend(node.centers)
            stack.extend(node.children)
    return out


def table_entry_count(tree: GnatTree) -> int:
    """Total range-table entries, the memory metric for all experiments."""
    return sum(node.table.entry_count for node in iter_nodes(tree.root))


def table_bytes(tree: GnatTree) -> float:
    """Table storage in bytes: entries x 2 bounds x codec value width."""
    return sum(node.table.entry_count * 2 * node.table.value_bytes
               for node in iter_nodes(tree.root))
