"""Versioned binary tree files.

Layout (little endian): magic ``GNTF``, u32 version, a length-prefixed
JSON echo of the build config, u64 object count, then pre-order node
records.  Fixed-point tables round-trip as their stored codes; nothing is
re-encoded on load.  The dataset itself is not stored, the caller supplies
it again (object count is checked).
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .datasets import Dataset
from .errors import ConfigError
from .fixedpoint import FixedPointParams
from .tree import Bucket, BuildConfig, ConstantArity, GnatNode, GnatTree, PowerArity, RangeTable

_MAGIC = b"GNTF"
_VERSION = 1

_KIND_BUCKET = 0
_KIND_NODE = 1


def _config_json(config: BuildConfig) -> bytes:
    arity = ({"kind": "constant", "m": config.arity.m}
             if isinstance(config.arity, ConstantArity)
             else {"kind": "power", "alpha": config.arity.alpha})
    fp = None
    if config.fixed_point is not None:
        fp = {"total_bits": config.fixed_point.total_bits,
              "magnitude_bits": config.fixed_point.magnitude_bits,
              "beta": config.fixed_point.beta}
    doc = {"arity": arity, "partition": config.partition, "gamma": config.gamma,
           "bucket_size": config.bucket_size, "reduce_factor": config.reduce_factor,
           "fixed_point": fp, "seed": config.seed}
    return json.dumps(doc, sort_keys=True).encode("utf-8")


def _config_from_json(raw: bytes) -> BuildConfig:
    doc = json.loads(raw.decode("utf-8"))
    arity_doc = doc["arity"]
    arity = (ConstantArity(arity_doc["m"]) if arity_doc["kind"] == "constant"
             else PowerArity(arity_doc["alpha"]))
    fp = None
    if doc["fixed_point"] is not None:
        fp = FixedPointParams(**doc["fixed_point"])
    return BuildConfig(arity=arity, partition=doc["partition"], gamma=doc["gamma"],
                       bucket_size=doc["bucket_size"], reduce_factor=doc["reduce_factor"],
                       fixed_point=fp, seed=doc["seed"])


def _write_node(out: list[bytes], node) -> None:
    if isinstance(node, Bucket):
        out.append(struct.pack("<BI", _KIND_BUCKET, len(node.object_ids)))
        out.append(np.asarray(node.object_ids, dtype=np.uint32).tobytes())
        return
    table = node.table
    out.append(struct.pack("<BI", _KIND_NODE, len(node.centers)))
    out.append(np.asarray(node.centers, dtype=np.uint32).tobytes())
    out.append(struct.pack("<I", len(node.measuring_set)))
    out.append(np.asarray(node.measuring_set, dtype=np.uint32).tobytes())
    if table.fixed_point is None:
        out.append(struct.pack("<BB", 0, 0))
        out.append(table.lo.astype(np.float64, copy=False).tobytes())
        out.append(table.hi.astype(np.float64, copy=False).tobytes())
    else:
        out.append(struct.pack("<BB", 1, int(table.hi_saturated)))
        out.append(table.lo.astype(np.uint16, copy=False).tobytes())
        out.append(table.hi.astype(np.uint16, copy=False).tobytes())
    for child in node.children:
        _write_node(out, child)


def save_tree(tree: GnatTree, path) -> None:
    config_blob = _config_json(tree.config)
    out = [_MAGIC, struct.pack("<I", _VERSION),
           struct.pack("<I", len(config_blob)), config_blob,
           struct.pack("<Q", tree.size)]
    _write_node(out, tree.root)
    with open(path, "wb") as handle:
        handle.write(b"".join(out))


class _Reader:
    def __init__(self, blob: bytes, path):
        self.blob = blob
        self.pos = 0
        self.path = path

    def unpack(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.blob):
            raise ConfigError(f"{self.path}: truncated tree file")
        values = struct.unpack_from(fmt, self.blob, self.pos)
        self.pos += size
        return values

    def array(self, dtype, count: int) -> np.ndarray:
        size = np.dtype(dtype).itemsize * count
        if self.pos + size > len(self.blob):
            raise ConfigError(f"{self.path}: truncated tree file")
        arr = np.frombuffer(self.blob, dtype=dtype, count=count, offset=self.pos).copy()
        self.pos += size
        return arr


def _read_node(reader: _Reader, fp: FixedPointParams | None):
    kind, count = reader.unpack("<BI")
    if kind == _KIND_BUCKET:
        return Bucket(reader.array(np.uint32, count).astype(int).tolist())
    if kind != _KIND_NODE:
        raise ConfigError(f"{reader.path}: corrupt node record (kind={kind})")
    centers = reader.array(np.uint32, count).astype(int).tolist()
    (n_rows,) = reader.unpack("<I")
    measuring = reader.array(np.uint32, n_rows).astype(int).tolist()
    codec, saturated = reader.unpack("<BB")
    shape = (n_rows, count)
    if codec == 0:
        lo = reader.array(np.float64, n_rows * count).reshape(shape)
        hi = reader.array(np.float64, n_rows * count).reshape(shape)
        table = RangeTable(lo, hi)
    else:
        if fp is None:
            raise ConfigError(f"{reader.path}: fixed-point table but config has no codec params")
        lo = reader.array(np.uint16, n_rows * count).reshape(shape)
        hi = reader.array(np.uint16, n_rows * count).reshape(shape)
        table = RangeTable(lo, hi, fixed_point=fp, hi_saturated=bool(saturated))
    children = [_read_node(reader, fp) for _ in range(count)]
    return GnatNode(centers, table, children, measuring)


def load_tree(path, dataset: Dataset) -> GnatTree:
    with open(path, "rb") as handle:
        blob = handle.read()
    reader = _Reader(blob, path)
    magic = blob[:4]
    reader.pos = 4
    if magic != _MAGIC:
        raise ConfigError(f"{path}: not a tree file (bad magic)")
    (version,) = reader.unpack("<I")
    if version != _VERSION:
        raise ConfigError(f"{path}: unsupported tree file version {version}")
    (config_len,) = reader.unpack("<I")
    config = _config_from_json(blob[reader.pos:reader.pos + config_len])
    reader.pos += config_len
    (size,) = reader.unpack("<Q")
    if size != len(dataset):
        raise ConfigError(
            f"{path}: tree was built over {size} objects, dataset has {len(dataset)}")
    root = _read_node(reader, config.fixed_point)
    return GnatTree(root, config, dataset, size)
