"""Reader/writer for the PCE1 binary embedding file format.

Layout (all little-endian, no padding):

    magic   4 bytes  0x50 0x43 0x45 0x31 ("PCE1")
    dim     u32
    count   u64
    views   u8 bitmask: bit0 base, bit1 weak, bit2 strong
    records count times:
        id      u64
        label   i64 (-1 = unlabeled)
        view    dim * f32, once per present view in (base, weak, strong) order
"""

import os
import struct

import numpy as np

from .data import Dataset, EmbeddingRecord
from .errors import ConfigurationError, CorruptionError, FormatError

MAGIC = b"PCE1"
VIEW_BASE = 1
VIEW_WEAK = 2
VIEW_STRONG = 4

_HEADER = struct.Struct("<4sIQB")
_REC_HEAD = struct.Struct("<Qq")


def write_embedding_file(dataset: Dataset, path) -> None:
    """Write a dataset to ``path``; byte output is deterministic."""
    if len(dataset) == 0:
        raise ConfigurationError("refusing to write an empty dataset")
    try:
        with open(path, "wb") as f:
            f.write(_HEADER.pack(MAGIC, dataset.dim, len(dataset), 0b111))
            for rec in dataset.records:
                label = -1 if rec.label is None else rec.label
                f.write(_REC_HEAD.pack(rec.id, label))
                f.write(rec.base.astype("<f4", copy=False).tobytes())
                f.write(rec.weak.astype("<f4", copy=False).tobytes())
                f.write(rec.strong.astype("<f4", copy=False).tobytes())
    except OSError as e:
        raise CorruptionError(f"failed writing embedding file {path}: {e}") from e


def read_embedding_file(path) -> Dataset:
    """Read a PCE1 file back into a Dataset.

    Raises FormatError on a bad magic/header, CorruptionError on truncation.
    """
    if not os.path.exists(path):
        raise FormatError(f"no such embedding file: {path}")
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: too short to hold a PCE1 header")
    magic, dim, count, mask = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if dim == 0:
        raise CorruptionError(f"{path}: header declares dim=0")
    if not mask & VIEW_BASE:
        raise FormatError(f"{path}: base view missing from views bitmask {mask:#04x}")

    n_views = bin(mask & 0b111).count("1")
    rec_size = _REC_HEAD.size + n_views * 4 * dim
    expected = _HEADER.size + count * rec_size
    if len(blob) != expected:
        raise CorruptionError(
            f"{path}: expected {expected} bytes for {count} records, got {len(blob)}"
        )

    records = []
    off = _HEADER.size
    for _ in range(count):
        rid, label = _REC_HEAD.unpack_from(blob, off)
        off += _REC_HEAD.size
        views = {}
        for name, bit in (("base", VIEW_BASE), ("weak", VIEW_WEAK), ("strong", VIEW_STRONG)):
            if mask & bit:
                views[name] = np.frombuffer(blob, dtype="<f4", count=dim, offset=off).copy()
                off += 4 * dim
        base = views["base"]
        records.append(
            EmbeddingRecord(
                id=rid,
                label=None if label < 0 else int(label),
                base=base,
                weak=views.get("weak", base.copy()),
                strong=views.get("strong", base.copy()),
            )
        )
    return Dataset(dim=dim, records=tuple(records))
