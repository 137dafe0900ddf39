"""Core data model: embedding records, datasets, split plans and task data."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class EmbeddingRecord:
    """One sample's feature views plus an optional class label.

    All three views (base / weak / strong perturbation) must share the same
    dimension and be finite. ``label is None`` marks an unlabeled sample.
    """

    id: int
    label: Optional[int]
    base: np.ndarray
    weak: np.ndarray
    strong: np.ndarray

    def __post_init__(self):
        for name in ("base", "weak", "strong"):
            v = getattr(self, name)
            arr = np.asarray(v, dtype=np.float32)
            if arr.ndim != 1:
                raise ConfigurationError(f"view '{name}' must be a 1-d vector")
            if not np.all(np.isfinite(arr)):
                raise ConfigurationError(f"view '{name}' contains non-finite values")
            object.__setattr__(self, name, arr)
        d = self.base.shape[0]
        if self.weak.shape[0] != d or self.strong.shape[0] != d:
            raise ConfigurationError("all views of a record must share one dimension")

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingRecord):
            return NotImplemented
        return (
            self.id == other.id
            and self.label == other.label
            and np.array_equal(self.base, other.base)
            and np.array_equal(self.weak, other.weak)
            and np.array_equal(self.strong, other.strong)
        )


@dataclass(frozen=True)
class Dataset:
    """An in-memory collection of embedding records with a fixed dimension."""

    dim: int
    records: tuple

    def __post_init__(self):
        if self.dim <= 0:
            raise ConfigurationError("dataset dimension must be positive")
        object.__setattr__(self, "records", tuple(self.records))
        for rec in self.records:
            if rec.dim != self.dim:
                raise ConfigurationError(
                    f"record {rec.id} has dim {rec.dim}, dataset dim {self.dim}"
                )

    @property
    def class_set(self) -> frozenset:
        return frozenset(r.label for r in self.records if r.label is not None)

    def __len__(self) -> int:
        return len(self.records)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.dim == other.dim and self.records == other.records

    def labels(self) -> np.ndarray:
        """Labels as an int64 array, -1 for unlabeled records."""
        return np.array(
            [-1 if r.label is None else r.label for r in self.records], dtype=np.int64
        )

    def stacked_views(self):
        """(base, weak, strong) stacked as (n, d) float32 arrays."""
        base = np.stack([r.base for r in self.records])
        weak = np.stack([r.weak for r in self.records])
        strong = np.stack([r.strong for r in self.records])
        return base, weak, strong


@dataclass(frozen=True)
class SplitPlan:
    """How to carve a dataset into class-disjoint incremental tasks.

    ``base_size`` classes go to task 1 (0 means uniform division); the rest
    are divided equally among the remaining tasks. ``labels_per_class``
    samples per class stay labeled, the rest have their labels stripped.
    """

    base_size: int
    num_tasks: int
    labels_per_class: int
    seed: int = 0
    class_order: Optional[tuple] = None

    def __post_init__(self):
        if self.base_size < 0:
            raise ConfigurationError("base_size must be >= 0")
        if self.num_tasks < 1:
            raise ConfigurationError("num_tasks must be >= 1")
        if self.labels_per_class < 1:
            raise ConfigurationError("labels_per_class must be >= 1")
        if self.class_order is not None:
            order = tuple(self.class_order)
            if len(set(order)) != len(order):
                raise ConfigurationError("class_order contains duplicates")
            object.__setattr__(self, "class_order", order)


@dataclass(frozen=True)
class ViewBatch:
    """Stacked base/weak/strong views for a group of samples."""

    base: np.ndarray
    weak: np.ndarray
    strong: np.ndarray

    def __len__(self) -> int:
        return self.base.shape[0]


@dataclass(frozen=True)
class TaskData:
    """One incremental task: a labeled subset and an unlabeled pool.

    ``unlabeled_diag_labels`` keeps the ground-truth class of each unlabeled
    sample (-1 for injected out-of-distribution data). It exists only for
    diagnostics such as pseudo-label precision; the trainer never reads it.
    """

    task_index: int
    class_ids: tuple
    labeled: ViewBatch
    labels: np.ndarray
    unlabeled: ViewBatch
    unlabeled_diag_labels: np.ndarray = field(repr=False, default=None)
