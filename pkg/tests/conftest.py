import numpy as np
import pytest

from protolearn import Dataset, EmbeddingRecord


def random_dataset(rng, n=20, d=6, labeled_fraction=0.7, num_classes=4) -> Dataset:
    records = []
    for i in range(n):
        label = int(rng.integers(num_classes)) if rng.random() < labeled_fraction else None
        records.append(
            EmbeddingRecord(
                id=i,
                label=label,
                base=rng.standard_normal(d).astype(np.float32),
                weak=rng.standard_normal(d).astype(np.float32),
                strong=rng.standard_normal(d).astype(np.float32),
            )
        )
    return Dataset(dim=d, records=tuple(records))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
