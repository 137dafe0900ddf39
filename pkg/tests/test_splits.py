import numpy as np
import pytest

from protolearn import (
    ConfigurationError,
    Dataset,
    EmbeddingRecord,
    SplitPlan,
    SyntheticConfig,
    generate_synthetic,
    split_dataset,
)


def many_class_dataset(num_classes=100, per_class=8, d=4, seed=0):
    return generate_synthetic(
        SyntheticConfig(num_classes, per_class, d, 1.0, 0.1, 0.05, 0.1, seed=seed)
    )


def test_uniform_split_100_classes_5_tasks():
    ds = many_class_dataset()
    tasks = split_dataset(ds, SplitPlan(base_size=0, num_tasks=5, labels_per_class=2))
    assert len(tasks) == 5
    assert all(len(t.class_ids) == 20 for t in tasks)


def test_base60_9_tasks():
    ds = many_class_dataset()
    tasks = split_dataset(ds, SplitPlan(base_size=60, num_tasks=9, labels_per_class=2))
    assert len(tasks[0].class_ids) == 60
    assert all(len(t.class_ids) == 5 for t in tasks[1:])
    assert len(tasks) == 9


def test_label_budget_and_pool_size():
    # 500 samples per class, 5 labeled -> 495 unlabeled per class
    ds = many_class_dataset(num_classes=4, per_class=500, seed=1)
    tasks = split_dataset(ds, SplitPlan(base_size=0, num_tasks=2, labels_per_class=5))
    for t in tasks:
        for c in t.class_ids:
            assert (t.labels == c).sum() == 5
        assert len(t.unlabeled) == 495 * len(t.class_ids)


def test_disjoint_union_property():
    ds = many_class_dataset(num_classes=12, per_class=6, seed=3)
    tasks = split_dataset(ds, SplitPlan(base_size=0, num_tasks=4, labels_per_class=2, seed=5))
    seen = set()
    for t in tasks:
        assert not (set(t.class_ids) & seen)
        seen |= set(t.class_ids)
    assert seen == set(ds.class_set)


def test_unlabeled_diag_labels_match_classes():
    ds = many_class_dataset(num_classes=6, per_class=10, seed=2)
    tasks = split_dataset(ds, SplitPlan(base_size=0, num_tasks=3, labels_per_class=3))
    for t in tasks:
        assert set(t.unlabeled_diag_labels) <= set(t.class_ids)


def test_determinism():
    ds = many_class_dataset(num_classes=10, per_class=10)
    plan = SplitPlan(base_size=0, num_tasks=5, labels_per_class=2, seed=9)
    a = split_dataset(ds, plan)
    b = split_dataset(ds, plan)
    for ta, tb in zip(a, b):
        assert ta.class_ids == tb.class_ids
        np.testing.assert_array_equal(ta.labeled.base, tb.labeled.base)
        np.testing.assert_array_equal(ta.unlabeled.base, tb.unlabeled.base)


def test_fixed_class_order():
    ds = many_class_dataset(num_classes=6, per_class=6)
    order = (5, 4, 3, 2, 1, 0)
    tasks = split_dataset(
        ds, SplitPlan(base_size=0, num_tasks=3, labels_per_class=2, class_order=order)
    )
    assert tasks[0].class_ids == (5, 4)
    assert tasks[2].class_ids == (1, 0)


def test_indivisible_classes_rejected():
    ds = many_class_dataset(num_classes=10, per_class=6)
    with pytest.raises(ConfigurationError):
        split_dataset(ds, SplitPlan(base_size=0, num_tasks=3, labels_per_class=2))
    with pytest.raises(ConfigurationError):
        split_dataset(ds, SplitPlan(base_size=5, num_tasks=3, labels_per_class=2))


def test_too_few_samples_rejected():
    ds = many_class_dataset(num_classes=4, per_class=3)
    with pytest.raises(ConfigurationError):
        split_dataset(ds, SplitPlan(base_size=0, num_tasks=2, labels_per_class=5))


def test_bad_class_order_rejected():
    ds = many_class_dataset(num_classes=4, per_class=4)
    with pytest.raises(ConfigurationError):
        split_dataset(
            ds,
            SplitPlan(base_size=0, num_tasks=2, labels_per_class=1, class_order=(0, 1, 2, 9)),
        )
