"""Dataset splitting into class-disjoint incremental tasks."""

import numpy as np

from .data import Dataset, SplitPlan, TaskData, ViewBatch
from .errors import ConfigurationError


def resolve_class_order(dataset: Dataset, plan: SplitPlan):
    classes = sorted(int(c) for c in dataset.class_set)
    if plan.class_order is not None:
        if sorted(plan.class_order) != classes:
            raise ConfigurationError(
                "class_order must be a permutation of the dataset's class set"
            )
        return list(plan.class_order)
    order = list(classes)
    np.random.default_rng(plan.seed).shuffle(order)
    return order


def _task_class_groups(order, plan: SplitPlan):
    n = len(order)
    if plan.base_size == 0:
        if n % plan.num_tasks != 0:
            raise ConfigurationError(
                f"{n} classes not divisible into {plan.num_tasks} equal tasks"
            )
        per = n // plan.num_tasks
        return [order[i * per : (i + 1) * per] for i in range(plan.num_tasks)]
    rest = n - plan.base_size
    incr = plan.num_tasks - 1
    if rest < 0 or incr < 1 or rest % incr != 0:
        raise ConfigurationError(
            f"base {plan.base_size} + {rest} remaining classes do not divide "
            f"into {incr} incremental tasks"
        )
    per = rest // incr
    groups = [order[: plan.base_size]]
    for i in range(incr):
        start = plan.base_size + i * per
        groups.append(order[start : start + per])
    return groups


def split_dataset(dataset: Dataset, plan: SplitPlan):
    """Split into TaskData per the plan.

    Per class, exactly ``labels_per_class`` samples (seeded choice) keep
    their labels; the rest go to the task's unlabeled pool with labels
    stripped (kept only in the diagnostic field).
    """
    order = resolve_class_order(dataset, plan)
    groups = _task_class_groups(order, plan)
    rng = np.random.default_rng(plan.seed)

    by_class = {}
    for idx, rec in enumerate(dataset.records):
        if rec.label is not None:
            by_class.setdefault(int(rec.label), []).append(idx)

    # one labeled/unlabeled split per class, drawn in class_order for determinism
    labeled_idx = {}
    unlabeled_idx = {}
    for c in order:
        idxs = np.array(by_class[c])
        if len(idxs) < plan.labels_per_class:
            raise ConfigurationError(
                f"class {c} has {len(idxs)} samples, needs {plan.labels_per_class} labeled"
            )
        chosen = rng.choice(len(idxs), size=plan.labels_per_class, replace=False)
        mask = np.zeros(len(idxs), dtype=bool)
        mask[chosen] = True
        labeled_idx[c] = idxs[mask]
        unlabeled_idx[c] = idxs[~mask]

    base, weak, strong = dataset.stacked_views()
    tasks = []
    for t, group in enumerate(groups):
        lab = np.concatenate([labeled_idx[c] for c in group])
        unl_parts = [unlabeled_idx[c] for c in group if len(unlabeled_idx[c])]
        unl = np.concatenate(unl_parts) if unl_parts else np.empty(0, dtype=int)
        tasks.append(
            TaskData(
                task_index=t,
                class_ids=tuple(group),
                labeled=ViewBatch(base[lab], weak[lab], strong[lab]),
                labels=np.array(
                    [dataset.records[i].label for i in lab], dtype=np.int64
                ),
                unlabeled=ViewBatch(base[unl], weak[unl], strong[unl]),
                unlabeled_diag_labels=np.array(
                    [dataset.records[i].label for i in unl], dtype=np.int64
                ),
            )
        )
    return tasks
