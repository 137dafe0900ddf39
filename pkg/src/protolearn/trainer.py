"""Semi-supervised incremental training of the prototype classifier.

Per task: initialize new prototypes at labeled class means, estimate the
radial resampling scale on the first task, then run SGD (momentum, cosine
learning-rate decay) on the joint objective: supervised CE + PL over the
labeled batch plus resampled old-class pseudo-instances, and CE over
confidently pseudo-labeled strong views of unlabeled samples.

Randomness uses three independent streams per task (resampling, labeled
shuffling, unlabeled shuffling), each seeded from (seed, task_index,
stream_id). Draw order within each stream is per-epoch: the resampling
stream draws once per epoch before the minibatch loop; the shuffle streams
draw one permutation per epoch. Disabling a component therefore leaves the
other streams' draws untouched.
"""

from dataclasses import dataclass, field, replace
from math import cos, pi
from typing import Optional

import numpy as np

from .classifier import (
    ClassifierConfig,
    PrototypeSet,
    all_squared_distances,
    ipc_gradient,
    predict,
    _log_probabilities,
)
from .data import TaskData
from .errors import ConfigurationError, ProtocolError, StateError


@dataclass(frozen=True)
class TrainConfig:
    lr0: float = 0.1
    momentum: float = 0.9
    epochs: int = 80
    batch_size: int = 128
    tau: float = 0.8
    gamma: float = 1.0
    lambda_pl: float = 0.01
    resample_per_class: Optional[int] = None  # None -> match labels per class
    seed: int = 0
    use_pur: bool = True
    use_iu: bool = True
    use_pl: bool = True
    use_resample: bool = True

    def __post_init__(self):
        if self.lr0 < 0:
            raise ConfigurationError("lr0 must be nonnegative")
        if not 0 <= self.momentum < 1:
            raise ConfigurationError("momentum must be in [0, 1)")
        if self.epochs < 1:
            raise ConfigurationError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if not 0 < self.tau < 1:
            raise ConfigurationError("tau must be in (0, 1)")
        if self.gamma <= 0:
            raise ConfigurationError("gamma must be positive")
        if self.lambda_pl < 0:
            raise ConfigurationError("lambda_pl must be nonnegative")
        if self.resample_per_class is not None and self.resample_per_class < 0:
            raise ConfigurationError("resample_per_class must be nonnegative")

    def classifier_config(self) -> ClassifierConfig:
        return ClassifierConfig(
            gamma=self.gamma, lambda_pl=self.lambda_pl if self.use_pl else 0.0
        )


@dataclass(frozen=True)
class TrainerState:
    protoset: PrototypeSet
    radial_scale: Optional[float] = None  # set exactly once, on the first task
    task_index: int = 0  # index of the next task to train
    seed: int = 0


@dataclass
class TaskLog:
    """Per-task training diagnostics (never fed back into training)."""

    task_index: int
    selected_total: int = 0
    offered_total: int = 0
    pseudo_pairs: list = field(default_factory=list)  # (unlabeled pool index, pseudo label)

    @property
    def selection_rate(self) -> float:
        return self.selected_total / self.offered_total if self.offered_total else 0.0


def init_prototypes(task_data: TaskData, protoset: PrototypeSet, use_iu: bool = True) -> PrototypeSet:
    """Append one class-mean prototype per new class."""
    old_count = len(protoset)
    means = []
    for c in task_data.class_ids:
        mask = task_data.labels == c
        if not mask.any():
            raise ConfigurationError(f"class {c} has no labeled samples")
        means.append(task_data.labeled.base[mask].mean(axis=0))
    protos = np.vstack([protoset.protos, np.asarray(means, dtype=np.float64)])
    return PrototypeSet(
        protos,
        protoset.class_ids + tuple(task_data.class_ids),
        frozen_count=old_count if use_iu else 0,
    )


def estimate_radial_scale(labeled_base: np.ndarray, labels: np.ndarray) -> float:
    """sqrt of the average per-dimension within-class variance.

    Per-class sample covariances use the n-1 denominator. If any class has
    fewer than 2 labeled samples the pooled covariance of all labeled
    embeddings is used instead.
    """
    X = np.asarray(labeled_base, dtype=np.float64)
    d = X.shape[1]
    classes = np.unique(labels)
    traces = []
    for c in classes:
        grp = X[labels == c]
        if len(grp) < 2:
            traces = None
            break
        traces.append(((grp - grp.mean(axis=0)) ** 2).sum() / (len(grp) - 1))
    if traces is None:
        if len(X) < 2:
            return 0.0
        pooled = ((X - X.mean(axis=0)) ** 2).sum() / (len(X) - 1)
        return float(np.sqrt(pooled / d))
    return float(np.sqrt(np.mean(traces) / d))


def resample_old(protoset: PrototypeSet, r: float, count_per_class: int, rng, old_count: Optional[int] = None):
    """Gaussian pseudo-instances around each old-class prototype.

    Returns (Z, labels); empty arrays when there are no old classes. Noise
    is drawn class by class in prototype row order.
    """
    if old_count is None:
        old_count = protoset.frozen_count
    d = protoset.protos.shape[1]
    if old_count == 0 or count_per_class == 0:
        return np.empty((0, d)), np.empty(0, dtype=np.int64)
    Z = []
    labels = []
    for i in range(old_count):
        noise = rng.standard_normal((count_per_class, d))
        Z.append(protoset.protos[i] + r * noise)
        labels.extend([protoset.class_ids[i]] * count_per_class)
    return np.vstack(Z), np.array(labels, dtype=np.int64)


def select_confident(weak: np.ndarray, strong: np.ndarray, protoset: PrototypeSet, tau: float, gamma: float):
    """Confident pseudo-labeling on weak views.

    Keeps sample j iff max_i p_i(weak_j) > tau; its pseudo-label is the
    nearest prototype's class, paired with the strong view for training.
    Returns (strong_selected, pseudo_labels, mask).
    """
    if len(protoset) == 0:
        raise StateError("cannot pseudo-label with an empty prototype set")
    if weak.shape[0] == 0:
        return strong[:0], np.empty(0, dtype=np.int64), np.zeros(0, dtype=bool)
    logp = _log_probabilities(all_squared_distances(weak, protoset), gamma)
    mask = np.exp(logp.max(axis=1)) > tau
    yhat = predict(weak[mask], protoset) if mask.any() else np.empty(0, dtype=np.int64)
    return strong[mask], np.asarray(yhat, dtype=np.int64), mask


def unsupervised_loss(Zs: np.ndarray, yhat: np.ndarray, protoset: PrototypeSet, gamma: float) -> float:
    """Mean CE of (strong view, pseudo-label) pairs; 0 for an empty batch."""
    if Zs.shape[0] == 0:
        return 0.0
    from .classifier import ipc_loss

    return ipc_loss(Zs, yhat, protoset, ClassifierConfig(gamma=gamma, lambda_pl=0.0))


def sgd_step(protos: np.ndarray, velocity: np.ndarray, gradient: np.ndarray, lr: float, momentum: float):
    """v <- momentum*v - lr*g; protos <- protos + v."""
    if protos.shape != velocity.shape or protos.shape != gradient.shape:
        raise ConfigurationError("sgd_step shape mismatch")
    velocity = momentum * velocity - lr * gradient
    return protos + velocity, velocity


def cosine_lr(lr0: float, epoch: int, epochs: int) -> float:
    return lr0 * 0.5 * (1.0 + cos(pi * epoch / epochs))


def _task_streams(seed: int, task_index: int):
    make = lambda sid: np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(task_index, sid))
    )
    return make(0), make(1), make(2)  # resample, labeled-shuffle, unlabeled-shuffle


def train_task(state: TrainerState, task_data: TaskData, config: TrainConfig):
    """Run the full per-task optimization; returns (new state, TaskLog)."""
    if set(task_data.class_ids) & set(state.protoset.class_ids):
        raise ProtocolError(
            f"task {task_data.task_index} classes overlap previously seen classes"
        )
    t = state.task_index
    old_count = len(state.protoset)
    protoset = init_prototypes(task_data, state.protoset, use_iu=config.use_iu)

    if t == 0:
        if state.radial_scale is not None:
            raise StateError("radial scale already set before the first task")
        r = estimate_radial_scale(task_data.labeled.base, task_data.labels)
    else:
        r = state.radial_scale
        if r is None:
            raise StateError("radial scale missing after the first task")

    rng_resample, rng_labeled, rng_unlabeled = _task_streams(config.seed, t)
    cconf = config.classifier_config()
    uconf = ClassifierConfig(gamma=config.gamma, lambda_pl=0.0)

    labels_per_class = int(np.bincount(task_data.labels).max()) if len(task_data.labels) else 0
    n_resample = (
        config.resample_per_class
        if config.resample_per_class is not None
        else labels_per_class
    )
    velocity = np.zeros_like(protoset.protos)
    n_u = len(task_data.unlabeled)
    log = TaskLog(task_index=task_data.task_index)

    for epoch in range(config.epochs):
        lr = cosine_lr(config.lr0, epoch, config.epochs)

        sup_Z = task_data.labeled.base.astype(np.float64)
        sup_y = task_data.labels
        if config.use_resample and old_count > 0 and t > 0:
            Z_old, y_old = resample_old(
                protoset, r, n_resample, rng_resample, old_count=old_count
            )
            sup_Z = np.vstack([sup_Z, Z_old])
            sup_y = np.concatenate([sup_y, y_old])

        perm = rng_labeled.permutation(len(sup_Z))
        if config.use_pur and n_u > 0:
            uperm = rng_unlabeled.permutation(n_u)
        ucursor = 0

        for start in range(0, len(perm), config.batch_size):
            idx = perm[start : start + config.batch_size]
            grad = ipc_gradient(sup_Z[idx], sup_y[idx], protoset, cconf)

            if config.use_pur and n_u > 0:
                if ucursor + config.batch_size > n_u:
                    ucursor = 0
                uidx = uperm[ucursor : ucursor + config.batch_size]
                ucursor += config.batch_size
                strong_sel, yhat, mask = select_confident(
                    task_data.unlabeled.weak[uidx],
                    task_data.unlabeled.strong[uidx],
                    protoset,
                    config.tau,
                    config.gamma,
                )
                log.offered_total += len(uidx)
                log.selected_total += int(mask.sum())
                log.pseudo_pairs.extend(zip(uidx[mask].tolist(), yhat.tolist()))
                if len(strong_sel):
                    grad = grad + ipc_gradient(strong_sel, yhat, protoset, uconf)

            grad[: protoset.frozen_count] = 0.0
            protos, velocity = sgd_step(
                protoset.protos, velocity, grad, lr, config.momentum
            )
            velocity[: protoset.frozen_count] = 0.0
            protoset = PrototypeSet(protos, protoset.class_ids, protoset.frozen_count)

    final = PrototypeSet(
        protoset.protos,
        protoset.class_ids,
        frozen_count=len(protoset) if config.use_iu else 0,
    )
    new_state = replace(
        state,
        protoset=final,
        radial_scale=r if t == 0 else state.radial_scale,
        task_index=t + 1,
    )
    return new_state, log


def nme_prototypes(task_data: TaskData, protoset: PrototypeSet) -> PrototypeSet:
    """Baseline: class means only, no optimization."""
    return init_prototypes(task_data, protoset, use_iu=True)
