"""End-to-end experiment orchestration: split, train per task, evaluate,
aggregate over seeds, and emit JSON/CSV reports."""

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .classifier import PrototypeSet, empty_prototype_set, predict
from .data import Dataset, SplitPlan, TaskData, ViewBatch
from .errors import ConfigurationError
from .fileio import read_embedding_file
from .metrics import (
    MetricsReport,
    summarize,
    task_accuracy,
    write_report_csv,
    write_report_json,
    _atomic_write,
)
from .splits import split_dataset
from .synthetic import generate_synthetic, make_ood_dataset, preset_config
from .trainer import TaskLog, TrainConfig, TrainerState, nme_prototypes, select_confident, train_task

OOD_DIAG_LABEL = -1


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a dataset source, a split protocol, training
    hyperparameters, and a list of seeds to repeat over."""

    dataset_path: Optional[str] = None
    preset: Optional[str] = None
    gen_seed: int = 0
    base_size: int = 0
    num_tasks: int = 5
    labels_per_class: int = 5
    split_seed: int = 0
    class_order: Optional[tuple] = None
    train: TrainConfig = field(default_factory=TrainConfig)
    seeds: tuple = (0, 1, 2, 3, 4)
    ood_fraction: float = 0.0
    ood_path: Optional[str] = None
    baseline: Optional[str] = None  # "nme" freezes prototypes at class means
    output_dir: str = "runs"

    def __post_init__(self):
        if (self.dataset_path is None) == (self.preset is None):
            raise ConfigurationError("exactly one of dataset_path/preset is required")
        if not 0 <= self.ood_fraction < 1:
            raise ConfigurationError("ood_fraction must be in [0, 1)")
        if self.baseline not in (None, "nme"):
            raise ConfigurationError(f"unknown baseline '{self.baseline}'")

    def to_dict(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["train"] = dataclasses.asdict(self.train)
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        train = doc.pop("train", {})
        if doc.get("class_order") is not None:
            doc["class_order"] = tuple(doc["class_order"])
        doc["seeds"] = tuple(doc.get("seeds", (0, 1, 2, 3, 4)))
        return ExperimentConfig(train=TrainConfig(**train), **doc)


def config_hash(cfg: ExperimentConfig) -> str:
    blob = json.dumps(cfg.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.dataset_path is not None:
        return read_embedding_file(cfg.dataset_path)
    return generate_synthetic(preset_config(cfg.preset, seed=cfg.gen_seed))


def inject_ood(tasks, ood: Dataset, fraction: float, seed: int):
    """Mix OOD records into each task's unlabeled pool.

    After injection the OOD records make up ``fraction`` of the pool. Their
    labels are stripped; the diagnostic label is set to -1 so selection
    statistics can tell them apart.
    """
    if fraction == 0.0:
        return tasks
    rng = np.random.default_rng(seed)
    ood_base, ood_weak, ood_strong = ood.stacked_views()
    pool = np.arange(len(ood))
    out = []
    for task in tasks:
        n_u = len(task.unlabeled)
        n_ood = int(round(fraction * n_u / (1.0 - fraction)))
        if n_ood > len(pool):
            raise ConfigurationError(
                f"OOD source too small: task {task.task_index} needs {n_ood} records"
            )
        take = rng.choice(len(pool), size=n_ood, replace=False)
        out.append(
            TaskData(
                task_index=task.task_index,
                class_ids=task.class_ids,
                labeled=task.labeled,
                labels=task.labels,
                unlabeled=ViewBatch(
                    np.vstack([task.unlabeled.base, ood_base[take]]),
                    np.vstack([task.unlabeled.weak, ood_weak[take]]),
                    np.vstack([task.unlabeled.strong, ood_strong[take]]),
                ),
                unlabeled_diag_labels=np.concatenate(
                    [
                        task.unlabeled_diag_labels,
                        np.full(n_ood, OOD_DIAG_LABEL, dtype=np.int64),
                    ]
                ),
            )
        )
    return out


@dataclass
class RunResult:
    report: MetricsReport
    per_task_acc: list
    protoset: PrototypeSet
    ood_selection_rate: Optional[float] = None
    selection_rate: float = 0.0


def _eval_arrays(dataset: Dataset):
    base, _, _ = dataset.stacked_views()
    return base.astype(np.float64), dataset.labels()


def _pseudo_precision(logs, tasks) -> Optional[float]:
    correct = total = 0
    for log, task in zip(logs, tasks):
        diag = task.unlabeled_diag_labels
        for idx, yhat in log.pseudo_pairs:
            total += 1
            if diag[idx] != OOD_DIAG_LABEL and diag[idx] == yhat:
                correct += 1
    return correct / total if total else None


def _ood_selection_rate(tasks, states, train_cfg: TrainConfig) -> Optional[float]:
    """Whole-pool selection rate of OOD records, per task with that task's
    final prototypes (a brute-force measurement independent of batching)."""
    sel = tot = 0
    for task, protoset in zip(tasks, states):
        mask_ood = task.unlabeled_diag_labels == OOD_DIAG_LABEL
        if not mask_ood.any():
            continue
        _, _, kept = select_confident(
            task.unlabeled.weak, task.unlabeled.strong, protoset,
            train_cfg.tau, train_cfg.gamma,
        )
        sel += int((kept & mask_ood).sum())
        tot += int(mask_ood.sum())
    return sel / tot if tot else None


def run_single(
    dataset: Dataset,
    plan: SplitPlan,
    train_cfg: TrainConfig,
    baseline: Optional[str] = None,
    ood: Optional[Dataset] = None,
    ood_fraction: float = 0.0,
) -> RunResult:
    """One full incremental run: returns metrics and the final prototypes.

    Evaluation after each task scores all dataset records of the classes
    seen so far on their base view.
    """
    tasks = split_dataset(dataset, plan)
    if ood is not None and ood_fraction > 0:
        if dataset.class_set & ood.class_set:
            raise ConfigurationError("OOD classes overlap the dataset's classes")
        tasks = inject_ood(tasks, ood, ood_fraction, seed=train_cfg.seed)

    eval_base, eval_labels = _eval_arrays(dataset)
    base_classes = set(tasks[0].class_ids)

    state = TrainerState(empty_prototype_set(dataset.dim), seed=train_cfg.seed)
    logs, protos_after = [], []
    per_task, base_acc, novel_acc = [], [], []
    seen = set()
    for task in tasks:
        if baseline == "nme":
            state = replace(
                state,
                protoset=nme_prototypes(task, state.protoset),
                task_index=state.task_index + 1,
            )
            logs.append(TaskLog(task_index=task.task_index))
        else:
            state, log = train_task(state, task, train_cfg)
            logs.append(log)
        protos_after.append(state.protoset)
        seen |= set(task.class_ids)

        mask = np.isin(eval_labels, sorted(seen))
        preds = predict(eval_base[mask], state.protoset)
        truth = eval_labels[mask]
        per_task.append(task_accuracy(preds, truth))
        in_base = np.isin(truth, sorted(base_classes))
        base_acc.append(task_accuracy(preds[in_base], truth[in_base]))
        if (~in_base).any():
            novel_acc.append(task_accuracy(preds[~in_base], truth[~in_base]))

    report = summarize(
        per_task,
        base_per_task=base_acc,
        novel_per_task=novel_acc or None,
        pseudo_label_precision=_pseudo_precision(logs, tasks),
    )
    offered = sum(l.offered_total for l in logs)
    selected = sum(l.selected_total for l in logs)
    return RunResult(
        report=report,
        per_task_acc=per_task,
        protoset=state.protoset,
        ood_selection_rate=_ood_selection_rate(tasks, protos_after, train_cfg),
        selection_rate=selected / offered if offered else 0.0,
    )


def _resolve_ood(cfg: ExperimentConfig, dataset: Dataset) -> Optional[Dataset]:
    if cfg.ood_fraction == 0.0:
        return None
    if cfg.ood_path is not None:
        return read_embedding_file(cfg.ood_path)
    # default calibrated far-cluster fixture derived from the dataset
    return make_ood_dataset(
        dataset, num_clusters=5, samples_per_cluster=200, seed=cfg.gen_seed + 9000
    )


def run_experiment(cfg: ExperimentConfig, log=print) -> dict:
    """Run all seeds, write one report pair per seed plus an aggregate."""
    dataset = load_dataset(cfg)
    ood = _resolve_ood(cfg, dataset)
    if ood is not None and (dataset.class_set & ood.class_set):
        raise ConfigurationError("OOD classes overlap the dataset's classes")
    os.makedirs(cfg.output_dir, exist_ok=True)
    chash = config_hash(cfg)
    log(f"config {chash}: {json.dumps(cfg.to_dict(), sort_keys=True)}")

    results = {}
    for seed in cfg.seeds:
        plan = SplitPlan(
            base_size=cfg.base_size,
            num_tasks=cfg.num_tasks,
            labels_per_class=cfg.labels_per_class,
            seed=cfg.split_seed,
            class_order=cfg.class_order,
        )
        train_cfg = replace(cfg.train, seed=seed)
        res = run_single(
            dataset, plan, train_cfg,
            baseline=cfg.baseline, ood=ood, ood_fraction=cfg.ood_fraction,
        )
        results[seed] = res
        stem = os.path.join(cfg.output_dir, f"report_seed{seed}")
        write_report_json(
            res.report,
            stem + ".json",
            config=cfg.to_dict(),
            seed=seed,
            extra={
                "config_hash": chash,
                "ood_selection_rate": res.ood_selection_rate,
                "selection_rate": res.selection_rate,
            },
        )
        write_report_csv(res.report, stem + ".csv", config_hash=chash, seed=seed)
        log(
            f"seed {seed}: last={res.report.last_acc:.2f} avg={res.report.avg_acc:.2f} "
            f"pd={res.report.pd:.2f}"
        )

    agg = aggregate_reports({s: r.report for s, r in results.items()})
    agg["config_hash"] = chash
    agg["config"] = cfg.to_dict()
    rates = [r.ood_selection_rate for r in results.values() if r.ood_selection_rate is not None]
    agg["ood_selection_rate_median"] = float(np.median(rates)) if rates else None
    _atomic_write(
        os.path.join(cfg.output_dir, "aggregate.json"),
        json.dumps(agg, indent=2, sort_keys=True) + "\n",
    )
    log(
        f"aggregate: last median={agg['last_acc']['median']:.2f} "
        f"[{agg['last_acc']['min']:.2f}, {agg['last_acc']['max']:.2f}]"
    )
    return {"results": results, "aggregate": agg}


def aggregate_reports(reports: dict) -> dict:
    """Median/min/max over seeds for the headline metrics."""
    def stats(values):
        return {
            "median": float(np.median(values)),
            "min": float(np.min(values)),
            "max": float(np.max(values)),
        }

    return {
        "seeds": sorted(reports),
        "last_acc": stats([r.last_acc for r in reports.values()]),
        "avg_acc": stats([r.avg_acc for r in reports.values()]),
        "pd": stats([r.pd for r in reports.values()]),
    }
