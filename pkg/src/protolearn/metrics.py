"""Evaluation metrics: per-task accuracy, average/last accuracy, the
performance-dropping rate, and base/novel decompositions."""

import csv
import json
import os
import tempfile
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class MetricsReport:
    per_task_acc: tuple  # percent, one entry per task
    avg_acc: float
    last_acc: float
    pd: float  # first-task minus last-task accuracy
    base_avg: Optional[float] = None
    base_last: Optional[float] = None
    novel_avg: Optional[float] = None
    novel_last: Optional[float] = None
    pseudo_label_precision: Optional[float] = None

    def rounded(self, digits: int = 2) -> dict:
        out = {}
        for k, v in asdict(self).items():
            if v is None:
                out[k] = None
            elif isinstance(v, tuple):
                out[k] = [round(x, digits) for x in v]
            else:
                out[k] = round(v, digits)
        return out


def task_accuracy(predictions, true_labels) -> float:
    """Top-1 accuracy in percent."""
    pred = np.asarray(predictions)
    true = np.asarray(true_labels)
    if pred.shape != true.shape or pred.size == 0:
        raise InputError("predictions and labels must be nonempty and equal-length")
    return 100.0 * float((pred == true).mean())


def summarize(
    per_task_acc,
    base_per_task=None,
    novel_per_task=None,
    pseudo_label_precision: Optional[float] = None,
) -> MetricsReport:
    """Derive average/last accuracy and the performance drop.

    ``base_per_task``/``novel_per_task`` are optional per-task accuracies
    restricted to first-task vs. later classes (novel entries start at
    task 2).
    """
    acc = [float(a) for a in per_task_acc]
    if not acc:
        raise InputError("per_task_acc must be nonempty")
    base_avg = base_last = novel_avg = novel_last = None
    if base_per_task:
        base = [float(a) for a in base_per_task]
        base_avg, base_last = float(np.mean(base)), base[-1]
    if novel_per_task:
        novel = [float(a) for a in novel_per_task]
        novel_avg, novel_last = float(np.mean(novel)), novel[-1]
    return MetricsReport(
        per_task_acc=tuple(acc),
        avg_acc=float(np.mean(acc)),
        last_acc=acc[-1],
        pd=acc[0] - acc[-1],
        base_avg=base_avg,
        base_last=base_last,
        novel_avg=novel_avg,
        novel_last=novel_last,
        pseudo_label_precision=pseudo_label_precision,
    )


def _atomic_write(path, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report_json(report: MetricsReport, path, config: Optional[dict] = None, seed: Optional[int] = None, extra: Optional[dict] = None) -> None:
    doc = {"metrics": report.rounded(digits=6), "config": config, "seed": seed}
    if extra:
        doc.update(extra)
    _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_report_csv(report: MetricsReport, path, config_hash: str = "", seed: Optional[int] = None) -> None:
    rows = []
    for t, a in enumerate(report.per_task_acc, start=1):
        rows.append(
            {
                "task": t,
                "acc": f"{a:.2f}",
                "avg": f"{report.avg_acc:.2f}",
                "pd": f"{report.pd:.2f}",
                "base_acc": "" if report.base_last is None else f"{report.base_last:.2f}",
                "novel_acc": "" if report.novel_last is None else f"{report.novel_last:.2f}",
                "config_hash": config_hash,
                "seed": "" if seed is None else seed,
            }
        )
    import io

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    _atomic_write(path, buf.getvalue())
