"""Calibration sweep for the shipped synthetic preset.

Measures, across seeds: the brute-force class-mean oracle accuracy, the
NME baseline, the full method, and the no-PUR ablation, plus OOD
selection rates. Used to pin the thresholds asserted by the test suite.
"""

import sys
from dataclasses import replace

import numpy as np

from protolearn import (
    PrototypeSet,
    SplitPlan,
    TrainConfig,
    generate_synthetic,
    make_ood_dataset,
    predict,
    preset_config,
    task_accuracy,
)
from protolearn.experiment import run_single


def oracle_accuracy(dataset):
    base, _, _ = dataset.stacked_views()
    labels = dataset.labels()
    classes = sorted(int(c) for c in dataset.class_set)
    means = np.stack([base[labels == c].mean(axis=0) for c in classes])
    protoset = PrototypeSet(means, tuple(classes))
    return task_accuracy(predict(base.astype(np.float64), protoset), labels)


def main():
    epochs = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    train = TrainConfig(epochs=epochs, batch_size=32)
    rows = []
    for seed in range(5):
        cfg = preset_config("sep2.0-noise0.5", seed=seed)
        dataset = generate_synthetic(cfg)
        plan = SplitPlan(base_size=0, num_tasks=5, labels_per_class=5, seed=seed)
        tc = replace(train, seed=seed)

        full = run_single(dataset, plan, tc)
        nopur = run_single(dataset, plan, replace(tc, use_pur=False))
        nme = run_single(dataset, plan, tc, baseline="nme")
        ood = make_ood_dataset(dataset, 5, 200, seed=seed + 9000)
        oodrun = run_single(dataset, plan, tc, ood=ood, ood_fraction=0.2)

        rows.append(
            dict(
                seed=seed,
                oracle=oracle_accuracy(dataset),
                full=full.report.last_acc,
                nopur=nopur.report.last_acc,
                nme=nme.report.last_acc,
                ood_last=oodrun.report.last_acc,
                ood_rate=oodrun.ood_selection_rate,
                precision=full.report.pseudo_label_precision,
            )
        )
        r = rows[-1]
        print(
            f"seed {seed}: oracle={r['oracle']:.2f} full={r['full']:.2f} "
            f"nopur={r['nopur']:.2f} nme={r['nme']:.2f} ood_last={r['ood_last']:.2f} "
            f"ood_rate={100 * r['ood_rate']:.2f}% precision={r['precision']:.3f}"
        )

    med = lambda k: float(np.median([r[k] for r in rows]))
    print(
        f"\nmedians: oracle={med('oracle'):.2f} full={med('full'):.2f} "
        f"nopur={med('nopur'):.2f} nme={med('nme'):.2f} "
        f"ood_drop={med('full') - med('ood_last'):.2f}"
    )


if __name__ == "__main__":
    main()
