"""How much supervision does the method actually need?

Sweeps the number of labeled samples per class (the rest of each class
stays in the unlabeled pool) and reports median last-task accuracy over
seeds, with and without the pseudo-labeling component. The gap between the
two columns is what the unlabeled data buys at each budget.

Run:  python3 demos/demo_label_budget_sweep.py
"""

from dataclasses import replace

import numpy as np

from protolearn import SplitPlan, TrainConfig, generate_synthetic, preset_config
from protolearn.experiment import run_single

BUDGETS = (1, 2, 5, 10, 25)
SEEDS = range(5)


def median_last(labels_per_class, use_pur):
    accs = []
    for seed in SEEDS:
        dataset = generate_synthetic(preset_config("sep2.0-noise0.5", seed=seed))
        plan = SplitPlan(base_size=0, num_tasks=5, labels_per_class=labels_per_class, seed=seed)
        config = TrainConfig(epochs=20, batch_size=32, seed=seed, use_pur=use_pur)
        accs.append(run_single(dataset, plan, config).report.last_acc)
    return float(np.median(accs))


def main():
    print(f"{'n_l':>4} | {'with pseudo-labels':>19} | {'labels only':>12}")
    print("-" * 42)
    for n_l in BUDGETS:
        full = median_last(n_l, use_pur=True)
        labeled_only = median_last(n_l, use_pur=False)
        print(f"{n_l:>4} | {full:>18.2f}% | {labeled_only:>11.2f}%")


if __name__ == "__main__":
    main()
