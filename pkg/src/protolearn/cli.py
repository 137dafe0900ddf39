"""Command-line front end.

Subcommands: gen, run, inject-ood, analyze, sweep, report.
Exit codes: 0 success, 2 usage error, 3 data/format error, 4 protocol error.
"""

import argparse
import csv
import glob
import io
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .analysis import class_geometry, pc_id
from .classifier import PrototypeSet, predict
from .errors import (
    ConfigurationError,
    CorruptionError,
    FormatError,
    InputError,
    ProtoLearnError,
    ProtocolError,
)
from .experiment import (
    ExperimentConfig,
    aggregate_reports,
    config_hash,
    run_experiment,
)
from .fileio import read_embedding_file, write_embedding_file
from .metrics import MetricsReport, _atomic_write, task_accuracy
from .synthetic import PRESETS, generate_synthetic, make_ood_dataset, preset_config
from .trainer import TrainConfig

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_PROTOCOL = 4

_ABLATIONS = {
    "none": {},
    "no-pur": {"use_pur": False},
    "no-resample": {"use_resample": False},
    "no-iu": {"use_iu": False},
    "no-pl": {"use_pl": False},
}

_GRID_CAP = 64


def _oracle_accuracy(dataset) -> float:
    base, _, _ = dataset.stacked_views()
    labels = dataset.labels()
    classes = sorted(int(c) for c in dataset.class_set)
    means = np.stack([base[labels == c].mean(axis=0) for c in classes])
    protoset = PrototypeSet(means, tuple(classes))
    return task_accuracy(predict(base.astype(np.float64), protoset), labels)


def cmd_gen(args) -> int:
    cfg = preset_config(args.preset, seed=args.seed)
    dataset = generate_synthetic(cfg)
    write_embedding_file(dataset, args.out)
    print(
        f"wrote {args.out}: {len(dataset)} records, {len(dataset.class_set)} classes, "
        f"dim {dataset.dim}"
    )
    print(f"class-mean oracle accuracy: {_oracle_accuracy(dataset):.2f}%")
    return 0


def _experiment_config(args, **overrides) -> ExperimentConfig:
    doc = {}
    if getattr(args, "config", None):
        with open(args.config) as f:
            doc = json.load(f)
    train = doc.pop("train", {})
    for key in ("lr0", "momentum", "epochs", "batch_size", "tau", "gamma", "lambda_pl"):
        v = getattr(args, key, None)
        if v is not None:
            train[key] = v
    ablation = getattr(args, "ablation", None)
    if ablation:
        if ablation not in _ABLATIONS:
            raise ConfigurationError(
                f"unknown ablation '{ablation}'; choose from {', '.join(_ABLATIONS)}"
            )
        train.update(_ABLATIONS[ablation])
    for key in (
        "dataset_path", "preset", "gen_seed", "base_size", "num_tasks",
        "labels_per_class", "split_seed", "output_dir", "baseline",
    ):
        v = getattr(args, key, None)
        if v is not None:
            doc[key] = v
    if getattr(args, "seeds", None):
        doc["seeds"] = args.seeds
    doc.update(overrides)
    doc["train"] = train
    return ExperimentConfig.from_dict(doc)


def cmd_run(args) -> int:
    cfg = _experiment_config(args)
    run_experiment(cfg)
    return 0


def cmd_inject_ood(args) -> int:
    overrides = {"ood_fraction": args.fraction}
    if args.ood_file:
        overrides["ood_path"] = args.ood_file
    cfg = _experiment_config(args, **overrides)
    out = run_experiment(cfg)
    rate = out["aggregate"].get("ood_selection_rate_median")
    if rate is not None:
        print(f"median OOD selection rate: {100 * rate:.2f}%")
    return 0


def cmd_analyze(args) -> int:
    dataset = read_embedding_file(args.dataset)
    base, _, _ = dataset.stacked_views()
    labels = dataset.labels()
    labeled = labels >= 0

    spectrum = pc_id(base, threshold=args.threshold, normalize=not args.raw_covariance)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["k", "eigenvalue", "cumulative"])
    for k, (ev, p) in enumerate(zip(spectrum.eigenvalues, spectrum.cumulative), start=1):
        w.writerow([k, f"{ev:.10g}", f"{p:.10g}"])
    spath = os.path.join(args.out_dir, "spectrum.csv")
    os.makedirs(args.out_dir, exist_ok=True)
    _atomic_write(spath, buf.getvalue())
    print(f"pc_id={spectrum.pc_id} ({spath})")

    if labeled.sum() and len(set(labels[labeled])) >= 2:
        geo = class_geometry(base[labeled], labels[labeled])
        gbuf = io.StringIO()
        w = csv.writer(gbuf)
        w.writerow(["pi_inter", "pi_intra", "fsu_ratio", "degenerate"])
        w.writerow(
            [
                f"{geo.pi_inter:.10g}",
                f"{geo.pi_intra:.10g}",
                "" if geo.fsu_ratio is None else f"{geo.fsu_ratio:.10g}",
                int(geo.degenerate),
            ]
        )
        gpath = os.path.join(args.out_dir, "geometry.csv")
        _atomic_write(gpath, gbuf.getvalue())
        print(f"pi_inter={geo.pi_inter:.4f} pi_intra={geo.pi_intra:.4f} ({gpath})")
    else:
        print("warning: fewer than 2 labeled classes; geometry skipped", file=sys.stderr)
    return 0


def _parse_grid(values, cast):
    return [cast(v) for v in values.split(",")] if values else [None]


def cmd_sweep(args) -> int:
    lambdas = _parse_grid(args.lambda_grid, float)
    taus = _parse_grid(args.tau_grid, float)
    gammas = _parse_grid(args.gamma_grid, float)
    nls = _parse_grid(args.n_l_grid, int)
    if args.lambda_grid == "" or args.tau_grid == "" or args.gamma_grid == "" or args.n_l_grid == "":
        raise ConfigurationError("empty parameter grid")
    points = [
        (lam, tau, gam, nl)
        for lam in lambdas
        for tau in taus
        for gam in gammas
        for nl in nls
    ]
    if len(points) > _GRID_CAP:
        raise ConfigurationError(f"grid has {len(points)} points, cap is {_GRID_CAP}")

    base_cfg = _experiment_config(args)
    rows = []
    for lam, tau, gam, nl in points:
        train = base_cfg.train
        if lam is not None:
            train = replace(train, lambda_pl=lam)
        if tau is not None:
            train = replace(train, tau=tau)
        if gam is not None:
            train = replace(train, gamma=gam)
        cfg = replace(
            base_cfg,
            train=train,
            labels_per_class=nl if nl is not None else base_cfg.labels_per_class,
            output_dir=os.path.join(
                base_cfg.output_dir,
                f"lam{lam}_tau{tau}_gam{gam}_nl{nl}",
            ),
        )
        out = run_experiment(cfg)
        agg = out["aggregate"]
        rows.append(
            {
                "lambda_pl": lam if lam is not None else cfg.train.lambda_pl,
                "tau": tau if tau is not None else cfg.train.tau,
                "gamma": gam if gam is not None else cfg.train.gamma,
                "n_l": cfg.labels_per_class,
                "last_median": f"{agg['last_acc']['median']:.2f}",
                "avg_median": f"{agg['avg_acc']['median']:.2f}",
                "pd_median": f"{agg['pd']['median']:.2f}",
                "config_hash": agg["config_hash"],
            }
        )
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    w.writeheader()
    w.writerows(rows)
    os.makedirs(base_cfg.output_dir, exist_ok=True)
    path = os.path.join(base_cfg.output_dir, "sweep.csv")
    _atomic_write(path, buf.getvalue())
    print(f"wrote {path} ({len(rows)} grid points)")
    return 0


def cmd_report(args) -> int:
    paths = sorted(glob.glob(os.path.join(args.run_dir, "report_seed*.json")))
    if not paths:
        raise ConfigurationError(f"no report_seed*.json files in {args.run_dir}")
    reports = {}
    for p in paths:
        with open(p) as f:
            doc = json.load(f)
        m = doc["metrics"]
        reports[doc["seed"]] = MetricsReport(
            per_task_acc=tuple(m["per_task_acc"]),
            avg_acc=m["avg_acc"],
            last_acc=m["last_acc"],
            pd=m["pd"],
        )
    agg = aggregate_reports(reports)
    print(json.dumps(agg, indent=2, sort_keys=True))
    return 0


def _add_run_options(p, require_source=True):
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--dataset", dest="dataset_path", help="PCE1 embedding file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="synthetic preset")
    p.add_argument("--gen-seed", dest="gen_seed", type=int)
    p.add_argument("--base-size", dest="base_size", type=int, help="classes in task 1 (B)")
    p.add_argument("--num-tasks", dest="num_tasks", type=int, help="task count (T)")
    p.add_argument("--n-l", dest="labels_per_class", type=int, help="labeled samples per class")
    p.add_argument("--split-seed", dest="split_seed", type=int)
    p.add_argument("--seeds", type=int, nargs="+", help="training seeds to repeat over")
    p.add_argument("--out", dest="output_dir", help="output directory")
    p.add_argument("--baseline", choices=["nme"], help="skip training, class means only")
    p.add_argument("--ablation", choices=sorted(_ABLATIONS), help="component to disable")
    for key, cast in (
        ("lr0", float), ("momentum", float), ("epochs", int), ("batch_size", int),
        ("tau", float), ("gamma", float), ("lambda_pl", float),
    ):
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=cast)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="protolearn",
        description="Semi-supervised incremental prototype classifier experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic PCE1 embedding file")
    p.add_argument("--preset", required=True, choices=sorted(PRESETS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="full incremental run over all seeds")
    _add_run_options(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("inject-ood", help="run with OOD data mixed into unlabeled pools")
    _add_run_options(p)
    p.add_argument("--fraction", type=float, required=True, help="OOD share of the pool")
    p.add_argument("--ood-file", help="PCE1 file of OOD records (default: calibrated fixture)")
    p.set_defaults(func=cmd_inject_ood)

    p = sub.add_parser("analyze", help="feature-space diagnostics of a PCE1 file")
    p.add_argument("dataset")
    p.add_argument("--out-dir", default="analysis")
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument(
        "--raw-covariance",
        action="store_true",
        help="skip unit normalization before the covariance",
    )
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="grid sweep over lambda/tau/gamma/n_l")
    _add_run_options(p)
    p.add_argument("--lambda-grid", dest="lambda_grid", help="comma-separated values")
    p.add_argument("--tau-grid", dest="tau_grid", help="comma-separated values")
    p.add_argument("--gamma-grid", dest="gamma_grid", help="comma-separated values")
    p.add_argument("--n-l-grid", dest="n_l_grid", help="comma-separated values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="re-aggregate per-seed reports in a run directory")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, CorruptionError, InputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except ProtocolError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PROTOCOL
    except ProtoLearnError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
