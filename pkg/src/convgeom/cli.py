"""Command-line interface.

Subcommands: sweep, synthetic, structural, geometry, bounds.  Exit status is
0 on success, 2 on a validation or load error, 3 when the bounds command
finds a violation.
"""
from __future__ import annotations

import argparse
import sys

from .errors import LoadError, ValidationError
from .gcn import TrainConfig
from .operators import FAMILIES, FAMILY_ROW_NORMALIZED, FAMILY_SYMMETRIC

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BOUND_VIOLATION = 3

_FAMILY_CHOICES = {"sym": (FAMILY_SYMMETRIC,), "row": (FAMILY_ROW_NORMALIZED,),
                   "both": FAMILIES}


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc


def _add_source_args(sub, required: bool = True):
    group = sub.add_mutually_exclusive_group(required=required)
    group.add_argument("--dataset", help="interchange dataset directory")
    group.add_argument("--scenario",
                       choices=("uniform", "degree_increasing", "degree_flipped"),
                       help="synthetic hub-periphery scenario")


def _add_train_args(sub, lr=0.02, epochs=200):
    sub.add_argument("--lr", type=float, default=lr)
    sub.add_argument("--epochs", type=int, default=epochs)
    sub.add_argument("--hidden", type=int, default=32)
    sub.add_argument("--weight-decay", type=float, default=0.0)
    sub.add_argument("--train-count", type=int, default=None,
                     help="train-split size when no split file exists "
                          "(default: 10%% of nodes)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convgeom",
        description="Graph-convolution sweeps and embedding-geometry diagnostics")
    subs = parser.add_subparsers(dest="command", required=True)

    sweep = subs.add_parser("sweep", help="accuracy sweep over the parameter grid")
    _add_source_args(sweep)
    sweep.add_argument("--family", choices=sorted(_FAMILY_CHOICES), default="both")
    sweep.add_argument("--alpha", type=_float_list,
                       default=tuple(round(0.1 * k, 1) for k in range(1, 11)))
    sweep.add_argument("--beta", type=_float_list, default=(0.0, 1.0))
    sweep.add_argument("--trials", type=int, default=30)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--workers", type=int, default=1)
    _add_train_args(sweep)
    sweep.add_argument("--out", required=True)

    synth = subs.add_parser("synthetic", help="noise-scenario accuracy trends")
    synth.add_argument("--scenario", required=True,
                       choices=("uniform", "degree_increasing", "degree_flipped"))
    synth.add_argument("--alpha", type=_float_list,
                       default=tuple(round(0.1 * k, 1) for k in range(1, 11)))
    synth.add_argument("--trials", type=int, default=50)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--workers", type=int, default=1)
    _add_train_args(synth, lr=0.02, epochs=150)
    synth.add_argument("--out", required=True)

    structural = subs.add_parser("structural", help="isomorphic-replica distances")
    structural.add_argument("--alpha", type=_float_list,
                            default=(0.1, 0.3, 0.5, 0.7, 0.9))
    structural.add_argument("--beta", type=float, default=1.0)
    structural.add_argument("--family", choices=sorted(_FAMILY_CHOICES),
                            default="both")
    structural.add_argument("--trials", type=int, default=100)
    structural.add_argument("--sigma", type=float, default=1.0)
    structural.add_argument("--seed", type=int, default=0)
    structural.add_argument("--out", required=True)

    geometry = subs.add_parser("geometry", help="embedding-geometry diagnostics")
    _add_source_args(geometry)
    geometry.add_argument("--family", choices=("sym", "row"), default="sym")
    geometry.add_argument("--alpha", type=float, default=0.5)
    geometry.add_argument("--beta", type=float, default=1.0)
    geometry.add_argument("--seed", type=int, default=0)
    geometry.add_argument("--kernel-eps", type=float, default=0.5)
    geometry.add_argument("--gw-subsample", type=int, default=300)
    geometry.add_argument("--max-analysis-nodes", type=int, default=1200)
    _add_train_args(geometry)
    geometry.add_argument("--out", required=True)

    bounds = subs.add_parser("bounds", help="verify the norm and noise bounds")
    bounds.add_argument("--graphs", type=int, default=50)
    bounds.add_argument("--max-nodes", type=int, default=30)
    bounds.add_argument("--alpha", type=_float_list,
                        default=(0.0, 0.25, 0.5, 0.75, 1.0))
    bounds.add_argument("--beta", type=_float_list, default=(0.0, 1.0, 2.0))
    bounds.add_argument("--draws", type=int, default=2000)
    bounds.add_argument("--templates", type=int, default=5)
    bounds.add_argument("--sigma", type=float, default=0.3)
    bounds.add_argument("--m-variant", default="conservative",
                        choices=("squared", "matched", "conservative"))
    bounds.add_argument("--seed", type=int, default=0)
    bounds.add_argument("--out", default=None)
    bounds.add_argument("--corrupt-bound", type=float, default=1.0,
                        help=argparse.SUPPRESS)  # self-test hook

    return parser


def _train_cfg(args, seed: int = 0) -> TrainConfig:
    return TrainConfig(lr=args.lr, epochs=args.epochs, hidden_dim=args.hidden,
                       seed=seed, weight_decay=args.weight_decay)


def main(argv=None) -> int:
    from . import experiments

    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            cfg = experiments.SweepConfig(
                out_dir=args.out, dataset_dir=args.dataset,
                scenario=args.scenario, families=_FAMILY_CHOICES[args.family],
                alpha_grid=args.alpha, beta_grid=args.beta, trials=args.trials,
                seed=args.seed, train_cfg=_train_cfg(args),
                train_count=args.train_count, workers=args.workers)
            experiments.run_sweep(cfg)
        elif args.command == "synthetic":
            experiments.run_synthetic(
                args.scenario, args.alpha, args.trials, args.seed, args.out,
                train_cfg=_train_cfg(args), train_count=args.train_count,
                workers=args.workers)
        elif args.command == "structural":
            experiments.run_structural(
                args.alpha, args.trials, args.seed, args.out, sigma=args.sigma,
                beta=args.beta, families=_FAMILY_CHOICES[args.family])
        elif args.command == "geometry":
            experiments.run_geometry(
                args.out, dataset_dir=args.dataset, scenario=args.scenario,
                family=_FAMILY_CHOICES[args.family][0], alpha=args.alpha,
                beta=args.beta, train_cfg=_train_cfg(args, args.seed),
                train_count=args.train_count, kernel_eps=args.kernel_eps,
                gw_subsample=args.gw_subsample,
                max_analysis_nodes=args.max_analysis_nodes, seed=args.seed)
        elif args.command == "bounds":
            report = experiments.run_bounds(
                out_dir=args.out, num_graphs=args.graphs,
                max_nodes=args.max_nodes, alpha_grid=args.alpha,
                beta_grid=args.beta, seed=args.seed, draws=args.draws,
                num_templates=args.templates, sigma=args.sigma,
                m_variant=args.m_variant, corrupt_factor=args.corrupt_bound)
            if report["total_violations"] > 0:
                print(f"bound violations found: {report['total_violations']}",
                      file=sys.stderr)
                return EXIT_BOUND_VIOLATION
    except (ValidationError, LoadError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
