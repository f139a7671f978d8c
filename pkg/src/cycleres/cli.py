"""Command-line benchmark harness.

Subcommands:
  run         one experiment from a JSON config file
  bench       the desk-scale model x task suite
  export-dot  DOT topology graph from a saved artifact
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from . import artifacts, datasets, harness
from .errors import CycleresError
from .kernels import backend_name

log = logging.getLogger(__name__)


def fixture_path() -> str:
    """Path of the packaged synthetic sunspot fixture (SIDC layout)."""
    return os.path.join(os.path.dirname(__file__), "data", "mstsn_fixture.csv")


def _add_common(p):
    p.add_argument("--out", default=None, help="output directory (default: ./runs/<name>)")
    p.add_argument("--seed", type=int, default=None, help="seed base override")
    p.add_argument("--trials", type=int, default=None, help="trial count override")
    p.add_argument("--mstsn", default=None, help="path to an SIDC smoothed-sunspot CSV")
    p.add_argument("--workers", type=int, default=None, help="parallel fitness evaluations")
    p.add_argument("--quiet", action="store_true", help="suppress progress logging")


def _run_one(cfg, out_dir) -> int:
    report = harness.run_experiment(cfg)
    paths = artifacts.write_outputs(report, out_dir)
    artifacts.export_topology_dot(report.best.genotype, os.path.join(out_dir, "topology.dot"))
    print(artifacts.SUMMARY_HEADER)
    print(artifacts.summary_row(report))
    print(f"artifacts in {out_dir} ({len(paths) + 1} files)")
    return 0


def cmd_run(args) -> int:
    cfg = harness.ExperimentConfig.from_file(
        args.config, seed=args.seed, trials=args.trials,
        mstsn_path=args.mstsn, workers=args.workers)
    out_dir = args.out or os.path.join("runs", f"{cfg.model}-{cfg.task}-{cfg.signs}")
    return _run_one(cfg, out_dir)


def cmd_bench(args) -> int:
    if not args.all:
        print("error: pass --all to run the suite (narrow it with --tasks)", file=sys.stderr)
        return 2
    tasks = [t.strip() for t in args.tasks.split(",") if t.strip()]
    mstsn = args.mstsn or fixture_path()
    out_dir = args.out or os.path.join("runs", "bench")
    os.makedirs(out_dir, exist_ok=True)
    reports = []
    for task in tasks:
        for model in harness.MODELS:
            cfg = harness.ExperimentConfig(
                task=task, model=model, signs=args.signs, activation=args.activation,
                k=args.k, n=args.n,
                swarm=None if model == harness.SCR else args.budget,
                iterations=None if model == harness.SCR else args.budget,
                ga_population=args.budget, ga_generations=args.budget,
                trials=args.trials if args.trials is not None else 3,
                seed=0 if args.seed is None else args.seed,
                mstsn_path=mstsn if task == datasets.MSTSN else None,
                workers=args.workers or 1)
            log.info("bench: %s on %s", model, task)
            report = harness.run_experiment(cfg)
            reports.append(report)
            artifacts.write_outputs(report, os.path.join(out_dir, f"{model}-{task}"))
    summary = os.path.join(out_dir, "summary.tsv")
    artifacts.write_summary(reports, summary)
    with open(summary, encoding="utf-8") as fh:
        print(fh.read(), end="")
    return 0


def cmd_export_dot(args) -> int:
    art = artifacts.load_artifact(args.artifact)
    out = args.out or os.path.splitext(args.artifact)[0] + ".dot"
    artifacts.export_topology_dot(art.genotype, out)
    print(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cycleres",
                                     description="cycle-reservoir benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a JSON config")
    p_run.add_argument("--config", required=True, help="JSON file with ExperimentConfig fields")
    _add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", help="desk-scale suite across models")
    p_bench.add_argument("--all", action="store_true", help="run every model on every task")
    p_bench.add_argument("--tasks", default="mg17,narma10,mstsn")
    p_bench.add_argument("--signs", default="bernoulli", choices=["pi", "bernoulli"])
    p_bench.add_argument("--activation", default="tanh", choices=["identity", "tanh"])
    p_bench.add_argument("--budget", type=int, default=30,
                         help="swarm size and iteration count for the searches")
    p_bench.add_argument("--k", type=int, default=10, help="network order")
    p_bench.add_argument("--n", type=int, default=None,
                         help="ring size for every model (default: per-model)")
    _add_common(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_dot = sub.add_parser("export-dot", help="write a DOT graph from an artifact")
    p_dot.add_argument("--artifact", required=True)
    p_dot.add_argument("--out", default=None)
    p_dot.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if getattr(args, "quiet", False) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    log.info("kernel backend: %s", backend_name())
    try:
        return args.func(args)
    except (CycleresError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
