"""Experiment orchestration: model recipes, trials, result files.

Five model recipes are supported. `scr` tunes the input scaling of a single
large ring; `deep-scr` and `grouped-scr` tune scalings (s, H) over the fixed
chain/grouped wirings; `mscr-ga` searches the wiring bits with fixed
scalings; `mscr-pso` searches everything. Bernoulli-mode runs average over
independent trials (fresh signs, fresh NARMA draw, fresh optimizer seed per
trial); pi mode is fully deterministic and runs a single trial.
"""
from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass

import numpy as np

from . import datasets, topology
from .datasets import SplitSeries, TaskSpec, make_task
from .errors import ConfigError, NonFiniteState
from .optimize import (
    GaConfig,
    GenotypeLayout,
    PsoConfig,
    ga_optimize,
    pso_minimize,
    pso_optimize,
    evaluate_on_test,
)
from .readout import ReadoutWeights
from .reservoir import Activation, BuildContext, MSCRGenotype
from .signs import BERNOULLI_MODE, PI_MODE

log = logging.getLogger(__name__)

SCR = "scr"
DEEP_SCR = "deep-scr"
GROUPED_SCR = "grouped-scr"
MSCR_GA = "mscr-ga"
MSCR_PSO = "mscr-pso"
MODELS = (SCR, DEEP_SCR, GROUPED_SCR, MSCR_GA, MSCR_PSO)

# Per-trial RNG stream ids (hashed together with seed base and trial index).
_STREAM_SIGNS, _STREAM_NARMA, _STREAM_PSO, _STREAM_GA = 0, 1, 2, 3


def trial_seed(base: int, trial: int, stream: int) -> int:
    return int(np.random.SeedSequence((base, trial, stream)).generate_state(1, np.uint64)[0])


@dataclass
class ExperimentConfig:
    task: str
    model: str
    signs: str = BERNOULLI_MODE
    activation: str = "tanh"
    k: int = 10
    n: int = None               # default: 1000 for scr, 100 otherwise
    rho: float = 0.95
    ridge_lambda: float = 1e-4
    swarm: int = None           # default: 20 for scr's 1-dim search, 100 otherwise
    iterations: int = None
    ga_population: int = 100
    ga_generations: int = 100
    trials: int = None          # default: 10 for bernoulli, always 1 for pi
    seed: int = 0
    bias: bool = True
    bias_scale: float = 1e-5
    mstsn_path: str = None
    normalize: bool = None      # default: unit interval for mg17/mstsn, raw narma10
    workers: int = 1

    def __post_init__(self):
        self.model = self.model.strip().lower().replace("_", "-")
        self.task = self.task.strip().lower()
        self.signs = self.signs.strip().lower()
        self.activation = self.activation.strip().lower()
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.task not in (datasets.MG17, datasets.NARMA10, datasets.MSTSN):
            raise ConfigError(f"unknown task {self.task!r}")
        if self.signs not in (PI_MODE, BERNOULLI_MODE):
            raise ConfigError(f"signs must be pi or bernoulli, got {self.signs!r}")
        if self.activation not in ("identity", "tanh"):
            raise ConfigError(f"activation must be identity or tanh, got {self.activation!r}")
        if self.task == datasets.MSTSN and not self.mstsn_path:
            raise ConfigError("mstsn task requires mstsn_path")
        if self.n is None:
            self.n = 1000 if self.model == SCR else 100
        if self.swarm is None:
            self.swarm = 20 if self.model == SCR else 100
        if self.iterations is None:
            self.iterations = 20 if self.model == SCR else 100
        if self.signs == PI_MODE:
            if self.trials not in (None, 1):
                log.info("pi mode is deterministic; forcing trials=1")
            self.trials = 1
        elif self.trials is None:
            self.trials = 10
        if self.normalize is None:
            # Experiments run the series scaled to [0, 1]; NARMA-10 stays raw
            # because its input is the external drive, already in [0, 0.5].
            self.normalize = self.task != datasets.NARMA10
        for name in ("k", "n", "trials", "swarm", "iterations", "ga_population",
                     "ga_generations", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0.0 < self.rho < 1.0:
            raise ConfigError("rho must lie strictly in (0, 1)")

    @property
    def activation_enum(self) -> Activation:
        return Activation.parse(self.activation)

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        raw.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class TrialResult:
    genotype: MSCRGenotype
    validation_fitness: float
    test_rmse: float
    predictions: np.ndarray
    targets: np.ndarray
    trace: np.ndarray
    weights: ReadoutWeights
    report: topology.TopologyReport
    sign_seed: object
    narma_seed: object


@dataclass
class RunReport:
    config: ExperimentConfig
    trials: list            # TrialResult, one per trial
    mean_rmse: float
    std_rmse: float
    divergent_trials: int
    best_trial: int          # index, by validation fitness
    seconds: float

    @property
    def best(self) -> TrialResult:
        return self.trials[self.best_trial]

    @property
    def effective_dim(self) -> int:
        return self.best.report.rank * self.config.n


def _build_context(cfg: ExperimentConfig, sign_seed) -> BuildContext:
    return BuildContext(n=cfg.n, rho=cfg.rho, activation=cfg.activation_enum,
                        sign_mode=cfg.signs, sign_seed=sign_seed,
                        bias_enabled=cfg.bias, bias_scale=cfg.bias_scale)


def _task_spec(cfg: ExperimentConfig, narma_seed) -> TaskSpec:
    return TaskSpec(name=cfg.task, seed=narma_seed, mstsn_path=cfg.mstsn_path,
                    normalize=cfg.normalize)


def _fixed_scaling_decoder(layout: GenotypeLayout, kind: str):
    k = layout.k
    d, a = topology.fixed_topology(kind, k)
    mask = ~np.eye(k, dtype=bool)

    def decode(position: np.ndarray) -> MSCRGenotype:
        h = np.zeros((k, k))
        h[mask] = position[k:]
        return MSCRGenotype(k=k, s=position[:k].copy(), H=h, d=d.copy(), A=a.copy())

    return decode, k * k


def _optimize_trial(cfg: ExperimentConfig, task: SplitSeries, ctx: BuildContext,
                    pso_seed, ga_seed):
    """Dispatch the model recipe; returns (genotype, validation fitness, trace)."""
    from .optimize import validation_fitness  # local alias for recipe closures

    pso_cfg = PsoConfig(swarm=cfg.swarm, iterations=cfg.iterations,
                        seed=pso_seed, workers=cfg.workers)
    layout = GenotypeLayout(cfg.k)
    lam = cfg.ridge_lambda

    if cfg.model == MSCR_PSO:
        return pso_optimize(task, layout, pso_cfg, ctx, lam)
    if cfg.model == MSCR_GA:
        ga_cfg = GaConfig(population=cfg.ga_population, generations=cfg.ga_generations,
                          seed=ga_seed, workers=cfg.workers)
        return ga_optimize(task, layout, ga_cfg, ctx, lam)
    if cfg.model == SCR:
        one = GenotypeLayout(1)

        def decode(position):
            g = one.decode(np.array([position[0], 1.0]))  # d forced on
            return g

        result = pso_minimize(lambda p: validation_fitness(decode(p), task, ctx, lam),
                              1, pso_cfg)
        return decode(result.position), result.fitness, result.trace

    kind = topology.CHAIN if cfg.model == DEEP_SCR else topology.GROUPED
    decode, dim = _fixed_scaling_decoder(layout, kind)
    result = pso_minimize(lambda p: validation_fitness(decode(p), task, ctx, lam),
                          dim, pso_cfg)
    return decode(result.position), result.fitness, result.trace


def run_experiment(cfg: ExperimentConfig) -> RunReport:
    """Run all trials of one configuration and aggregate."""
    started = time.perf_counter()
    trials = []
    for trial in range(cfg.trials):
        sign_seed = None
        narma_seed = trial_seed(cfg.seed, trial, _STREAM_NARMA) if cfg.task == datasets.NARMA10 else None
        if cfg.signs == BERNOULLI_MODE:
            sign_seed = trial_seed(cfg.seed, trial, _STREAM_SIGNS)
        task = make_task(_task_spec(cfg, narma_seed))
        ctx = _build_context(cfg, sign_seed)
        genotype, val_fit, trace = _optimize_trial(
            cfg, task, ctx,
            pso_seed=trial_seed(cfg.seed, trial, _STREAM_PSO),
            ga_seed=trial_seed(cfg.seed, trial, _STREAM_GA),
        )
        try:
            weights, test_rmse, predictions, system = evaluate_on_test(
                genotype, task, ctx, cfg.ridge_lambda)
            report = system.report
        except NonFiniteState:
            weights, test_rmse, predictions = None, float("inf"), np.full(
                task.test.stop - task.test.start, np.nan)
            report, _ = topology.analyze(genotype.A, genotype.d)
        trials.append(TrialResult(
            genotype=genotype, validation_fitness=val_fit, test_rmse=test_rmse,
            predictions=predictions, targets=np.asarray(task.targets[task.test]),
            trace=np.asarray(trace), weights=weights, report=report,
            sign_seed=sign_seed, narma_seed=narma_seed))
        log.info("%s/%s trial %d/%d: validation %.6g, test RMSE %.6g",
                 cfg.model, cfg.task, trial + 1, cfg.trials, val_fit, test_rmse)

    finite = [t.test_rmse for t in trials if np.isfinite(t.test_rmse)]
    divergent = len(trials) - len(finite)
    mean = float(np.mean(finite)) if finite else float("nan")
    std = float(np.std(finite, ddof=1)) if len(finite) > 1 else 0.0
    best = int(np.argmin([t.validation_fitness for t in trials]))
    return RunReport(config=cfg, trials=trials, mean_rmse=mean, std_rmse=std,
                     divergent_trials=divergent, best_trial=best,
                     seconds=time.perf_counter() - started)
