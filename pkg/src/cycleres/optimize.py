"""Search over reservoir-network genotypes.

PSO runs on the flattened genotype vector: the input scalings s and edge
gains H are used as-is, while the attachment bits d and wiring bits A are
read off the particle position by sign (positive -> 1, else 0). The GA
baseline searches only the d/A bitstring with fixed scalings.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .datasets import SplitSeries
from .errors import NonFiniteInput, NonFiniteState, SingularSystem
from .readout import RidgeConfig, fit, predict, rmse
from .reservoir import BuildContext, MSCRGenotype, build_system


@dataclass
class GenotypeLayout:
    """Position-vector layout: s | H off-diagonal | d | A off-diagonal.

    Off-diagonal blocks are row-major over the k x k matrices, so the total
    dimension is 2k^2. Decoding forces zero diagonals by construction and
    binarizes d and A with the sign rule (exact zero maps to 0).
    """

    k: int

    @property
    def dim(self) -> int:
        return 2 * self.k * self.k

    @property
    def bit_dim(self) -> int:
        return self.k * self.k  # d followed by A off-diagonal

    def _offdiag(self, flat: np.ndarray) -> np.ndarray:
        k = self.k
        m = np.zeros((k, k), dtype=flat.dtype)
        mask = ~np.eye(k, dtype=bool)
        m[mask] = flat
        return m

    def decode(self, position: np.ndarray) -> MSCRGenotype:
        k = self.k
        pos = np.asarray(position, dtype=np.float64)
        if pos.shape != (self.dim,):
            raise ValueError(f"position must have length {self.dim}")
        off = k * k - k
        s = pos[:k].copy()
        h = self._offdiag(pos[k : k + off])
        d = (pos[k + off : 2 * k + off] > 0).astype(np.uint8)
        a = self._offdiag((pos[2 * k + off :] > 0).astype(np.uint8))
        return MSCRGenotype(k=k, s=s, H=h, d=d, A=a)

    def encode(self, genotype: MSCRGenotype) -> np.ndarray:
        """Inverse of decode up to binarization (bits map to ±1)."""
        k = self.k
        mask = ~np.eye(k, dtype=bool)
        return np.concatenate([
            genotype.s,
            genotype.H[mask],
            genotype.d.astype(np.float64) * 2 - 1,
            genotype.A[mask].astype(np.float64) * 2 - 1,
        ])

    def decode_bits(self, bits: np.ndarray, s_value: float = 1.0,
                    h_value: float = 1.0) -> MSCRGenotype:
        """Genotype from a d|A bitstring with fixed scalings (GA search)."""
        k = self.k
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape != (self.bit_dim,):
            raise ValueError(f"bitstring must have length {self.bit_dim}")
        h = h_value * (1.0 - np.eye(k))
        return MSCRGenotype(k=k, s=np.full(k, s_value), H=h,
                            d=bits[:k].copy(), A=self._offdiag(bits[k:]))


# ---------------------------------------------------------------------------
# PSO

@dataclass
class PsoConfig:
    swarm: int = 100
    iterations: int = 100
    nostalgia: float = 2.0      # pull toward the particle's own best
    social: float = 2.0         # pull toward the swarm best
    init_range: float = 1.0     # positions start uniform in [-r, r]
    velocity_clamp: float = 1.0  # per-coordinate |v| bound; None disables
    seed: object = None
    workers: int = 1

    def inertia(self, iteration: int) -> float:
        return 0.5 + 0.5 * (1.0 - iteration / self.iterations)


@dataclass
class Swarm:
    positions: np.ndarray      # (N, D)
    velocities: np.ndarray     # (N, D)
    pbest_pos: np.ndarray      # (N, D)
    pbest_fit: np.ndarray      # (N,)
    gbest_pos: np.ndarray      # (D,)
    gbest_fit: float


@dataclass
class PsoResult:
    position: np.ndarray
    fitness: float
    trace: np.ndarray          # best-so-far after each iteration, length = iterations


def init_swarm(dim: int, cfg: PsoConfig, rng: np.random.Generator) -> Swarm:
    x = rng.uniform(-cfg.init_range, cfg.init_range, size=(cfg.swarm, dim))
    return Swarm(
        positions=x,
        velocities=np.zeros((cfg.swarm, dim)),
        pbest_pos=x.copy(),
        pbest_fit=np.full(cfg.swarm, np.inf),
        gbest_pos=x[0].copy(),
        gbest_fit=np.inf,
    )


def pso_step(swarm: Swarm, cfg: PsoConfig, iteration: int, rng: np.random.Generator):
    """One velocity/position update (bests are updated after re-evaluation).

    Each particle draws one fresh (alpha, beta) pair per iteration, applied
    across all coordinates; velocities are clamped coordinate-wise.
    """
    w = cfg.inertia(iteration)
    ab = rng.uniform(0.0, 1.0, size=(swarm.positions.shape[0], 2))
    v = (w * swarm.velocities
         + cfg.nostalgia * ab[:, :1] * (swarm.pbest_pos - swarm.positions)
         + cfg.social * ab[:, 1:] * (swarm.gbest_pos - swarm.positions))
    if cfg.velocity_clamp is not None:
        np.clip(v, -cfg.velocity_clamp, cfg.velocity_clamp, out=v)
    swarm.velocities = v
    swarm.positions = swarm.positions + v


def update_bests(swarm: Swarm, fits: np.ndarray):
    """Strict-improvement personal/global best updates (ties keep incumbents)."""
    better = fits < swarm.pbest_fit
    swarm.pbest_fit = np.where(better, fits, swarm.pbest_fit)
    swarm.pbest_pos[better] = swarm.positions[better]
    best = int(np.argmin(swarm.pbest_fit))
    if swarm.pbest_fit[best] < swarm.gbest_fit:
        swarm.gbest_fit = float(swarm.pbest_fit[best])
        swarm.gbest_pos = swarm.pbest_pos[best].copy()


def _evaluate(objective, positions, pool) -> np.ndarray:
    if pool is None:
        return np.array([float(objective(p)) for p in positions])
    # Reduction stays in particle-index order regardless of scheduling.
    return np.array([float(v) for v in pool.map(objective, positions)])


def pso_minimize(objective, dim: int, cfg: PsoConfig) -> PsoResult:
    """Minimize `objective` over R^dim with the inertia-scheduled swarm."""
    rng = np.random.default_rng(cfg.seed)
    swarm = init_swarm(dim, cfg, rng)
    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        update_bests(swarm, _evaluate(objective, swarm.positions, pool))
        trace = np.empty(cfg.iterations)
        for l in range(1, cfg.iterations + 1):
            pso_step(swarm, cfg, l, rng)
            update_bests(swarm, _evaluate(objective, swarm.positions, pool))
            trace[l - 1] = swarm.gbest_fit
            if l > 1 and trace[l - 1] > trace[l - 2]:
                raise RuntimeError("global best increased; bookkeeping bug")
    finally:
        if pool is not None:
            pool.shutdown()
    return PsoResult(position=swarm.gbest_pos.copy(), fitness=swarm.gbest_fit, trace=trace)


# ---------------------------------------------------------------------------
# Fitness

def validation_fitness(genotype: MSCRGenotype, task: SplitSeries,
                       ctx: BuildContext, lam: float = 1e-4) -> float:
    """Validation RMSE of a genotype; +inf encodes divergent configurations.

    One continuous pass over washout+train+validation inputs, ridge fit on
    the training states, error on the validation predictions.
    """
    try:
        system = build_system(genotype, ctx)
        states = system.run(task.inputs[: task.validation.stop], washout=task.washout.stop)
        n_train = task.train.stop - task.train.start
        weights = fit(states[:n_train], task.targets[task.train], RidgeConfig(lam))
        return rmse(predict(states[n_train:], weights), task.targets[task.validation])
    except (NonFiniteState, NonFiniteInput, SingularSystem):
        return float("inf")


def evaluate_on_test(genotype: MSCRGenotype, task: SplitSeries,
                    ctx: BuildContext, lam: float = 1e-4):
    """Final protocol: retrain the readout on the training segment, score on test.

    Returns (weights, test_rmse, predictions, system).
    """
    system = build_system(genotype, ctx)
    states = system.run(task.inputs, washout=task.washout.stop)
    n_train = task.train.stop - task.train.start
    weights = fit(states[:n_train], task.targets[task.train], RidgeConfig(lam))
    test_rows = states[task.test.start - task.washout.stop : task.test.stop - task.washout.stop]
    predictions = predict(test_rows, weights)
    return weights, rmse(predictions, task.targets[task.test]), predictions, system


def pso_optimize(task: SplitSeries, layout: GenotypeLayout, cfg: PsoConfig,
                 ctx: BuildContext, lam: float = 1e-4):
    """Search the full genotype; returns (genotype, validation fitness, trace)."""
    result = pso_minimize(lambda p: validation_fitness(layout.decode(p), task, ctx, lam),
                          layout.dim, cfg)
    return layout.decode(result.position), result.fitness, result.trace


# ---------------------------------------------------------------------------
# GA baseline (documented standard GA over the d|A bits, fixed scalings)

@dataclass
class GaConfig:
    population: int = 100
    generations: int = 100
    tournament: int = 3
    crossover: float = 0.9
    mutation: float = None      # per-bit flip rate; None -> 1/bits
    elitism: int = 1
    seed: object = None
    workers: int = 1


@dataclass
class GaResult:
    bits: np.ndarray
    fitness: float
    trace: np.ndarray          # best-so-far; index 0 is the initial population


def ga_minimize(objective, nbits: int, cfg: GaConfig) -> GaResult:
    """Tournament-selection GA with uniform crossover and bit-flip mutation.

    Generation 0 is seeded with the all-zero and all-one strings. One child
    is produced per selection; the top `elitism` individuals carry over
    unchanged each generation.
    """
    rng = np.random.default_rng(cfg.seed)
    mutation = (1.0 / nbits) if cfg.mutation is None else cfg.mutation
    pop = rng.integers(0, 2, size=(cfg.population, nbits), dtype=np.uint8)
    pop[0] = 0
    if cfg.population > 1:
        pop[1] = 1

    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        fits = _evaluate(objective, pop, pool)
        best = int(np.argmin(fits))
        best_bits, best_fit = pop[best].copy(), float(fits[best])
        trace = np.empty(cfg.generations + 1)
        trace[0] = best_fit

        def tournament() -> int:
            contenders = rng.integers(0, cfg.population, size=cfg.tournament)
            return int(contenders[np.argmin(fits[contenders])])

        for gen in range(1, cfg.generations + 1):
            elite_idx = np.argsort(fits, kind="stable")[: cfg.elitism]
            children = [pop[i].copy() for i in elite_idx]
            while len(children) < cfg.population:
                p1, p2 = pop[tournament()], pop[tournament()]
                if rng.random() < cfg.crossover:
                    take = rng.random(nbits) < 0.5
                    child = np.where(take, p1, p2)
                else:
                    child = p1.copy()
                flips = rng.random(nbits) < mutation
                child = np.bitwise_xor(child, flips.astype(np.uint8))
                children.append(child)
            pop = np.array(children, dtype=np.uint8)
            fits = _evaluate(objective, pop, pool)
            gen_best = int(np.argmin(fits))
            if fits[gen_best] < best_fit:
                best_fit = float(fits[gen_best])
                best_bits = pop[gen_best].copy()
            trace[gen] = best_fit
    finally:
        if pool is not None:
            pool.shutdown()
    return GaResult(bits=best_bits, fitness=best_fit, trace=trace)


def ga_optimize(task: SplitSeries, layout: GenotypeLayout, cfg: GaConfig,
                ctx: BuildContext, lam: float = 1e-4,
                s_value: float = 1.0, h_value: float = 1.0):
    """Search d and A only, scalings fixed; returns (genotype, fitness, trace)."""
    result = ga_minimize(
        lambda b: validation_fitness(layout.decode_bits(b, s_value, h_value), task, ctx, lam),
        layout.bit_dim, cfg)
    return layout.decode_bits(result.bits, s_value, h_value), result.fitness, result.trace
