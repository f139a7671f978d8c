import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cycleres.datasets import TaskSpec, make_task
from cycleres.optimize import (
    GaConfig,
    GenotypeLayout,
    PsoConfig,
    Swarm,
    ga_minimize,
    ga_optimize,
    init_swarm,
    pso_minimize,
    pso_optimize,
    pso_step,
    evaluate_on_test,
    update_bests,
    validation_fitness,
)
from cycleres.reservoir import Activation, BuildContext, MSCRGenotype


def sphere(x):
    return float(np.sum(np.square(x)))


class TestLayout:
    def test_dimensions(self):
        layout = GenotypeLayout(3)
        assert layout.dim == 18 and layout.bit_dim == 9

    def test_decode_slices(self):
        layout = GenotypeLayout(2)
        pos = np.array([0.5, -1.5, 2.0, -3.0, 0.3, -0.2, 0.7, -0.7])
        g = layout.decode(pos)
        assert np.array_equal(g.s, [0.5, -1.5])
        assert g.H[0, 1] == 2.0 and g.H[1, 0] == -3.0 and g.H[0, 0] == 0.0
        assert list(g.d) == [1, 0]
        assert g.A[0, 1] == 1 and g.A[1, 0] == 0

    def test_exact_zero_binarizes_to_zero(self):
        layout = GenotypeLayout(1)
        g = layout.decode(np.array([1.0, 0.0]))
        assert g.d[0] == 0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=2**31))
    def test_encode_decode_round_trip(self, k, seed):
        rng = np.random.default_rng(seed)
        layout = GenotypeLayout(k)
        a = (rng.random((k, k)) < 0.5).astype(np.uint8)
        np.fill_diagonal(a, 0)
        h = rng.normal(size=(k, k))
        np.fill_diagonal(h, 0)
        g = MSCRGenotype(k=k, s=rng.normal(size=k), H=h,
                         d=rng.integers(0, 2, k).astype(np.uint8), A=a)
        back = layout.decode(layout.encode(g))
        assert np.array_equal(back.s, g.s)
        assert np.array_equal(back.H, g.H)
        assert np.array_equal(back.d, g.d)
        assert np.array_equal(back.A, g.A)

    def test_decode_total_on_random_vectors(self):
        layout = GenotypeLayout(4)
        rng = np.random.default_rng(1)
        for _ in range(20):
            g = layout.decode(rng.normal(size=layout.dim) * 10)
            assert g.k == 4  # genotype invariants enforced in constructor

    def test_decode_bits(self):
        layout = GenotypeLayout(2)
        g = layout.decode_bits(np.array([1, 0, 1, 0]), s_value=1.0, h_value=1.0)
        assert list(g.d) == [1, 0]
        assert g.A[0, 1] == 1 and g.A[1, 0] == 0
        assert g.H[0, 1] == 1.0 and np.array_equal(g.s, [1.0, 1.0])


class FixedRng:
    """Stub generator returning a constant for uniform draws."""

    def __init__(self, value):
        self.value = value

    def uniform(self, lo, hi, size=None):
        return np.full(size, self.value)


class TestPsoStep:
    def make_swarm(self, x, v, pbest, gbest):
        return Swarm(positions=np.array([[x]], dtype=float),
                     velocities=np.array([[v]], dtype=float),
                     pbest_pos=np.array([[pbest]], dtype=float),
                     pbest_fit=np.array([0.0]),
                     gbest_pos=np.array([gbest], dtype=float),
                     gbest_fit=0.0)

    def test_velocity_arithmetic_unclamped(self):
        swarm = self.make_swarm(x=0.0, v=1.0, pbest=1.0, gbest=2.0)
        cfg = PsoConfig(swarm=1, iterations=10, velocity_clamp=None)
        pso_step(swarm, cfg, iteration=0, rng=FixedRng(0.5))  # w(0) = 1
        assert swarm.velocities[0, 0] == pytest.approx(4.0)   # 1 + 1 + 2
        assert swarm.positions[0, 0] == pytest.approx(4.0)

    def test_velocity_arithmetic_clamped(self):
        swarm = self.make_swarm(x=0.0, v=1.0, pbest=1.0, gbest=2.0)
        cfg = PsoConfig(swarm=1, iterations=10, velocity_clamp=1.0)
        pso_step(swarm, cfg, iteration=0, rng=FixedRng(0.5))
        assert swarm.velocities[0, 0] == pytest.approx(1.0)
        assert swarm.positions[0, 0] == pytest.approx(1.0)

    def test_converged_particle_stays_put(self):
        swarm = self.make_swarm(x=0.7, v=0.0, pbest=0.7, gbest=0.7)
        cfg = PsoConfig(swarm=1, iterations=10)
        for l in range(5):
            pso_step(swarm, cfg, iteration=l, rng=FixedRng(0.9))
        assert swarm.positions[0, 0] == 0.7 and swarm.velocities[0, 0] == 0.0

    def test_pure_inertial_drift(self):
        # no attraction, w = 1, no clamp: x after m steps = x0 + m * v0
        rng = np.random.default_rng(2)
        x0 = rng.normal(size=(4, 3))
        v0 = rng.normal(size=(4, 3))
        swarm = Swarm(positions=x0.copy(), velocities=v0.copy(),
                      pbest_pos=x0.copy(), pbest_fit=np.zeros(4),
                      gbest_pos=x0[0].copy(), gbest_fit=0.0)
        cfg = PsoConfig(swarm=4, iterations=10, nostalgia=0.0, social=0.0,
                        velocity_clamp=None)
        for _ in range(7):
            pso_step(swarm, cfg, iteration=0, rng=rng)
        assert np.allclose(swarm.positions, x0 + 7 * v0, atol=1e-12)

    def test_inertia_schedule(self):
        cfg = PsoConfig(iterations=100)
        assert cfg.inertia(0) == 1.0
        assert cfg.inertia(100) == 0.5
        assert cfg.inertia(50) == pytest.approx(0.75)


class TestUpdateBests:
    def test_ties_keep_incumbent(self):
        swarm = init_swarm(2, PsoConfig(swarm=3, seed=0), np.random.default_rng(0))
        update_bests(swarm, np.array([1.0, 2.0, 3.0]))
        old_pos = swarm.gbest_pos.copy()
        moved = swarm.positions + 1.0
        swarm.positions = moved
        update_bests(swarm, np.array([1.0, 2.0, 3.0]))  # equal fitness: no change
        assert np.array_equal(swarm.gbest_pos, old_pos)
        assert np.array_equal(swarm.pbest_pos[0], old_pos)


class TestPsoMinimize:
    def test_sphere_convergence_five_seeds(self):
        for seed in range(5):
            cfg = PsoConfig(swarm=200, iterations=50, seed=seed)
            result = pso_minimize(sphere, 10, cfg)
            assert result.fitness < 1e-3, f"seed {seed}: {result.fitness}"

    def test_trace_monotone_and_sized(self):
        cfg = PsoConfig(swarm=15, iterations=25, seed=3)
        result = pso_minimize(sphere, 6, cfg)
        assert result.trace.shape == (25,)
        assert (np.diff(result.trace) <= 0).all()

    def test_degenerate_single_particle_single_iteration(self):
        cfg = PsoConfig(swarm=1, iterations=1, seed=4)
        result = pso_minimize(sphere, 3, cfg)
        x0 = np.random.default_rng(4).uniform(-1, 1, (1, 3))
        # zero initial velocity and self-attraction only: the particle stays
        assert np.array_equal(result.position, x0[0])
        assert result.fitness == sphere(x0[0])

    def test_deterministic_given_seed(self):
        cfg = PsoConfig(swarm=10, iterations=10, seed=5)
        a = pso_minimize(sphere, 4, cfg)
        b = pso_minimize(sphere, 4, cfg)
        assert np.array_equal(a.position, b.position) and a.fitness == b.fitness

    def test_workers_do_not_change_result(self):
        a = pso_minimize(sphere, 4, PsoConfig(swarm=10, iterations=10, seed=6, workers=1))
        b = pso_minimize(sphere, 4, PsoConfig(swarm=10, iterations=10, seed=6, workers=4))
        assert np.array_equal(a.position, b.position)
        assert np.array_equal(a.trace, b.trace)


def tiny_task(seed=0):
    return make_task(TaskSpec(name="narma10", seed=seed))


def tiny_ctx(bias=False, n=12):
    return BuildContext(n=n, rho=0.95, activation=Activation.TANH,
                        sign_mode="pi", bias_enabled=bias)


class TestFitness:
    def test_detached_genotype_predicts_zero(self):
        task = tiny_task()
        k = 2
        g = MSCRGenotype(k=k, s=np.ones(k), H=np.zeros((k, k)),
                         d=np.zeros(k, dtype=np.uint8), A=np.zeros((k, k), dtype=np.uint8))
        got = validation_fitness(g, task, tiny_ctx(bias=False))
        want = float(np.sqrt(np.mean(task.targets[task.validation] ** 2)))
        assert got == pytest.approx(want, rel=1e-12)

    def test_rank_one_matches_single_ring(self):
        task = tiny_task()
        a = np.zeros((3, 3), dtype=np.uint8)
        a[1, 2] = 1
        g = MSCRGenotype(k=3, s=np.array([0.6, 2.0, -1.0]),
                         H=np.ones((3, 3)) - np.eye(3),
                         d=np.array([1, 0, 0], dtype=np.uint8), A=a)
        single = MSCRGenotype.single(0.6)
        ctx = tiny_ctx(bias=False, n=30)
        assert validation_fitness(g, task, ctx) == pytest.approx(
            validation_fitness(single, task, ctx), abs=1e-10)

    def test_fitness_deterministic(self):
        task = tiny_task()
        rng = np.random.default_rng(7)
        layout = GenotypeLayout(3)
        g = layout.decode(rng.normal(size=layout.dim))
        ctx = tiny_ctx(bias=True)
        assert validation_fitness(g, task, ctx) == validation_fitness(g, task, ctx)

    def test_fitness_nonnegative_finite(self):
        task = tiny_task()
        rng = np.random.default_rng(8)
        layout = GenotypeLayout(3)
        for _ in range(5):
            f = validation_fitness(layout.decode(rng.normal(size=layout.dim)), task, tiny_ctx())
            assert f >= 0 and np.isfinite(f)

    def test_divergent_genotype_gets_inf(self):
        task = tiny_task()
        a = np.zeros((2, 2), dtype=np.uint8)
        a[0, 1] = 1
        h = np.zeros((2, 2))
        h[0, 1] = 1e308
        g = MSCRGenotype(k=2, s=np.ones(2), H=h, d=np.array([1, 0], dtype=np.uint8), A=a)
        ctx = BuildContext(n=8, rho=0.95, activation=Activation.IDENTITY,
                           sign_mode="pi", bias_enabled=False)
        assert validation_fitness(g, task, ctx) == np.inf

    def test_target_scaling_scales_fitness(self):
        task = tiny_task()
        gamma = 3.7
        scaled = dataclasses.replace(task, targets=gamma * task.targets)
        layout = GenotypeLayout(2)
        rng = np.random.default_rng(9)
        ctx = tiny_ctx()
        for _ in range(3):
            g = layout.decode(rng.normal(size=layout.dim))
            f1 = validation_fitness(g, task, ctx)
            f2 = validation_fitness(g, scaled, ctx)
            assert f2 == pytest.approx(gamma * f1, rel=1e-11)

    def test_test_evaluation_consistency(self):
        task = tiny_task()
        g = MSCRGenotype.single(0.5)
        weights, test_rmse, predictions, system = evaluate_on_test(g, task, tiny_ctx())
        assert predictions.shape == (1000,)
        assert test_rmse >= 0 and np.isfinite(test_rmse)
        assert system.k == 1


class TestPsoOptimize:
    def test_smoke_trace_and_types(self):
        task = tiny_task()
        layout = GenotypeLayout(2)
        cfg = PsoConfig(swarm=6, iterations=4, seed=1)
        genotype, fitness, trace = pso_optimize(task, layout, cfg, tiny_ctx())
        assert isinstance(genotype, MSCRGenotype)
        assert trace.shape == (4,) and (np.diff(trace) <= 0).all()
        assert fitness == trace[-1]


class TestGa:
    def test_onemax_five_seeds(self):
        for seed in range(5):
            cfg = GaConfig(population=100, generations=100, seed=seed)
            result = ga_minimize(lambda b: -float(np.sum(b)), 100, cfg)
            assert result.fitness == -100.0, f"seed {seed}"

    def test_generation_zero_seeding(self):
        calls = []

        def objective(bits):
            calls.append(bits.copy())
            return float(np.sum(bits))

        cfg = GaConfig(population=8, generations=1, seed=2)
        result = ga_minimize(objective, 6, cfg)
        first_gen = calls[:8]
        assert not first_gen[0].any() and first_gen[1].all()
        assert result.trace[0] <= min(objective(np.zeros(6)), objective(np.ones(6)))

    def test_trace_monotone(self):
        cfg = GaConfig(population=20, generations=30, seed=3)
        result = ga_minimize(lambda b: float(np.sum(b)), 12, cfg)
        assert result.trace.shape == (31,)
        assert (np.diff(result.trace) <= 0).all()

    def test_degenerate_settings_converge_to_elite(self):
        cfg = GaConfig(population=20, generations=60, seed=4,
                       crossover=0.0, mutation=0.0, elitism=1)
        rng = np.random.default_rng(4)
        weights = rng.normal(size=10)

        last_pop = {}

        def objective(bits):
            objective.seen = objective.__dict__.get("seen", [])
            objective.seen.append(bits.copy())
            return float(weights @ bits)

        result = ga_minimize(objective, 10, cfg)
        final_generation = np.array(objective.seen[-20:])
        assert (final_generation == result.bits).all()
        assert (np.diff(result.trace) <= 0).all()

    def test_ga_optimize_fixed_scalings(self):
        task = tiny_task()
        layout = GenotypeLayout(2)
        cfg = GaConfig(population=6, generations=3, seed=5)
        genotype, fitness, trace = ga_optimize(task, layout, cfg, tiny_ctx())
        assert np.array_equal(genotype.s, [1.0, 1.0])
        offdiag = genotype.H[~np.eye(2, dtype=bool)]
        assert (offdiag == 1.0).all()
        assert trace.shape == (4,)
        assert np.isfinite(fitness)
