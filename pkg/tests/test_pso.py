import numpy as np
import pytest

from swarmpart.geometry import PointSet
from swarmpart.partitioner import PartitionConfig
from swarmpart.pso import (
    benchmark_function,
    FUNCTION_NAMES,
    PsoConfig,
    evaluate,
    experiment_grid,
    pso_run,
    seeded_experiment,
    starting_positions,
)


class TestFunctions:
    def test_parabola_minimum(self):
        f = benchmark_function("parabola")
        assert evaluate(f, (0.0, 0.0)) == 0.0

    def test_rosenbrock_minimum(self):
        f = benchmark_function("rosenbrock")
        assert evaluate(f, (1.0, 1.0)) == 0.0

    def test_schwefel_near_zero_at_standard_minimum(self):
        f = benchmark_function("schwefel")
        assert abs(evaluate(f, (420.9687, 420.9687))) < 1e-3

    def test_every_function_validates_its_stored_minimum(self):
        for name in FUNCTION_NAMES:
            f = benchmark_function(name, dims=2)
            residual = abs(evaluate(f, f.global_minimum_position) - f.global_minimum_value)
            assert residual < 1e-6, name

    def test_evaluate_clamps_to_domain(self):
        f = benchmark_function("parabola")
        assert evaluate(f, (150.0, 0.0)) == evaluate(f, (100.0, 0.0))

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            benchmark_function("langermann")


class TestPsoRun:
    def test_parabola_always_succeeds(self):
        f = benchmark_function("parabola")
        cfg = PsoConfig(particles=50, max_iters=100)
        wins = 0
        for seed in range(30):
            rng = np.random.default_rng(seed)
            start = PointSet(rng.uniform(-100, 100, size=(50, 2)).T)
            res = pso_run(f, start, PsoConfig(particles=50, max_iters=100, seed=seed))
            wins += res.success
        assert wins == 30

    def test_preplaced_at_minimum_succeeds_immediately(self):
        f = benchmark_function("griewank")
        cfg = PsoConfig(particles=10, max_iters=50, seed=1)
        start = PointSet(np.zeros((2, 10)))
        res = pso_run(f, start, cfg)
        assert res.success
        assert res.iterations_run == 0
        assert res.evaluations_used == 10

    def test_deterministic(self):
        f = benchmark_function("rastrigin")
        rng = np.random.default_rng(5)
        start = PointSet(rng.uniform(-5, 5, size=(20, 2)).T)
        cfg = PsoConfig(particles=20, max_iters=60, seed=9)
        a = pso_run(f, start, cfg)
        b = pso_run(f, start, cfg)
        assert np.array_equal(a.best_position, b.best_position)
        assert a.best_value == b.best_value
        assert a.evaluations_used == b.evaluations_used

    def test_budget_invariant(self):
        f = benchmark_function("schwefel")
        rng = np.random.default_rng(3)
        start = PointSet(rng.uniform(-500, 500, size=(12, 2)).T)
        cfg = PsoConfig(particles=12, max_iters=40, seed=2)
        res = pso_run(f, start, cfg)
        assert res.evaluations_used <= 12 * (40 + 1)

    def test_gbest_monotone_and_in_domain(self):
        f = benchmark_function("ackley")
        rng = np.random.default_rng(8)
        start = PointSet(rng.uniform(-32, 32, size=(15, 2)).T)
        # run twice with increasing budgets: a longer run never ends worse
        short = pso_run(f, start, PsoConfig(particles=15, max_iters=10, seed=4))
        long = pso_run(f, start, PsoConfig(particles=15, max_iters=80, seed=4))
        assert long.best_value <= short.best_value
        assert np.all(long.best_position >= np.asarray(f.domain.lower))
        assert np.all(long.best_position <= np.asarray(f.domain.upper))

    def test_particle_count_mismatch(self):
        f = benchmark_function("parabola")
        with pytest.raises(ValueError):
            pso_run(f, PointSet(np.zeros((2, 5))), PsoConfig(particles=10))


class TestSeededExperiment:
    def test_epsilon_zero_when_preplaced_at_optimum(self):
        f = benchmark_function("parabola")
        start = PointSet(np.zeros((2, 10)))
        summary = seeded_experiment(
            "random", f, repeats=1, cfg=PsoConfig(particles=10, max_iters=5),
            initial_positions=start,
        )
        assert summary.epsilon == 0.0
        assert summary.success_rate == 1.0

    def test_partitioned_starts_cover_the_domain(self):
        f = benchmark_function("griewank")
        cfg = PartitionConfig(max_iters=60, stall_sweeps=20)
        start = starting_positions("onnrao", f, 12, seed=3, partition_config=cfg)
        assert start.count == 12
        assert np.all(start.coords >= -600) and np.all(start.coords <= 600)
        # partitioned starts should spread beyond a tight cluster
        assert start.coords.std() > 50

    def test_epsilon_nonnegative_and_deterministic(self):
        f = benchmark_function("rastrigin")
        cfg = PsoConfig(particles=8, max_iters=20)
        a = seeded_experiment("random", f, 5, cfg, seed=11)
        b = seeded_experiment("random", f, 5, cfg, seed=11)
        assert a.epsilon >= 0
        assert a.epsilon == b.epsilon
        assert a.mean_nfe == b.mean_nfe

    def test_grid_fills_relative_nfe(self):
        cfg = PsoConfig(particles=8, max_iters=15)
        grid = experiment_grid(
            ["random", "cvt"], ["parabola"], repeats=3, cfg=cfg, seed=7,
        )
        assert len(grid) == 2
        assert max(s.relative_nfe for s in grid) == 1.0
        assert all(0 < s.relative_nfe <= 1.0 for s in grid)
