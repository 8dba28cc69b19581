import numpy as np
import pytest

from swarmpart.cvt import CvtConfig, lloyd_step, run_cvt
from swarmpart.environment import Box, Environment, is_feasible_many
from swarmpart.geometry import PointSet


def pts(*rows):
    return PointSet(np.array(rows, dtype=float).T)


class TestConfig:
    def test_sample_floor(self):
        with pytest.raises(ValueError):
            CvtConfig(generators=10, samples_per_iter=500)


class TestLloydStep:
    def test_single_generator_moves_to_center(self, unit_square):
        rng = np.random.default_rng(0)
        out = lloyd_step(pts((0.9, 0.1)), unit_square, 1_000_000, rng)
        assert np.allclose(out.coords[:, 0], (0.5, 0.5), atol=0.01)

    def test_symmetric_generators_update_symmetrically(self, unit_square):
        rng = np.random.default_rng(1)
        out = lloyd_step(pts((0.3, 0.5), (0.7, 0.5)), unit_square, 200_000, rng)
        a, b = out.coords[:, 0], out.coords[:, 1]
        assert abs(a[0] - (1.0 - b[0])) < 0.01
        assert abs(a[1] - b[1]) < 0.01

    def test_fixed_point_for_analytic_two_cell_split(self, unit_square):
        # generators at the centroids of the left/right half cells
        start = pts((0.25, 0.5), (0.75, 0.5))
        rng = np.random.default_rng(2)
        out = lloyd_step(start, unit_square, 400_000, rng)
        assert np.max(np.abs(out.coords - start.coords)) < 0.005

    def test_empty_cell_generator_stays_put(self):
        env = Environment(domain=Box((0, 0), (1, 1)))
        # second generator duplicated far corner pair: one will own ~no samples
        start = pts((0.5, 0.5), (0.5, 0.5))
        rng = np.random.default_rng(3)
        out = lloyd_step(start, env, 10_000, rng)
        # the duplicate (never nearest because of argmin tie to index 0)
        assert np.array_equal(out.coords[:, 1], [0.5, 0.5])


class TestRunCvt:
    def test_zero_iterations_identity(self, unit_square):
        start = pts((0.1, 0.2), (0.8, 0.9))
        cfg = CvtConfig(generators=2, lloyd_iters=0, samples_per_iter=200)
        out = run_cvt(cfg, unit_square, initial=start)
        assert np.array_equal(out.coords, start.coords)

    def test_four_generators_reach_quarter_grid(self, unit_square):
        targets = {(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)}
        cfg = CvtConfig(generators=4, lloyd_iters=80, samples_per_iter=40_000, seed=5)
        out = run_cvt(cfg, unit_square)
        for col in out.coords.T:
            best = min(np.hypot(col[0] - t[0], col[1] - t[1]) for t in targets)
            assert best < 0.05

    def test_monotonic_quantization_energy(self, unit_square):
        cfg = CvtConfig(generators=9, lloyd_iters=1, samples_per_iter=20_000, seed=7)
        rng = np.random.default_rng(7)
        from swarmpart.environment import uniform_feasible

        points = PointSet(uniform_feasible(unit_square, 9, rng))
        probe = np.random.default_rng(99)
        test_cloud = probe.uniform(0, 1, size=(50_000, 2))

        def energy(ps):
            d2 = ((test_cloud[:, None, :] - ps.coords.T[None, :, :]) ** 2).sum(axis=2)
            return float(d2.min(axis=1).mean())

        prev = energy(points)
        for i in range(12):
            points = lloyd_step(points, unit_square, 20_000, np.random.default_rng(100 + i))
            cur = energy(points)
            assert cur < prev * 1.02
            prev = cur

    def test_generators_stay_feasible_with_obstacle(self):
        env = Environment(
            domain=Box((0, 0), (1, 1)),
            obstacles=(Box((0.3, 0.3), (0.7, 0.7)),),
        )
        cfg = CvtConfig(generators=12, lloyd_iters=15, samples_per_iter=5_000, seed=11)
        out = run_cvt(cfg, env)
        assert bool(np.all(is_feasible_many(env, out.coords.T)))

    def test_deterministic(self, unit_square):
        cfg = CvtConfig(generators=5, lloyd_iters=5, samples_per_iter=1_000, seed=3)
        a = run_cvt(cfg, unit_square)
        b = run_cvt(cfg, unit_square)
        assert np.array_equal(a.coords, b.coords)
