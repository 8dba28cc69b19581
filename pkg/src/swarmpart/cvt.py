"""Monte Carlo Lloyd iteration: the centroidal-tessellation baseline.

Each step draws uniform feasible sample points, assigns every sample to its
nearest generator and moves each generator to the mean of its samples. The
sample-based update works in any dimension and with obstacles, at the price
of sampling noise (controlled by samples_per_iter).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environment import Environment, enforce_boundaries_list, uniform_feasible
from .geometry import PointSet, as_coords


@dataclass(frozen=True)
class CvtConfig:
    generators: int = 100
    lloyd_iters: int = 60
    samples_per_iter: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.generators < 1:
            raise ValueError("need at least one generator")
        if self.lloyd_iters < 0:
            raise ValueError("lloyd_iters must be non-negative")
        if self.samples_per_iter < 100 * self.generators:
            raise ValueError("samples_per_iter must be at least 100x the generator count")


_CHUNK = 50_000


def lloyd_step(generators, env: Environment, samples: int, rng: np.random.Generator) -> PointSet:
    """One Lloyd update: move each generator to its sample-estimated centroid.

    Generators that capture no samples stay put; results are clamped back
    into the feasible set (an obstacle can make a cell's centroid
    infeasible).
    """
    coords = as_coords(generators)
    dims, count = coords.shape
    pts = uniform_feasible(env, samples, rng).T
    sums = np.zeros((count, dims))
    hits = np.zeros(count, dtype=np.int64)
    cols = coords.T
    for start in range(0, samples, _CHUNK):
        chunk = pts[start : start + _CHUNK]
        d2 = ((chunk[:, None, :] - cols[None, :, :]) ** 2).sum(axis=2)
        owner = np.argmin(d2, axis=1)
        np.add.at(sums, owner, chunk)
        hits += np.bincount(owner, minlength=count)
    out = cols.copy()
    occupied = hits > 0
    out[occupied] = sums[occupied] / hits[occupied, None]
    if env.has_obstacles:
        fixed = []
        for row in out.tolist():
            enforce_boundaries_list(env, row, rng)
            fixed.append(row)
        out = np.asarray(fixed)
    return PointSet(out.T)


def run_cvt(config: CvtConfig, env: Environment, initial: PointSet | None = None) -> PointSet:
    """Repeated Lloyd steps from a seeded uniform start (or the given one)."""
    rng = np.random.default_rng(config.seed)
    if initial is None:
        points = PointSet(uniform_feasible(env, config.generators, rng))
    else:
        points = initial.copy()
    for _ in range(config.lloyd_iters):
        points = lloyd_step(points, env, config.samples_per_iter, rng)
    return points
