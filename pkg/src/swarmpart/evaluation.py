"""Assessment statistics for partitioned point sets.

Covers spacing-uniformity coefficients of variation, the random-window
density test, placement-probability heatmaps over repeated runs, area-fill
curves, PCA scree ratios, raster Voronoi-dual degree histograms, the
square-grid detector and the per-iteration timing benchmark.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .cvt import CvtConfig, run_cvt
from .environment import Environment, feasible_volume, uniform_feasible
from .geometry import InsufficientAgentsError, PointSet, as_coords
from .partitioner import PartitionConfig, initialize, run
from .seeding import child_seed

METHODS = ("random", "cvt", "rao", "onnrao")


class DegenerateInputError(ValueError):
    """Raised when a statistic is undefined for the given points."""


@dataclass
class Heatmap:
    """Discretised placement probabilities on a square bin grid."""

    bins: np.ndarray
    trials: int
    agents_per_trial: int

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.float64)
        if bins.ndim != 2 or bins.shape[0] != bins.shape[1]:
            raise ValueError("heatmap bins must be a square grid")
        if bins.size and abs(float(bins.sum()) - 1.0) > 1e-9:
            raise ValueError("heatmap bins must sum to 1")
        if np.any(bins < 0):
            raise ValueError("heatmap bins must be non-negative")
        self.bins = bins

    @classmethod
    def from_counts(cls, counts: np.ndarray, trials: int, agents_per_trial: int) -> "Heatmap":
        counts = np.asarray(counts, dtype=np.float64)
        return cls(counts / counts.sum(), trials, agents_per_trial)


@dataclass
class EvalReport:
    """Bundle of the per-point-set statistics."""

    nn_cv: float
    next_nn_cv: float
    density_mean: float
    density_variance: float
    scree: list[float]
    dual_degree_hist: dict[int, int]

    def __post_init__(self):
        if self.scree and abs(sum(self.scree) - 1.0) > 1e-9:
            raise ValueError("scree ratios must sum to 1")
        if any(r < -1e-12 for r in self.scree):
            raise ValueError("scree ratios must be non-negative")


@dataclass
class FillCurve:
    """Cumulative visited-bin fraction versus executions, with a 2-sigma band."""

    executions: np.ndarray
    mean_fraction: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    trials: int


@dataclass(frozen=True)
class MethodConfigs:
    """Templates for the run-based methods; seeds are replaced per trial."""

    partition: PartitionConfig = field(default_factory=PartitionConfig)
    cvt: CvtConfig = field(default_factory=CvtConfig)


@dataclass
class BenchRow:
    algorithm: str
    dims: int
    agents: int
    seconds_per_iteration: float


# --------------------------- spacing statistics ---------------------------


def _sorted_neighbor_dists(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, :, None] - coords[:, None, :]
    d2 = np.einsum("dij,dij->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    return np.sqrt(np.sort(d2, axis=0))


def nn_cv(points) -> tuple[float, float]:
    """Coefficients of variation of nearest and next-nearest distances."""
    coords = as_coords(points)
    if coords.shape[1] < 3:
        raise InsufficientAgentsError("nn_cv needs at least 3 agents")
    ranked = _sorted_neighbor_dists(coords)
    out = []
    for row in ranked[:2]:
        mean = float(row.mean())
        if mean == 0.0:
            raise DegenerateInputError("all agents coincide: spacing CV undefined")
        out.append(float(row.std()) / mean)
    return out[0], out[1]


# --------------------------- window density test ---------------------------


def _ball_radius(volume: float, dims: int) -> float:
    unit = math.pi ** (dims / 2.0) / math.gamma(dims / 2.0 + 1.0)
    return (volume / unit) ** (1.0 / dims)


def window_density_test(
    points,
    env: Environment,
    n_windows: int = 10_000,
    window_area: float | None = None,
    shape: str = "square",
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Mean and variance of agent counts in randomly placed windows.

    Windows are congruent squares (hypercubes) or circles (balls) of the
    given area, placed uniformly so they fit inside the domain box entirely.
    window_area defaults to feasible volume divided by the agent count, so a
    perfectly uniform spread has expectation 1.
    """
    coords = as_coords(points)
    if rng is None:
        rng = np.random.default_rng(0)
    dims = env.dims
    count = coords.shape[1]
    if window_area is None:
        if count == 0:
            raise ValueError("window_area is required for an empty point set")
        window_area = feasible_volume(env) / count
    lo = np.asarray(env.domain.lower)
    hi = np.asarray(env.domain.upper)
    if shape == "square":
        half = 0.5 * window_area ** (1.0 / dims)
    elif shape == "circle":
        half = _ball_radius(window_area, dims)
    else:
        raise ValueError(f"unknown window shape: {shape!r}")
    if np.any(hi - lo < 2 * half):
        raise ValueError("window does not fit inside the domain")
    centers = rng.uniform(lo + half, hi - half, size=(n_windows, dims))
    if count == 0:
        return 0.0, 0.0
    counts = np.zeros(n_windows)
    cols = coords.T
    chunk = max(1, 20_000_000 // max(1, count * dims))
    for start in range(0, n_windows, chunk):
        c = centers[start : start + chunk]
        delta = np.abs(c[:, None, :] - cols[None, :, :])
        if shape == "square":
            inside = np.all(delta <= half, axis=2)
        else:
            inside = (delta**2).sum(axis=2) <= half**2
        counts[start : start + chunk] = inside.sum(axis=1)
    return float(counts.mean()), float(counts.var())


def welch_t(counts_a, counts_b) -> float:
    """Welch two-sample t statistic for a difference-of-means check."""
    a = np.asarray(counts_a, dtype=np.float64)
    b = np.asarray(counts_b, dtype=np.float64)
    va = a.var(ddof=1) / len(a)
    vb = b.var(ddof=1) / len(b)
    return float((a.mean() - b.mean()) / math.sqrt(va + vb))


# --------------------------- repeated-run statistics ---------------------------


def final_points(
    method: str,
    agents: int,
    env: Environment,
    configs: MethodConfigs,
    seed: int,
) -> PointSet:
    """Final agent positions for one seeded execution of a placement method."""
    if method == "random":
        rng = np.random.default_rng(seed)
        return PointSet(uniform_feasible(env, agents, rng))
    if method == "cvt":
        cfg = replace(configs.cvt, generators=agents, seed=seed)
        return run_cvt(cfg, env)
    if method in ("rao", "onnrao"):
        cfg = replace(configs.partition, algorithm=method, agents=agents, seed=seed)
        return run(cfg, env).points
    raise ValueError(f"unknown method: {method!r}")


def _bin_indices(coords: np.ndarray, env: Environment, bins: int) -> tuple[np.ndarray, np.ndarray]:
    lo = np.asarray(env.domain.lower)
    hi = np.asarray(env.domain.upper)
    scaled = (coords.T - lo) / (hi - lo) * bins
    idx = np.clip(np.floor(scaled).astype(int), 0, bins - 1)
    return idx[:, 0], idx[:, 1]


def _pdf_trial_counts(args) -> np.ndarray:
    method, agents, env, configs, seed, bins, trials = args
    counts = np.zeros((bins, bins), dtype=np.int64)
    for trial in trials:
        ps = final_points(method, agents, env, configs, child_seed(seed, method, trial))
        ix, iy = _bin_indices(ps.coords, env, bins)
        np.add.at(counts, (iy, ix), 1)
    return counts


def placement_pdf(
    method: str,
    agents: int,
    trials: int,
    env: Environment,
    configs: MethodConfigs | None = None,
    seed: int = 0,
    bins: int = 100,
    workers: int = 1,
) -> Heatmap:
    """Discretised placement PDF over repeated seeded executions.

    Each trial runs the method from a fresh child seed and bins the final
    agent positions on a bins x bins grid over the domain box. 1000+ trials
    give reportable histograms; fewer are fine for smoke tests. With
    workers > 1 the trials fan out over processes; child seeds make the
    aggregate identical to the sequential result.
    """
    if env.dims != 2:
        raise ValueError("placement heatmaps are 2-D only")
    configs = configs or MethodConfigs()
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        slices = [list(range(w, trials, workers)) for w in range(workers)]
        args = [(method, agents, env, configs, seed, bins, s) for s in slices if s]
        counts = np.zeros((bins, bins), dtype=np.int64)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_pdf_trial_counts, args):
                counts += part
    else:
        counts = _pdf_trial_counts((method, agents, env, configs, seed, bins, range(trials)))
    return Heatmap.from_counts(counts, trials, agents)


_DIHEDRAL = (
    lambda h: h,
    lambda h: np.rot90(h, 1),
    lambda h: np.rot90(h, 2),
    lambda h: np.rot90(h, 3),
    lambda h: np.flipud(h),
    lambda h: np.fliplr(h),
    lambda h: h.T,
    lambda h: np.rot90(h, 2).T,
)


def pdf_symmetry_score(heatmap: Heatmap | np.ndarray) -> float:
    """Asymmetry of a square heatmap: 0 for exact 8-fold dihedral symmetry.

    Mean absolute deviation from the average over the square's 8 symmetries,
    normalised by the mean bin value.
    """
    h = heatmap.bins if isinstance(heatmap, Heatmap) else np.asarray(heatmap, dtype=np.float64)
    symmetrised = np.mean([t(h) for t in _DIHEDRAL], axis=0)
    mean_bin = float(h.mean())
    if mean_bin == 0.0:
        return 0.0
    return float(np.abs(h - symmetrised).mean()) / mean_bin


def area_fill_cdf(
    method: str,
    agents: int,
    env: Environment,
    configs: MethodConfigs | None = None,
    max_executions: int = 50,
    outer_trials: int = 30,
    seed: int = 0,
    bins: int = 100,
) -> FillCurve:
    """Cumulative fraction of grid bins ever visited versus executions.

    Each outer trial repeats the method max_executions times, marking the
    bins that contain final agents; the curve is averaged over trials with a
    2-sigma band.
    """
    if max_executions < 1:
        raise ValueError("max_executions must be at least 1")
    configs = configs or MethodConfigs()
    fractions = np.zeros((outer_trials, max_executions))
    total = bins * bins
    for t in range(outer_trials):
        visited = np.zeros((bins, bins), dtype=bool)
        for e in range(max_executions):
            ps = final_points(method, agents, env, configs, child_seed(seed, method, t, e))
            ix, iy = _bin_indices(ps.coords, env, bins)
            visited[iy, ix] = True
            fractions[t, e] = visited.sum() / total
    mean = fractions.mean(axis=0)
    sigma = fractions.std(axis=0)
    return FillCurve(
        executions=np.arange(1, max_executions + 1),
        mean_fraction=mean,
        lower=mean - 2 * sigma,
        upper=mean + 2 * sigma,
        trials=outer_trials,
    )


# --------------------------- scree ---------------------------


def pca_scree(points) -> np.ndarray:
    """Covariance eigenvalue fractions in descending order (sum to 1)."""
    coords = as_coords(points)
    dims, count = coords.shape
    if count <= dims:
        raise ValueError("scree needs more agents than dimensions")
    centered = coords - coords.mean(axis=1, keepdims=True)
    cov = centered @ centered.T / (count - 1)
    eigvals = np.linalg.eigvalsh(cov)[::-1]
    eigvals = np.clip(eigvals, 0.0, None)
    total = float(eigvals.sum())
    if total == 0.0:
        return np.zeros(dims)
    return eigvals / total


# --------------------------- raster Voronoi duals ---------------------------


def dual_degree_histogram(
    points,
    env: Environment,
    grid_resolution: int = 1000,
    interior_only: bool = False,
) -> dict[int, int]:
    """Histogram of Voronoi-adjacency degrees from a rasterised labelling.

    Each raster cell is labelled by its nearest agent; two agents are
    adjacent when their cells share a raster edge. With interior_only, only
    agents whose region never touches the raster border are counted.
    """
    coords = as_coords(points)
    if coords.shape[0] != 2:
        raise ValueError("dual degrees are computed for 2-D point sets only")
    if grid_resolution < 500:
        raise ValueError("grid_resolution must be at least 500")
    count = coords.shape[1]
    lo = np.asarray(env.domain.lower)
    hi = np.asarray(env.domain.upper)
    xs = lo[0] + (np.arange(grid_resolution) + 0.5) / grid_resolution * (hi[0] - lo[0])
    ys = lo[1] + (np.arange(grid_resolution) + 0.5) / grid_resolution * (hi[1] - lo[1])
    cols = coords.T
    labels = np.empty((grid_resolution, grid_resolution), dtype=np.int32)
    for r, y in enumerate(ys):
        row = np.stack([xs, np.full(grid_resolution, y)], axis=1)
        d2 = ((row[:, None, :] - cols[None, :, :]) ** 2).sum(axis=2)
        labels[r] = np.argmin(d2, axis=1)
    pairs = set()
    horizontal = labels[:, :-1] != labels[:, 1:]
    for a, b in zip(labels[:, :-1][horizontal], labels[:, 1:][horizontal]):
        pairs.add((min(a, b), max(a, b)))
    vertical = labels[:-1, :] != labels[1:, :]
    for a, b in zip(labels[:-1, :][vertical], labels[1:, :][vertical]):
        pairs.add((min(a, b), max(a, b)))
    degree = np.zeros(count, dtype=int)
    for a, b in pairs:
        degree[a] += 1
        degree[b] += 1
    keep = np.ones(count, dtype=bool)
    if interior_only:
        border = np.unique(
            np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])
        )
        keep[border] = False
    hist: dict[int, int] = {}
    for agent in range(count):
        if keep[agent]:
            deg = int(degree[agent])
            hist[deg] = hist.get(deg, 0) + 1
    return hist


def modal_degree(hist: dict[int, int]) -> int:
    """Most common degree; ties resolve to the smaller degree."""
    return min(sorted(hist), key=lambda k: (-hist[k], k))


# --------------------------- grid detector ---------------------------


def grid_emergence(points, k: int) -> bool:
    """Detect a k-by-k grid: per axis, splitting the sorted coordinates at
    the k-1 largest gaps yields clusters whose largest internal spread is
    at least 3x smaller than the smallest split gap."""
    coords = as_coords(points)
    for axis in range(coords.shape[0]):
        vals = np.sort(coords[axis])
        gaps = np.diff(vals)
        if len(gaps) < k - 1:
            return False
        split_idx = np.sort(np.argsort(gaps)[-(k - 1) :])
        groups = np.split(vals, split_idx + 1)
        spread = max(float(g.max() - g.min()) for g in groups)
        if float(gaps[split_idx].min()) <= 3.0 * spread:
            return False
    return True


# --------------------------- timing benchmark ---------------------------


def timing_benchmark(
    algorithms=("rao", "onnrao"),
    dims=(2, 3, 4, 5),
    agent_counts=(5, 10, 25, 50, 75),
    iters: int = 1000,
    seed: int = 0,
) -> list[BenchRow]:
    """Wall-clock seconds per sweep for every (algorithm, dims, agents) cell.

    Points are placed and normalised outside the timer; the timed run then
    performs exactly `iters` sweeps with convergence checks disabled.
    """
    rows = []
    for d in dims:
        env = Environment.unit_box(d)
        for count in agent_counts:
            rng = np.random.default_rng(child_seed(seed, "bench", d, count))
            start = PointSet(uniform_feasible(env, count, rng))
            ready = initialize(start, env, 1e-3, rng)
            for algorithm in algorithms:
                cfg = PartitionConfig(
                    algorithm=algorithm,
                    agents=count,
                    max_iters=iters,
                    seed=child_seed(seed, "bench", d, count, algorithm),
                )
                t0 = time.perf_counter()
                run(cfg, env, initial=ready, convergence=False, run_initialize=False)
                elapsed = time.perf_counter() - t0
                rows.append(BenchRow(algorithm, d, count, elapsed / iters))
    return rows


# --------------------------- report bundle ---------------------------


def evaluate_points(
    points,
    env: Environment,
    n_windows: int = 10_000,
    window_area: float | None = None,
    window_shape: str = "square",
    grid_resolution: int = 1000,
    seed: int = 0,
) -> EvalReport:
    """All point-set statistics bundled into one report."""
    cv1, cv2 = nn_cv(points)
    mean, var = window_density_test(
        points,
        env,
        n_windows=n_windows,
        window_area=window_area,
        shape=window_shape,
        rng=np.random.default_rng(child_seed(seed, "density")),
    )
    scree = pca_scree(points).tolist()
    duals = (
        dual_degree_histogram(points, env, grid_resolution) if env.dims == 2 else {}
    )
    return EvalReport(
        nn_cv=cv1,
        next_nn_cv=cv2,
        density_mean=mean,
        density_variance=var,
        scree=scree,
        dual_degree_hist=duals,
    )
