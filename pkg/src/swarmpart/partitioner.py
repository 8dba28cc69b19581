"""Repulsive-agent spatial partitioning.

Two algorithms share one outer loop:

* ``rao``    -- agents repel their nearest neighbors whenever every
  per-dimension offset is below a growing target gap.
* ``onnrao`` -- additionally, each agent is pushed away from the segment
  joining its two nearest neighbors, which breaks collinear stacking.

A run normalizes the random start (attract/repel toward the mean nearest
neighbor offset), then alternates repulsion sweeps while the target-gap
multiplier ratchets up by ``tolerance_converge * expand_by`` per iteration.
Boundaries hold agents in place through mirror-image repulsion; a run is
converged once the swarm's expansion has saturated against them (the summed
mean nearest neighbor gap stops growing for ``stall_sweeps`` iterations while
the orthogonal step is still active), or it stops at ``max_iters``.

Update order is sequential and in place (agent p's move is visible to every
later pair in the same sweep), which makes runs bit-reproducible for a fixed
seed. The sweeps work on plain Python floats; numpy is used only for the
per-sweep neighbor tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import (
    Environment,
    enforce_boundaries_list,
    image_entries_list,
    is_feasible_many,
    pair_weight_list,
    uniform_feasible,
)
from .geometry import InsufficientAgentsError, PointSet, as_coords, random_unit_vector

ALGORITHMS = ("rao", "onnrao")


@dataclass(frozen=True)
class PartitionConfig:
    """Algorithm selection, tolerances and iteration budget for one run.

    ``tolerance_converge * expand_by`` is the per-iteration growth of the
    target-gap multiplier. A run is converged once the swarm's summed mean
    nearest neighbor gap makes no progress for ``stall_sweeps`` consecutive
    iterations while the orthogonal step is still displacing agents, i.e. the
    expansion has saturated against the boundaries. Plain rao has no
    orthogonal step and in practice runs its full budget, which is why
    ``max_iters`` is the operative stop for it.
    """

    algorithm: str = "onnrao"
    agents: int = 25
    tolerance_converge: float = 1e-4
    tolerance_normalization: float = 1e-3
    max_iters: int = 10_000
    expand_by: float = 1.0
    seed: int = 0
    stall_sweeps: int = 550

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.agents < 2:
            raise InsufficientAgentsError("partitioning needs at least 2 agents")
        if self.algorithm == "onnrao" and self.agents < 3:
            raise InsufficientAgentsError("onnrao needs at least 3 agents")
        if self.tolerance_converge <= 0.0 or self.tolerance_normalization <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.expand_by <= 0.0:
            raise ValueError("expand_by must be positive")
        if self.stall_sweeps < 1:
            raise ValueError("stall_sweeps must be at least 1")


@dataclass
class PartitionResult:
    """Final agent positions plus the convergence trace of the run."""

    points: PointSet
    iterations_used: int
    converged: bool
    diff_trace: list[float]
    mean_expand_final: float
    ssd_trace: list[float]
    init_sweeps: int
    config: PartitionConfig


# --------------------------- sweep-entry tables ---------------------------


def _coords_matrix(x: list[list[float]]) -> np.ndarray:
    return np.asarray(x, dtype=np.float64).T


def _nn_table(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, :, None] - coords[:, None, :]
    d2 = np.einsum("dij,dij->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    return np.argmin(d2, axis=0)


def _mean_nn_gaps(coords: np.ndarray) -> np.ndarray:
    """Swarm mean L1 nearest neighbor distance, broadcast per dimension.

    The scalar form keeps every dimension's repulsion alive when the swarm
    organises into axis-aligned rows (a per-dimension mean collapses toward
    zero across a flattened dimension and freezes expansion there).
    """
    nn = _nn_table(coords)
    l1 = np.abs(coords[:, nn] - coords).sum(axis=0)
    return np.full(coords.shape[0], float(np.mean(l1)))


def _two_nn_table(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    diff = coords[:, :, None] - coords[:, None, :]
    d2 = np.einsum("dij,dij->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=0, kind="stable")
    return order[0], order[1]


def _segment_feet(coords: np.ndarray, nn: np.ndarray, nxt: np.ndarray) -> np.ndarray:
    """Per-agent nearest point on the segment joining its two nearest neighbors."""
    a = coords[:, nn]
    b = coords[:, nxt]
    ab = b - a
    denom = np.einsum("dp,dp->p", ab, ab)
    t = np.einsum("dp,dp->p", coords - a, ab)
    safe = denom > 0.0
    t[safe] /= denom[safe]
    t[~safe] = 0.0
    np.clip(t, 0.0, 1.0, out=t)
    return a + t * ab


# --------------------------- displacement kernel ---------------------------


def _unit_between(from_v: list, to_v: list, rng) -> list:
    delta = [t - f for f, t in zip(from_v, to_v)]
    norm = math.sqrt(sum(v * v for v in delta))
    if norm == 0.0:
        return [float(v) for v in random_unit_vector(len(delta), rng)]
    return [v / norm for v in delta]


def _enforce_with_images(env: Environment, xi: list, gaps: list, rng) -> None:
    """Clamp xi feasible, then push it off every nearby boundary mirror.

    Each image within the gap threshold in every dimension contributes the
    one-sided pair displacement along the generating surface's normal (agent
    minus mirror is parallel to it, and it stays defined for an agent sitting
    exactly on the surface). Pushes are resolved from xi's position before
    any of them is applied, then xi is re-clamped.
    """
    enforce_boundaries_list(env, xi, rng)
    if not env.has_obstacles:
        # cheap reject: no image can exist when no wall is within range
        lo = env.domain.lower
        hi = env.domain.upper
        near = False
        for d in range(len(xi)):
            if xi[d] - lo[d] < gaps[d] or hi[d] - xi[d] < gaps[d]:
                near = True
                break
        if not near:
            return
    entries = image_entries_list(env, xi, gaps)
    if not entries:
        return
    total = [0.0] * len(xi)
    for q, normal in entries:
        offs = [abs(a - b) for a, b in zip(xi, q)]
        if all(o < g for o, g in zip(offs, gaps)):
            w = pair_weight_list(env, xi, q) if env.has_regions else 1.0
            for d in range(len(xi)):
                total[d] += w * (gaps[d] - offs[d]) * normal[d] * 0.5
    for d in range(len(xi)):
        xi[d] += total[d]
    enforce_boundaries_list(env, xi, rng)


# --------------------------- sweeps ---------------------------


def _nn_sweep(x: list[list[float]], env: Environment, mean_expand: float, rng) -> list[float]:
    """One in-place nearest-neighbor repulsion sweep.

    The target gap is the swarm mean L1 nearest neighbor distance times
    mean_expand, applied in every dimension. Every ordered pair closer than
    the gap in all dimensions is pushed apart symmetrically (clamped feasible
    right away); after its pair scan each agent passes through the boundary
    phase, where nearby wall and obstacle mirrors repel it once per sweep.
    Returns the raw gap vector measured at sweep entry.
    """
    P = len(x)
    D = len(x[0])
    raw_gaps = _mean_nn_gaps(_coords_matrix(x))
    gaps = (raw_gaps * mean_expand).tolist()
    has_regions = env.has_regions
    for p in range(P):
        xp = x[p]
        for j in range(P):
            if j == p:
                continue
            xj = x[j]
            trigger = True
            for d in range(D):
                od = xp[d] - xj[d]
                if od < 0.0:
                    od = -od
                if od >= gaps[d]:
                    trigger = False
                    break
            if not trigger:
                continue
            offs = [abs(a - b) for a, b in zip(xp, xj)]
            w = pair_weight_list(env, xp, xj) if has_regions else 1.0
            u = _unit_between(xj, xp, rng)
            delta = [w * (g - o) * ud * 0.5 for g, o, ud in zip(gaps, offs, u)]
            for d in range(D):
                xp[d] += delta[d]
            enforce_boundaries_list(env, xp, rng)
            for d in range(D):
                xj[d] -= delta[d]
            enforce_boundaries_list(env, xj, rng)
        _enforce_with_images(env, xp, gaps, rng)
    return raw_gaps.tolist()


def _onn_sweep(x: list[list[float]], env: Environment, rng) -> int:
    """One in-place orthogonal-repulsion sweep.

    Each agent closer to the segment joining its two nearest neighbors than
    the swarm mean orthogonal distance is pushed off the segment; the push is
    componentwise (mean orthogonal offset minus own offset), so it dies out
    as orthogonal offsets equalise. Every agent is boundary enforced with
    image repulsion afterwards; neighbor segments are frozen at sweep entry.
    Returns how many agents the orthogonal push displaced.
    """
    P = len(x)
    D = len(x[0])
    coords = _coords_matrix(x)
    nn, nxt = _two_nn_table(coords)
    feet = _segment_feet(coords, nn, nxt)
    dists = np.sqrt(np.einsum("dp,dp->p", coords - feet, coords - feet))
    mean_dist = float(np.mean(dists))
    gaps = np.mean(np.abs(feet - coords), axis=1).tolist()
    feet_rows = feet.T.tolist()
    dist_list = dists.tolist()
    has_regions = env.has_regions
    displaced = 0
    for p in range(P):
        xp = x[p]
        if dist_list[p] < mean_dist:
            displaced += 1
            foot = feet_rows[p]
            offs = [abs(a - b) for a, b in zip(xp, foot)]
            w = pair_weight_list(env, xp, foot) if has_regions else 1.0
            u = _unit_between(foot, xp, rng)
            for d in range(D):
                xp[d] += w * (gaps[d] - offs[d]) * u[d] * 0.5
        _enforce_with_images(env, xp, gaps, rng)
    return displaced


def _normalize_sweep(x: list[list[float]], env: Environment, rng) -> None:
    """One attract-or-repel sweep toward the mean nearest neighbor offsets."""
    P = len(x)
    D = len(x[0])
    coords = _coords_matrix(x)
    nn = _nn_table(coords).tolist()
    gaps = np.mean(np.abs(coords[:, nn] - coords), axis=1).tolist()
    for p in range(P):
        xp = x[p]
        xn = x[nn[p]]
        offs = [abs(a - b) for a, b in zip(xp, xn)]
        u = _unit_between(xn, xp, rng)
        for d in range(D):
            xp[d] += (gaps[d] - offs[d]) * u[d] * 0.5
        enforce_boundaries_list(env, xp, rng)


def _net_diff(x: list[list[float]], before: list[list[float]]) -> tuple[float, float]:
    """(mean |net per-dimension displacement|, summed squared displacement)."""
    P = len(x)
    D = len(x[0])
    diff = 0.0
    ssd = 0.0
    for d in range(D):
        net = 0.0
        for p in range(P):
            step = x[p][d] - before[p][d]
            net += step
            ssd += step * step
        diff += abs(net)
    return diff / D, ssd


# --------------------------- public operations ---------------------------


def initialize(points, env: Environment, threshold: float, rng, max_sweeps: int = 10_000) -> PointSet:
    """Normalize a random point set so nearest neighbor offsets approach their mean.

    Sweeps move every agent half the per-dimension gap between its nearest
    neighbor offset and the swarm mean (toward the neighbor if too far, away
    if too close) until the net swarm displacement drops below threshold.
    """
    x = _as_rows(points, minimum=2)
    if threshold <= 0.0:
        raise ValueError("threshold must be positive")
    for _ in range(max_sweeps):
        before = [row[:] for row in x]
        _normalize_sweep(x, env, rng)
        diff, _ = _net_diff(x, before)
        if diff < threshold:
            break
    return _as_pointset(x)


def expand_nn(points, env: Environment, mean_expand: float, rng) -> PointSet:
    """One nearest-neighbor repulsion sweep at the given gap multiplier."""
    if mean_expand < 1.0:
        raise ValueError("mean_expand must be at least 1")
    x = _as_rows(points, minimum=2)
    _nn_sweep(x, env, mean_expand, rng)
    return _as_pointset(x)


def expand_onn(points, env: Environment, rng) -> PointSet:
    """One orthogonal repulsion sweep off nearest-neighbor segments."""
    x = _as_rows(points, minimum=3)
    _onn_sweep(x, env, rng)
    return _as_pointset(x)


def run(
    config: PartitionConfig,
    env: Environment,
    initial: PointSet | None = None,
    *,
    check_feasibility: bool = False,
    run_initialize: bool = True,
    convergence: bool = True,
) -> PartitionResult:
    """Execute a full partitioning run.

    Starts from ``initial`` (all points must be feasible) or from seeded
    uniform rejection sampling. ``check_feasibility`` asserts after every
    sweep that no agent violates the environment, ``run_initialize=False``
    skips the normalization phase and ``convergence=False`` forces exactly
    ``max_iters`` sweeps; the last two exist for benchmarking.
    """
    rng = np.random.default_rng(config.seed)
    if initial is None:
        coords = uniform_feasible(env, config.agents, rng)
    else:
        coords = as_coords(initial).copy()
        if coords.shape[0] != env.dims:
            raise ValueError("initial points do not match the environment dimension")
        if not bool(np.all(is_feasible_many(env, coords.T))):
            raise ValueError("initial points must be feasible")
    x = coords.T.tolist()
    _require_agents(len(x), config.algorithm)

    init_sweeps = 0
    if run_initialize:
        for _ in range(10_000):
            before = [row[:] for row in x]
            _normalize_sweep(x, env, rng)
            init_sweeps += 1
            diff, _ = _net_diff(x, before)
            if diff < config.tolerance_normalization:
                break

    onnrao = config.algorithm == "onnrao"
    mean_expand = 1.0
    diff_trace: list[float] = []
    ssd_trace: list[float] = []
    converged = False
    iters = 0
    # saturation detector: converged once the summed mean nearest neighbor
    # gap grows by less than 60% of the schedule rate over a full window of
    # stall_sweeps iterations while the orthogonal step still stirs agents
    growth = config.tolerance_converge * config.expand_by
    window = config.stall_sweeps
    required = 1.0 + 0.6 * growth * window
    scale_history: list[float] = []
    stirring = False
    while iters < config.max_iters:
        mean_expand += growth
        iters += 1
        before = [row[:] for row in x]
        if onnrao:
            stirring = _onn_sweep(x, env, rng) > 0
        raw_gaps = _nn_sweep(x, env, mean_expand, rng)
        diff, ssd = _net_diff(x, before)
        diff_trace.append(diff)
        ssd_trace.append(ssd)
        if check_feasibility:
            arr = np.asarray(x)
            if not np.all(np.isfinite(arr)):
                raise FloatingPointError("non-finite coordinates during run")
            if not bool(np.all(is_feasible_many(env, arr))):
                raise AssertionError(f"infeasible agent after iteration {iters}")
        scale_history.append(sum(raw_gaps))
        if (
            convergence
            and stirring
            and len(scale_history) > window
            and scale_history[-1] < scale_history[-1 - window] * required
        ):
            converged = True
            break

    return PartitionResult(
        points=_as_pointset(x),
        iterations_used=iters,
        converged=converged,
        diff_trace=diff_trace,
        mean_expand_final=mean_expand,
        ssd_trace=ssd_trace,
        init_sweeps=init_sweeps,
        config=config,
    )


def _require_agents(count: int, algorithm: str) -> None:
    if count < 2:
        raise InsufficientAgentsError("partitioning needs at least 2 agents")
    if algorithm == "onnrao" and count < 3:
        raise InsufficientAgentsError("onnrao needs at least 3 agents")


def _as_rows(points, minimum: int) -> list[list[float]]:
    coords = as_coords(points)
    if coords.shape[1] < minimum:
        raise InsufficientAgentsError(f"operation needs at least {minimum} agents")
    return coords.T.tolist()


def _as_pointset(x: list[list[float]]) -> PointSet:
    return PointSet(np.asarray(x, dtype=np.float64).T)
