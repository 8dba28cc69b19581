"""Dimension-generic vector kernels: neighbor queries, segment projection, unit vectors.

All coordinates are float64. Agent sets are stored as a D x P matrix whose
column p holds agent p. Neighbor queries are brute force (the agent counts
this library targets are small); a spatial index is a possible extension
point, not implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InsufficientAgentsError(ValueError):
    """Raised when an operation needs more agents than the point set holds."""


@dataclass
class PointSet:
    """A D x P matrix of agent coordinates; column p is agent p."""

    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 2:
            raise ValueError(f"coords must be a 2-D (dims x count) array, got shape {coords.shape}")
        if coords.shape[0] < 1:
            raise ValueError("point set needs at least one dimension")
        if coords.size and not np.all(np.isfinite(coords)):
            raise ValueError("coordinates must be finite")
        self.coords = coords

    @property
    def dims(self) -> int:
        return self.coords.shape[0]

    @property
    def count(self) -> int:
        return self.coords.shape[1]

    def copy(self) -> "PointSet":
        return PointSet(self.coords.copy())

    def column(self, p: int) -> np.ndarray:
        return self.coords[:, p].copy()


def as_coords(points) -> np.ndarray:
    """Coerce a PointSet or array-like to a (D, P) float64 matrix."""
    if isinstance(points, PointSet):
        return points.coords
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a (dims x count) coordinate matrix")
    return arr


def pairwise_sq_dists(coords: np.ndarray) -> np.ndarray:
    """(P, P) matrix of squared Euclidean distances between columns."""
    diff = coords[:, :, None] - coords[:, None, :]
    return np.einsum("dij,dij->ij", diff, diff)


def nearest_neighbor_indices(points) -> np.ndarray:
    """Index of each agent's nearest neighbor; distance ties go to the lowest index."""
    coords = as_coords(points)
    if coords.shape[1] < 2:
        raise InsufficientAgentsError("nearest neighbor queries need at least 2 agents")
    d2 = pairwise_sq_dists(coords)
    np.fill_diagonal(d2, np.inf)
    # argmin returns the first (lowest-index) minimiser, which is the tie rule.
    return np.argmin(d2, axis=0)


def nearest_neighbor(points, p: int) -> int:
    """Nearest neighbor of agent p by Euclidean distance (ties: lowest index)."""
    coords = as_coords(points)
    if coords.shape[1] < 2:
        raise InsufficientAgentsError("nearest neighbor queries need at least 2 agents")
    d2 = np.einsum("dj,dj->j", coords - coords[:, p : p + 1], coords - coords[:, p : p + 1])
    d2[p] = np.inf
    return int(np.argmin(d2))


def two_nearest_indices(points) -> tuple[np.ndarray, np.ndarray]:
    """(nearest, next-nearest) index arrays for every agent, lowest-index tie rule."""
    coords = as_coords(points)
    if coords.shape[1] < 3:
        raise InsufficientAgentsError("next-nearest queries need at least 3 agents")
    d2 = pairwise_sq_dists(coords)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=0, kind="stable")
    return order[0], order[1]


def two_nearest_neighbors(points, p: int) -> tuple[int, int]:
    """The two closest agents to p, ordered by distance then index."""
    coords = as_coords(points)
    if coords.shape[1] < 3:
        raise InsufficientAgentsError("next-nearest queries need at least 3 agents")
    d2 = np.einsum("dj,dj->j", coords - coords[:, p : p + 1], coords - coords[:, p : p + 1])
    d2[p] = np.inf
    order = np.argsort(d2, kind="stable")
    return int(order[0]), int(order[1])


def nearest_point_on_segment(a, b, p) -> np.ndarray:
    """Orthogonal projection of p onto segment [a, b], clamped to the endpoints.

    A degenerate segment (a == b) returns a.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return a.copy()
    t = float((p - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    return a + t * ab


def unit_vector(from_v, to_v, rng: np.random.Generator | None = None) -> np.ndarray:
    """Unit vector pointing from from_v to to_v.

    Coincident endpoints fall back to a random unit direction drawn from rng,
    so repeated overlap never freezes an agent. The rng must be supplied by
    the caller (it is the run's seeded stream, never a global).
    """
    from_v = np.asarray(from_v, dtype=np.float64)
    to_v = np.asarray(to_v, dtype=np.float64)
    delta = to_v - from_v
    norm = float(np.sqrt(delta @ delta))
    if norm == 0.0:
        if rng is None:
            raise ValueError("coincident points: a seeded rng is required for the fallback direction")
        return random_unit_vector(from_v.shape[0], rng)
    return delta / norm


def random_unit_vector(dims: int, rng: np.random.Generator) -> np.ndarray:
    """Isotropic random unit vector."""
    while True:
        v = rng.standard_normal(dims)
        norm = float(np.sqrt(v @ v))
        if norm > 0.0:
            return v / norm


def mean_nn_l1_per_dimension(points) -> np.ndarray:
    """Per-dimension mean absolute offset between each agent and its nearest neighbor.

    Component d is mean_p |NN(p)_d - p_d|. This is the swarm's mean nearest
    neighbor L1 distance resolved per dimension, the spacing scale the
    repulsion sweeps expand against.
    """
    coords = as_coords(points)
    nn = nearest_neighbor_indices(coords)
    return np.mean(np.abs(coords[:, nn] - coords), axis=1)
