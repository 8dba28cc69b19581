"""Feasible region: domain box, obstacles, weighted regions, boundary handling.

The feasible set is the domain box (inclusive) minus every obstacle interior.
Boundaries repel agents through mirror images: an agent near a surface sees
its own reflection across that surface and is pushed back by the same pair
rule used between agents. Everything here is immutable after construction and
safe to share across runs.

The scalar helpers suffixed ``_list`` operate on plain Python lists of floats;
they carry the partitioner's hot loop and are the single source of truth for
the geometry rules (the ndarray entry points wrap them).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .geometry import random_unit_vector

_SURFACE_EPS = 1e-9
_FEASIBILITY_SAMPLES = 100_000
_FEASIBILITY_SEED = 0x5EED


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by lower/upper corner vectors."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.asarray(self.lower, dtype=np.float64))
        hi = tuple(float(v) for v in np.asarray(self.upper, dtype=np.float64))
        if len(lo) != len(hi):
            raise ValueError("box corners must share a dimension")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError("box needs lower < upper in every dimension")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dims(self) -> int:
        return len(self.lower)

    def contains(self, x) -> bool:
        """Closed containment (boundary counts as inside)."""
        return all(lo <= v <= hi for v, lo, hi in zip(x, self.lower, self.upper))

    def interior_contains(self, x) -> bool:
        return all(lo < v < hi for v, lo, hi in zip(x, self.lower, self.upper))


@dataclass(frozen=True)
class Sphere:
    """Hypersphere given by center vector and radius."""

    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.asarray(self.center, dtype=np.float64))
        r = float(self.radius)
        if r <= 0.0:
            raise ValueError("sphere radius must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dims(self) -> int:
        return len(self.center)

    def contains(self, x) -> bool:
        return math.dist(x, self.center) <= self.radius

    def interior_contains(self, x) -> bool:
        return math.dist(x, self.center) < self.radius


Shape = Union[Box, Sphere]


@dataclass(frozen=True)
class WeightedRegion:
    """A shape whose interactions are scaled by a positive weight."""

    shape: Shape
    weight: float

    def __post_init__(self):
        if float(self.weight) <= 0.0:
            raise ValueError("region weight must be positive")
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True)
class Environment:
    """Domain box plus obstacles and weighted regions."""

    domain: Box
    obstacles: tuple = ()
    regions: tuple = ()
    # populated in __post_init__, not constructor arguments
    has_obstacles: bool = field(init=False, default=False)
    has_regions: bool = field(init=False, default=False)

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        object.__setattr__(self, "regions", tuple(self.regions))
        d = self.domain.dims
        for ob in self.obstacles:
            if ob.dims != d:
                raise ValueError("obstacle dimension does not match the domain")
            if not _shape_overlaps_box(ob, self.domain):
                raise ValueError("obstacle does not intersect the domain")
        for region in self.regions:
            if region.shape.dims != d:
                raise ValueError("region dimension does not match the domain")
        object.__setattr__(self, "has_obstacles", bool(self.obstacles))
        object.__setattr__(self, "has_regions", bool(self.regions))
        if self.obstacles:
            self._check_nonempty()

    def _check_nonempty(self):
        rng = np.random.default_rng(_FEASIBILITY_SEED)
        lo = np.asarray(self.domain.lower)
        hi = np.asarray(self.domain.upper)
        samples = rng.uniform(lo, hi, size=(_FEASIBILITY_SAMPLES, self.dims))
        if not np.any(is_feasible_many(self, samples)):
            raise ValueError("feasible set is empty: obstacles cover the sampled domain")

    @property
    def dims(self) -> int:
        return self.domain.dims

    @classmethod
    def unit_box(cls, dims: int = 2) -> "Environment":
        return cls(domain=Box(lower=(0.0,) * dims, upper=(1.0,) * dims))


def _shape_overlaps_box(shape: Shape, box: Box) -> bool:
    if isinstance(shape, Box):
        return all(
            slo < bhi and shi > blo
            for slo, shi, blo, bhi in zip(shape.lower, shape.upper, box.lower, box.upper)
        )
    nearest = [min(max(c, lo), hi) for c, lo, hi in zip(shape.center, box.lower, box.upper)]
    return math.dist(nearest, shape.center) <= shape.radius


def environment_from_dict(payload: dict) -> Environment:
    """Build an Environment from the CLI config mapping."""
    known = {"domain", "obstacles", "regions"}
    unknown = set(payload) - known
    if unknown:
        raise ValueError(f"unknown environment keys: {sorted(unknown)}")
    dom = payload.get("domain", {"lower": [0.0, 0.0], "upper": [1.0, 1.0]})
    domain = Box(lower=dom["lower"], upper=dom["upper"])
    obstacles = tuple(_shape_from_dict(ob) for ob in payload.get("obstacles", []))
    regions = tuple(
        WeightedRegion(shape=_shape_from_dict(r, extra={"weight"}), weight=r["weight"])
        for r in payload.get("regions", [])
    )
    return Environment(domain=domain, obstacles=obstacles, regions=regions)


def _shape_from_dict(payload: dict, extra: set = frozenset()) -> Shape:
    kind = payload.get("type")
    if kind == "box":
        allowed = {"type", "lower", "upper"} | extra
        if set(payload) - allowed:
            raise ValueError(f"unknown box keys: {sorted(set(payload) - allowed)}")
        return Box(lower=payload["lower"], upper=payload["upper"])
    if kind == "sphere":
        allowed = {"type", "center", "radius"} | extra
        if set(payload) - allowed:
            raise ValueError(f"unknown sphere keys: {sorted(set(payload) - allowed)}")
        return Sphere(center=payload["center"], radius=payload["radius"])
    raise ValueError(f"unknown shape type: {kind!r}")


# --------------------------- feasibility ---------------------------


def is_feasible_list(env: Environment, x) -> bool:
    for v, lo, hi in zip(x, env.domain.lower, env.domain.upper):
        if v < lo or v > hi:
            return False
    for ob in env.obstacles:
        if ob.interior_contains(x):
            return False
    return True


def is_feasible(env: Environment, p) -> bool:
    """True iff p lies in the domain box and outside every obstacle interior."""
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (env.dims,):
        raise ValueError(f"point dimension {p.shape} does not match domain dimension {env.dims}")
    return is_feasible_list(env, p.tolist())


def is_feasible_many(env: Environment, pts: np.ndarray) -> np.ndarray:
    """Vectorised feasibility over an (N, D) array of points."""
    pts = np.asarray(pts, dtype=np.float64)
    lo = np.asarray(env.domain.lower)
    hi = np.asarray(env.domain.upper)
    ok = np.all((pts >= lo) & (pts <= hi), axis=1)
    for ob in env.obstacles:
        if isinstance(ob, Box):
            inside = np.all(
                (pts > np.asarray(ob.lower)) & (pts < np.asarray(ob.upper)), axis=1
            )
        else:
            inside = np.sum((pts - np.asarray(ob.center)) ** 2, axis=1) < ob.radius**2
        ok &= ~inside
    return ok


def uniform_feasible(env: Environment, count: int, rng: np.random.Generator) -> np.ndarray:
    """(D, count) matrix of uniform random points in the feasible set (rejection sampling)."""
    lo = np.asarray(env.domain.lower)
    hi = np.asarray(env.domain.upper)
    out = []
    have = 0
    attempts = 0
    batch = max(4 * count, 128)
    while have < count:
        pts = rng.uniform(lo, hi, size=(batch, env.dims))
        pts = pts[is_feasible_many(env, pts)]
        out.append(pts)
        have += len(pts)
        attempts += batch
        if attempts > 20_000_000:
            raise RuntimeError("rejection sampling failed: feasible set too small")
    return np.concatenate(out, axis=0)[:count].T.copy()


# --------------------------- image points ---------------------------


def image_entries_list(env: Environment, x, threshold) -> list:
    """(mirror image, inward surface normal) pairs for every nearby boundary.

    Emission order is fixed: domain faces in dimension order (lower before
    upper), then obstacles in declaration order. Box obstacle faces only
    reflect agents whose projection falls on the face, so a box emits at most
    one image; sphere images reflect radially and are emitted only while the
    mirror stays inside the sphere. The normal points from the surface toward
    the agent's side; since agent minus image is parallel to it, it is the
    push direction and stays defined for an agent sitting exactly on the
    surface.
    """
    entries = []
    lo = env.domain.lower
    hi = env.domain.upper
    d = len(x)
    for i in range(d):
        gap = x[i] - lo[i]
        if gap < threshold[i]:
            img = list(x)
            img[i] = lo[i] - gap
            n = [0.0] * d
            n[i] = 1.0
            entries.append((img, n))
        gap = hi[i] - x[i]
        if gap < threshold[i]:
            img = list(x)
            img[i] = hi[i] + gap
            n = [0.0] * d
            n[i] = -1.0
            entries.append((img, n))
    for ob in env.obstacles:
        if isinstance(ob, Box):
            entry = _box_obstacle_image(ob, x, threshold)
        else:
            entry = _sphere_obstacle_image(ob, x, threshold)
        if entry is not None:
            entries.append(entry)
    return entries


def image_points_list(env: Environment, x, threshold) -> list:
    """Mirror images of x across every nearby boundary surface, as lists."""
    return [img for img, _ in image_entries_list(env, x, threshold)]


def _box_obstacle_image(ob: Box, x, threshold):
    d = len(x)
    for i in range(d):
        in_extent = True
        for e in range(d):
            if e != i and not (ob.lower[e] <= x[e] <= ob.upper[e]):
                in_extent = False
                break
        if not in_extent:
            continue
        if x[i] <= ob.lower[i] and ob.lower[i] - x[i] < threshold[i]:
            img = list(x)
            img[i] = 2.0 * ob.lower[i] - x[i]
            n = [0.0] * d
            n[i] = -1.0
            return img, n
        if x[i] >= ob.upper[i] and x[i] - ob.upper[i] < threshold[i]:
            img = list(x)
            img[i] = 2.0 * ob.upper[i] - x[i]
            n = [0.0] * d
            n[i] = 1.0
            return img, n
    return None


def _sphere_obstacle_image(ob: Sphere, x, threshold):
    delta = [v - c for v, c in zip(x, ob.center)]
    dist = math.sqrt(sum(v * v for v in delta))
    if dist == 0.0 or dist < ob.radius:
        return None
    gap = dist - ob.radius
    # threshold resolved along the surface normal; equals threshold[d] for a
    # wall orthogonal to axis d, so walls and spheres share one rule
    t_eff = math.sqrt(sum((t * v / dist) ** 2 for t, v in zip(threshold, delta)))
    if gap >= t_eff or gap >= ob.radius:
        return None
    scale = (2.0 * ob.radius - dist) / dist
    return [c + v * scale for c, v in zip(ob.center, delta)], [v / dist for v in delta]


def image_points(env: Environment, p, threshold) -> list[np.ndarray]:
    """ndarray wrapper over image_points_list."""
    p = np.asarray(p, dtype=np.float64)
    threshold = np.asarray(threshold, dtype=np.float64)
    return [np.array(img) for img in image_points_list(env, p.tolist(), threshold.tolist())]


# --------------------------- boundary enforcement ---------------------------


def enforce_boundaries_list(env: Environment, x: list, rng=None) -> None:
    """Clamp x (in place) into the domain and eject it from obstacle interiors.

    A point inside an obstacle is projected to the nearest surface point and
    pushed outward by a hair; a point at a sphere's exact center leaves in a
    random direction drawn from rng. Feasible input is left untouched.
    """
    lo = env.domain.lower
    hi = env.domain.upper
    for _ in range(16):
        for i in range(len(x)):
            if x[i] < lo[i]:
                x[i] = lo[i]
            elif x[i] > hi[i]:
                x[i] = hi[i]
        if not env.has_obstacles:
            return
        moved = False
        for ob in env.obstacles:
            if isinstance(ob, Box):
                if ob.interior_contains(x):
                    _eject_from_box(ob, x)
                    moved = True
            else:
                if ob.interior_contains(x):
                    _eject_from_sphere(ob, x, rng)
                    moved = True
        if not moved:
            return
        if is_feasible_list(env, x):
            return
    raise RuntimeError("boundary enforcement did not reach a feasible point")


def _eject_from_box(ob: Box, x: list) -> None:
    best_gap = math.inf
    best_dim = 0
    best_target = 0.0
    for i in range(len(x)):
        gap = x[i] - ob.lower[i]
        if gap < best_gap:
            best_gap, best_dim, best_target = gap, i, ob.lower[i] - _SURFACE_EPS
        gap = ob.upper[i] - x[i]
        if gap < best_gap:
            best_gap, best_dim, best_target = gap, i, ob.upper[i] + _SURFACE_EPS
    x[best_dim] = best_target


def _eject_from_sphere(ob: Sphere, x: list, rng) -> None:
    delta = [v - c for v, c in zip(x, ob.center)]
    dist = math.sqrt(sum(v * v for v in delta))
    r_out = ob.radius + _SURFACE_EPS
    if dist == 0.0:
        if rng is None:
            raise ValueError("point at sphere center: a seeded rng is required for the exit direction")
        direction = random_unit_vector(len(x), rng)
        for i in range(len(x)):
            x[i] = ob.center[i] + r_out * float(direction[i])
    else:
        for i in range(len(x)):
            x[i] = ob.center[i] + delta[i] * (r_out / dist)


def enforce_boundaries(env: Environment, p, rng=None) -> np.ndarray:
    """Feasible version of p: domain-clamped, outside all obstacle interiors."""
    x = np.asarray(p, dtype=np.float64).tolist()
    enforce_boundaries_list(env, x, rng)
    return np.array(x)


# --------------------------- weighted regions ---------------------------


def pair_weight_list(env: Environment, x, q) -> float:
    w = 1.0
    for region in env.regions:
        if region.shape.contains(x) or region.shape.contains(q):
            w *= region.weight
    return w


def pair_weight(env: Environment, p, q) -> float:
    """Product of the weights of all regions containing either endpoint."""
    if not env.has_regions:
        return 1.0
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    return pair_weight_list(env, p.tolist(), q.tolist())


# --------------------------- measure ---------------------------


def feasible_volume(env: Environment, samples: int = 100_000) -> float:
    """Volume of the feasible set; Monte Carlo estimate when obstacles exist."""
    lo = np.asarray(env.domain.lower)
    hi = np.asarray(env.domain.upper)
    box_volume = float(np.prod(hi - lo))
    if not env.has_obstacles:
        return box_volume
    rng = np.random.default_rng(_FEASIBILITY_SEED)
    pts = rng.uniform(lo, hi, size=(samples, env.dims))
    frac = float(np.mean(is_feasible_many(env, pts)))
    return box_volume * frac
