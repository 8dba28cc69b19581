"""Naive line-by-line re-implementation of the repulsion sweeps.

Deliberately unoptimized: brute-force neighbor scans, no candidate skipping,
no vectorisation. The real sweeps must agree with these to 1e-12 per
coordinate on identical inputs and identically seeded rngs; any divergence
flags a bug in the optimized update order, trigger logic or displacement
arithmetic.

The boundary subroutines (clamping, image generation, region weights) are the
library primitives; what this module re-derives independently is the sweep
structure built on top of them.
"""

import math

from swarmpart.environment import (
    enforce_boundaries_list,
    image_entries_list,
    pair_weight_list,
)
from swarmpart.geometry import random_unit_vector


def _unit(from_v, to_v, rng):
    delta = [t - f for f, t in zip(from_v, to_v)]
    norm = math.sqrt(sum(v * v for v in delta))
    if norm == 0.0:
        return [float(v) for v in random_unit_vector(len(delta), rng)]
    return [v / norm for v in delta]


def _enforce_with_images(env, xi, gaps, rng):
    enforce_boundaries_list(env, xi, rng)
    total = [0.0] * len(xi)
    for q, normal in image_entries_list(env, xi, gaps):
        offs = [abs(a - b) for a, b in zip(xi, q)]
        if all(o < g for o, g in zip(offs, gaps)):
            w = pair_weight_list(env, xi, q)
            for d in range(len(xi)):
                total[d] += w * (gaps[d] - offs[d]) * normal[d] * 0.5
    for d in range(len(xi)):
        xi[d] += total[d]
    enforce_boundaries_list(env, xi, rng)


def _nearest(x, p):
    best_d2 = math.inf
    best = -1
    for q in range(len(x)):
        if q == p:
            continue
        d2 = sum((a - b) ** 2 for a, b in zip(x[p], x[q]))
        if d2 < best_d2:
            best_d2 = d2
            best = q
    return best


def nn_sweep_reference(x, env, mean_expand, rng):
    """One nearest-neighbor repulsion sweep, transcribed naively, in place."""
    count = len(x)
    dims = len(x[0])

    total_l1 = 0.0
    for p in range(count):
        nn = _nearest(x, p)
        total_l1 += sum(abs(x[nn][d] - x[p][d]) for d in range(dims))
    gaps = [total_l1 / count * mean_expand] * dims

    for p in range(count):
        for j in range(count):
            if j == p:
                continue
            offs = [abs(a - b) for a, b in zip(x[p], x[j])]
            if all(o < g for o, g in zip(offs, gaps)):
                w = pair_weight_list(env, x[p], x[j])
                u = _unit(x[j], x[p], rng)
                delta = [w * (g - o) * ud * 0.5 for g, o, ud in zip(gaps, offs, u)]
                for d in range(dims):
                    x[p][d] += delta[d]
                enforce_boundaries_list(env, x[p], rng)
                for d in range(dims):
                    x[j][d] -= delta[d]
                enforce_boundaries_list(env, x[j], rng)
        _enforce_with_images(env, x[p], gaps, rng)
    return x


def _segment_foot(a, b, p):
    ab = [bb - aa for aa, bb in zip(a, b)]
    denom = sum(v * v for v in ab)
    if denom == 0.0:
        return list(a)
    t = sum((pp - aa) * v for pp, aa, v in zip(p, a, ab)) / denom
    t = min(1.0, max(0.0, t))
    return [aa + t * v for aa, v in zip(a, ab)]


def onn_sweep_reference(x, env, rng):
    """One orthogonal repulsion sweep, transcribed naively, in place."""
    count = len(x)
    dims = len(x[0])

    feet = []
    dists = []
    for p in range(count):
        ranked = sorted(
            (sum((a - b) ** 2 for a, b in zip(x[p], x[q])), q)
            for q in range(count)
            if q != p
        )
        nn, nxt = ranked[0][1], ranked[1][1]
        foot = _segment_foot(x[nn], x[nxt], x[p])
        feet.append(foot)
        dists.append(math.sqrt(sum((a - b) ** 2 for a, b in zip(x[p], foot))))

    mean_dist = sum(dists) / count
    gaps = [0.0] * dims
    for p in range(count):
        for d in range(dims):
            gaps[d] += abs(feet[p][d] - x[p][d])
    gaps = [g / count for g in gaps]

    for p in range(count):
        if dists[p] < mean_dist:
            foot = feet[p]
            offs = [abs(a - b) for a, b in zip(x[p], foot)]
            w = pair_weight_list(env, x[p], foot)
            u = _unit(foot, x[p], rng)
            for d in range(dims):
                x[p][d] += w * (gaps[d] - offs[d]) * u[d] * 0.5
        _enforce_with_images(env, x[p], gaps, rng)
    return x
