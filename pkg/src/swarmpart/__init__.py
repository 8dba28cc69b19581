"""Swarm-based spatial partitioning in N-dimensional boxed domains.

Public surface: geometry kernels, environments with obstacles and weighted
regions, the rao/onnrao repulsion partitioners, a Monte Carlo Lloyd baseline,
the evaluation statistics, and the PSO seeding harness.
"""

from .environment import (
    Box,
    Environment,
    Sphere,
    WeightedRegion,
    enforce_boundaries,
    environment_from_dict,
    feasible_volume,
    image_points,
    is_feasible,
    pair_weight,
    uniform_feasible,
)
from .geometry import (
    InsufficientAgentsError,
    PointSet,
    mean_nn_l1_per_dimension,
    nearest_neighbor,
    nearest_point_on_segment,
    two_nearest_neighbors,
    unit_vector,
)
from .partitioner import (
    ALGORITHMS,
    PartitionConfig,
    PartitionResult,
    expand_nn,
    expand_onn,
    initialize,
    run,
)

__version__ = "0.1.0"
