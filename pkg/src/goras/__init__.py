"""Skeleton-sequence alignment by reparameterization to a universal standard timescale."""

from .liegroup import Pose, Twist, WeightMatrix, build_weight_matrix, unit_sphere_weight
from .skeleton import Reparameterization, SkeletonSequence

__version__ = "0.1.0"

__all__ = [
    "Pose",
    "Reparameterization",
    "SkeletonSequence",
    "Twist",
    "WeightMatrix",
    "build_weight_matrix",
    "unit_sphere_weight",
]
