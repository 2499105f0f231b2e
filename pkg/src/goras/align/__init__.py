"""UST alignment (GORA-S), DTW baselines and error metrics."""

from .dtw import dtw_align, dtw_path, fastdtw_align, fastdtw_path
from .metrics import AlignmentOutcome, alignment_inefficiency, frame_distance, sequence_error
from .ust import (
    UstConfig,
    UstResult,
    compute_g,
    evaluate_functional,
    pairwise_align_gora,
    ust_reparameterize,
)

__all__ = [
    "AlignmentOutcome",
    "UstConfig",
    "UstResult",
    "alignment_inefficiency",
    "compute_g",
    "dtw_align",
    "dtw_path",
    "evaluate_functional",
    "fastdtw_align",
    "fastdtw_path",
    "frame_distance",
    "pairwise_align_gora",
    "sequence_error",
    "ust_reparameterize",
]
