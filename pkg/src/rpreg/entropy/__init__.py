from .calibration import calibrate_constant, clear_cache
from .estimators import (
    KINDS,
    EntropyEstimate,
    EstimatorSpec,
    estimate,
    kdp_entropy,
    log_unit_ball_volume,
    renyi_knn,
    renyi_knn_graph,
    renyi_mst,
    shannon_knn,
    shannon_wknn,
)
from .kdp import kdp_cells
from .neighbors import knn_distances, mst_edge_lengths
from .wknn import WknnWeights, solve_wknn_weights

__all__ = [
    "KINDS",
    "EntropyEstimate",
    "EstimatorSpec",
    "WknnWeights",
    "calibrate_constant",
    "clear_cache",
    "estimate",
    "kdp_cells",
    "kdp_entropy",
    "knn_distances",
    "log_unit_ball_volume",
    "mst_edge_lengths",
    "renyi_knn",
    "renyi_knn_graph",
    "renyi_mst",
    "shannon_knn",
    "shannon_wknn",
    "solve_wknn_weights",
]
