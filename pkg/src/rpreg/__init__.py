"""Random-projection ensemble entropy estimation for image registration."""
from .ensemble import GroupPlan, baseline_entropy, ensemble_entropy, make_plan
from .entropy import EntropyEstimate, EstimatorSpec, estimate
from .features import FeatureSet, extract_patch, joint_features
from .image_io import ImageGrid, PixelRect, load_image, rotate, sobel_magnitude, valid_region
from .registration import (
    AngleGrid,
    EntropyObjective,
    NormObjective,
    SweepResult,
    objective_entropy,
    objective_norm,
    paper_angle_grid,
    sweep,
)
from .rproj import ProjectionMatrix, gaussian_matrix, project

__version__ = "0.1.0"
