from .experiment import ExperimentConfig, prepare_dataset, run_experiment, speedup_table
from .stats import BoxStats, box_stats

__all__ = ["BoxStats", "ExperimentConfig", "box_stats", "prepare_dataset", "run_experiment", "speedup_table"]
