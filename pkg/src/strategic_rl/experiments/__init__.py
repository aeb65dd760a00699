from .aggregate import UNSOLVED, aggregate, episodes_to_solve, mean_std, median_solve
from .config import ENVIRONMENTS, ConfigError, ExperimentConfig, load_config, parse_config
from .harness import (HEADER, MetricsRecord, build_environment, evaluated_episodes, read_metrics,
                      run_experiment, run_seed, target_visit_fraction)

__all__ = [
    "ENVIRONMENTS", "HEADER", "UNSOLVED", "ConfigError", "ExperimentConfig", "MetricsRecord", "aggregate",
    "build_environment", "episodes_to_solve", "evaluated_episodes", "load_config", "mean_std",
    "median_solve", "parse_config", "read_metrics", "run_experiment", "run_seed", "target_visit_fraction",
]
