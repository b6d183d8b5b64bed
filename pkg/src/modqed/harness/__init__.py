"""Config-driven runs, CSV emission, comparisons, sweeps, and the CLI."""

from .config import ExperimentConfig, build_config, load_config, load_config_dict
from .runner import (
    ComparisonReport,
    compare,
    read_trajectory_csv,
    resonance_table,
    run,
    select_builder,
    write_trajectory_csv,
)
from .sweep import load_sweep, sweep, write_sweep_csv

__all__ = [
    "ExperimentConfig",
    "build_config",
    "load_config",
    "load_config_dict",
    "ComparisonReport",
    "compare",
    "read_trajectory_csv",
    "resonance_table",
    "run",
    "select_builder",
    "write_trajectory_csv",
    "load_sweep",
    "sweep",
    "write_sweep_csv",
]
