"""Configuration, initial data, experiment drivers, output and CLI."""

from .config import ExperimentConfig, apply_overrides, load_config, parse_config
from .initial import INITIAL_CONDITIONS, initial_condition
from .output import read_snapshot, write_energy_csv, write_error_csv, write_outputs, write_snapshot
from .studies import (
    ErrorTable,
    LadderRow,
    RunReport,
    convergence_study,
    cost_study,
    coupled_experiment,
    evolve,
    fit_order,
    reference_solution,
    time_ladder,
)

__all__ = [
    "ExperimentConfig",
    "apply_overrides",
    "load_config",
    "parse_config",
    "INITIAL_CONDITIONS",
    "initial_condition",
    "read_snapshot",
    "write_energy_csv",
    "write_error_csv",
    "write_outputs",
    "write_snapshot",
    "ErrorTable",
    "LadderRow",
    "RunReport",
    "convergence_study",
    "cost_study",
    "coupled_experiment",
    "evolve",
    "fit_order",
    "reference_solution",
    "time_ladder",
]
