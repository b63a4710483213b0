"""Experiment runner: figure reproductions, bound suites and completion."""
from .config import ExperimentConfig, load_config, parse_config
from .scenarios import (
    complete_matrix,
    fit_thm1_constant,
    run_bound_suite,
    run_figure1,
    run_figure2,
    run_oracle,
    run_sigma_min,
)
