"""Version-space sampling for interpolating linear and random-feature classifiers."""

import json as _json

from ._core import (
    ConfigError,
    DataError,
    InfeasibleError,
    NumericalError,
    build_constraints,
    critical_value,
    empirical_errors,
    equicorr_dataset,
    error_cdf,
    feasible_arc,
    limit_cdf,
    next_point_correct_asymptotic,
    next_point_correct_exact,
    orthant_asymptotic,
    orthant_quadrature,
    population_errors_gaussian,
    random_relu_features,
    sample_gaussian_mixture,
    sample_version_space,
    simulate_equicorr_rn,
    worst_case_classifier,
)
from ._core import run_experiment as _run_experiment

__version__ = "0.1.0"


def run_experiment(task, config=None, out_dir="."):
    """Runs `task` with a config dict and returns the run record as a dict."""
    return _json.loads(_run_experiment(task, _json.dumps(config or {}), str(out_dir)))
