"""Fractional-order reset control toolkit.

Simulates reset control loops (Clegg integrator, FORE, fractional Clegg
integrator) with Grünwald–Letnikov fractional-order stepping, evaluates
describing functions, and certifies closed-loop stability through the
H_beta strict-positive-realness test.
"""

from ._core import (
    ToolkitError,
    bundled_scenario,
    bundled_scenario_names,
    describing_function,
    gl_weights,
    lyapunov_solve,
    matrix_fractional_power,
    numerical_df,
    phase_lead,
    reproduce_paper,
    run_scenario,
    simulate_metrics,
    stability_json,
)

__version__ = "0.1.0"

__all__ = [
    "ToolkitError",
    "bundled_scenario",
    "bundled_scenario_names",
    "describing_function",
    "gl_weights",
    "lyapunov_solve",
    "matrix_fractional_power",
    "numerical_df",
    "phase_lead",
    "reproduce_paper",
    "run_scenario",
    "simulate_metrics",
    "stability_json",
]
