"""Simulation and existence checks for fractional neutral stochastic systems."""

from ._fracsee import (
    FracseeError,
    check_existence,
    fractional_integral,
    heat_example_config,
    ml_eval,
    relaxation_S,
    relaxation_T,
    resolve_constants,
    run_cli,
    scale_growth_constants,
    simulate,
)

__all__ = [
    "FracseeError",
    "check_existence",
    "fractional_integral",
    "heat_example_config",
    "ml_eval",
    "relaxation_S",
    "relaxation_T",
    "resolve_constants",
    "run_cli",
    "scale_growth_constants",
    "simulate",
]
