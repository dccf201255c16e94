"""Viscous upwind schemes for 2x2 linear hyperbolic systems with boundary feedback."""
from .harness import ExperimentConfig, reproduce_table, run_case
from .lyapunov import decay_rates, discrete_lyapunov, verify_k_conditions
from .models import SteadyState, SystemSpec, build_system
from .scheme import (FeedbackMatrix, build_discretization, close_boundaries,
                     diffusion_coefficients, step_plain_upwind, step_viscous_upwind)
from .simulation import CaseConfig, simulate

__all__ = [
    "CaseConfig", "ExperimentConfig", "FeedbackMatrix", "SteadyState", "SystemSpec",
    "build_discretization", "build_system", "close_boundaries", "decay_rates",
    "diffusion_coefficients", "discrete_lyapunov", "reproduce_table", "run_case",
    "simulate", "step_plain_upwind", "step_viscous_upwind", "verify_k_conditions",
]
