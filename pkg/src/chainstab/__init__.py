"""Simulation and falsification tools for string stability of vehicle chains.

Chains of discrete-time double integrators driven by homogeneous
relative-measurement controllers, the ramp disturbance that defeats every
such controller, its closed-form response and the growth of the resulting
error metrics with chain length.
"""
from .analysis import (
    RAMP_ERROR_SIGN, OracleParams, ScalingReport, error_metric, fit_exponent, lemma1_oracle,
    lemma_window_T, oracle_spacing, theorem2_exponent, validity_window,
)
from .controllers import (
    ControllerDefinition, NeighborhoodWindow, boundary_adapt, evaluate_chain,
    nonlinear_comm_controller, pd_asymmetric, pd_symmetric, zero_controller,
)
from .core import ChainState, SimulationConfig, StepInput, init_zero, spacing_errors, step
from .disturbances import AmplitudeBudget, DisturbanceProfile, admissible_alpha, disturbance_norm, sample
from .harness.simulate import Trajectory, simulate

__version__ = "0.1.0"
