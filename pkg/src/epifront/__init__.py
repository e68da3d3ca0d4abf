"""Numerical laboratory for a two-species cooperative reaction-diffusion
epidemic model on a habitat with one fixed end and one free end.

The package simulates the moving-boundary dynamics, computes the spectral
and steady-state objects that govern them, classifies runs as spreading or
vanishing, and locates the critical thresholds (habitat length, expansion
coefficient, initial amplitude) predicted by the theory.
"""

from .model import (
    Equilibrium,
    FixedEnd,
    InitialData,
    ModelParams,
    NonlinearitySpec,
    ValidationReport,
    equilibrium,
    reproduction_number,
    validate_hypotheses,
)
from .spectral import (
    EigenResult,
    critical_length,
    lambda_closed_form,
    lambda_discrete_oracle,
    lambda_infinity,
)
from .elliptic import CeilingConstants, SteadyProfile, ceiling_constants, semi_infinite_profile, solve_steady
from .stefan import SimState, SolverControls, Timeline, simulate, step
from .dichotomy import (
    Outcome,
    OutcomeClass,
    Thresholds,
    classify,
    decay_rate,
    make_stop_rule,
    vanishing_bound,
)
from .criteria import LinkFunction, ThresholdResult, find_mu1_star, find_tau_star

__version__ = "0.1.0"
