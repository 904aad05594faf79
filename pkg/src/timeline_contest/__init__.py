"""Solvers and bound-verification tools for adversarial timeline attention contests."""

from .core import (
    ContestError,
    ContestInstance,
    CustomUtility,
    DomainError,
    LinearUtility,
    LogUtility,
    Measures,
    RegimeError,
    StrategyProfile,
    StructuralError,
    UsageError,
    UtilitySpec,
    VisibilityConfig,
    compute_measures,
    evaluate_utility,
    evaluate_utility_derivative,
    load_instance,
    reduce_malicious,
    share_to_metric,
)
from .closed_form import (
    EquilibriumResult,
    homogeneous_measures,
    participation_threshold,
    solve_linear_ne,
    solve_linear_ne_targeted,
)
from .iterative import (
    ConvergenceError,
    SolverConfig,
    best_response_benign,
    best_response_malicious,
    solve_general_ne,
)

__version__ = "0.1.0"

__all__ = [
    "ContestError",
    "ContestInstance",
    "ConvergenceError",
    "CustomUtility",
    "DomainError",
    "EquilibriumResult",
    "LinearUtility",
    "LogUtility",
    "Measures",
    "RegimeError",
    "SolverConfig",
    "StrategyProfile",
    "StructuralError",
    "UsageError",
    "UtilitySpec",
    "VisibilityConfig",
    "best_response_benign",
    "best_response_malicious",
    "compute_measures",
    "evaluate_utility",
    "evaluate_utility_derivative",
    "homogeneous_measures",
    "load_instance",
    "participation_threshold",
    "reduce_malicious",
    "share_to_metric",
    "solve_general_ne",
    "solve_linear_ne",
    "solve_linear_ne_targeted",
]
