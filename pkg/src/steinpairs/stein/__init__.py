"""Stein operators, Stein-equation solutions, bounds and discrepancies."""

from .bounds import (
    BoundReport,
    IdentityReport,
    LemmaReport,
    bound_m,
    boundary_decay,
    check_lemma_inequalities,
    check_structural_identity,
    tail_ratios,
)
from .discrepancy import (
    CharacterizationReport,
    DiscrepancyReport,
    OperatorTestFunction,
    characterization_demo,
    default_family,
    stein_discrepancy,
)
from .operator import apply_operator, expectation
from .solver import SteinSolution, default_grid, refined_grid, solve_stein_equation, solve_with_constant
from .testfunctions import TestFunction, builtin, builtin_family, constant, exp_decay, logistic_step, oscillating

__all__ = [
    "BoundReport",
    "CharacterizationReport",
    "DiscrepancyReport",
    "IdentityReport",
    "LemmaReport",
    "OperatorTestFunction",
    "SteinSolution",
    "TestFunction",
    "apply_operator",
    "bound_m",
    "boundary_decay",
    "builtin",
    "builtin_family",
    "characterization_demo",
    "check_lemma_inequalities",
    "check_structural_identity",
    "constant",
    "default_family",
    "default_grid",
    "exp_decay",
    "expectation",
    "logistic_step",
    "oscillating",
    "refined_grid",
    "solve_stein_equation",
    "solve_with_constant",
    "stein_discrepancy",
    "tail_ratios",
]
