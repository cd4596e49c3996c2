"""Pairings of thick distributions with thick test functions.

Expressions use the same syntax as the ``thickcalc`` command line tool.
"""

from ._thickcalc import (
    CheckOutcome,
    DomainError,
    InsufficientOrder,
    InvariantViolation,
    PairingResult,
    ParseError,
    QuadratureError,
    SeriesTerm,
    ThickError,
    ThickPointMismatch,
    check,
    derive,
    evaluate_test_function,
    expand,
    normalize_distribution,
    normalize_test_function,
    pair,
    project,
    run,
    simplify,
    suite_names,
)

__all__ = [
    "CheckOutcome",
    "DomainError",
    "InsufficientOrder",
    "InvariantViolation",
    "PairingResult",
    "ParseError",
    "QuadratureError",
    "SeriesTerm",
    "ThickError",
    "ThickPointMismatch",
    "check",
    "derive",
    "evaluate_test_function",
    "expand",
    "normalize_distribution",
    "normalize_test_function",
    "pair",
    "project",
    "run",
    "simplify",
    "suite_names",
]
