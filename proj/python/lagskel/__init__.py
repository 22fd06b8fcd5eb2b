"""Exact Lagrangian characteristic sets for constrained binary labeling."""

from ._lagskel import (
    BudgetExceeded,
    LagskelError,
    Problem,
    adapt_search,
    dual_max,
    dual_search,
    minimize,
    slack_dual_max,
)

__all__ = [
    "BudgetExceeded",
    "LagskelError",
    "Problem",
    "adapt_search",
    "dual_max",
    "dual_search",
    "minimize",
    "slack_dual_max",
]
