"""Percolation and counting on nilpotent lattices."""

from ._native import (
    Group,
    estimate_lambda_c,
    ladder_dominance,
    ladder_exploration,
    lattice_count,
    sample,
    verify_criterion,
)

__all__ = [
    "Group",
    "estimate_lambda_c",
    "ladder_dominance",
    "ladder_exploration",
    "lattice_count",
    "sample",
    "verify_criterion",
]
