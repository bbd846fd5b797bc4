"""Exact solvers and tooling for the unbounded knapsack problem."""

__version__ = "0.1.0"
