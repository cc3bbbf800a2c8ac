"""Numerical core: compact-scheme discretization, time stepping and stability analysis."""
