"""Publication-style figures from ceqsim CSV outputs."""

from .core import CONTRACTS, PlotError, render

__all__ = ["CONTRACTS", "PlotError", "render"]
