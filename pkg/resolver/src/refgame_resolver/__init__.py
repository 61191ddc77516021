"""Candidate-image scoring baselines over dialogue segment chains."""

__version__ = "0.1.0"
