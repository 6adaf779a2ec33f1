"""Predict-and-search toolkit for binary MILPs."""

__version__ = "0.1.0"
