"""Uniform-substitution proof kernel for differential dynamic logic."""

__version__ = "0.1.0"
