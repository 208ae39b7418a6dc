"""Exact and numerical tools for determinantal surfaces of the double confluent Heun family."""

__version__ = "0.1.0"
