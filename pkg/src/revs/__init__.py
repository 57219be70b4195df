"""Reliability-aware EV charge scheduling."""

__version__ = "0.1.0-dev"
