"""Exact differential-privacy verification for noisy quantum algorithms."""

__version__ = "0.1.0"
