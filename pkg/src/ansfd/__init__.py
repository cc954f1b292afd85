"""Algebraic-estimation nonstandard finite-difference time stepping."""

__version__ = "0.1.0"

__all__ = ["__version__"]
