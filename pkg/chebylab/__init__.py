"""Chebylab - Chebyshev numbers, potential theory and theta asymptotics."""

__version__ = "1.0.0"
