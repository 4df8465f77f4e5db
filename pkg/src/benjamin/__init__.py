"""Solitary waves of the Benjamin equation: spectral profiles, evolution and checks."""

__version__ = "0.1.0"
