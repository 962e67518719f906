"""Numerical verification of Bessel-series / Hurwitz-series identities."""

__version__ = "0.1.0"
