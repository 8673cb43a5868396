"""Continued f-expansions: exact and certified expansion of reals by generator maps."""

__version__ = "0.1.0"
