"""Entangled subspaces: secant-variety dimension counts, explicit constructions,
numerical verification, witnesses and local discrimination certificates."""

__version__ = "0.1.0"
