"""Driven-dissipative multi-qubit reset in a multi-resonator circuit-QED network."""

__version__ = "0.1.0"
