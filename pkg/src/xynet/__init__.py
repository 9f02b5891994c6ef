"""Quantum state transfer in XY spin networks mediated by a dispersive cavity."""

__version__ = "0.1.0"
