"""Simulation and exact-analysis toolkit for uniform attachment random graphs."""

__version__ = "0.1.0"
