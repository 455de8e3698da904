"""Executable pp-formula calculus, Bass modules and pp-index probes over concrete rings."""

__version__ = "0.1.0"
