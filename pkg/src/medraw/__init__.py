"""Morphing edge drawings: stub geometry, crossing-free morphing schedules, and animation export."""

__version__ = "0.1.0"
