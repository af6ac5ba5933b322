"""Simulator and optimization toolkit for steerable wireless backhaul
reconfiguration: greedy and multi-start schedulers, fixed-rotation baselines,
a small-instance exhaustive oracle, per-slot max-flow routing, and scenario
generators, all behind one CLI."""

__version__ = "0.1.0"
