"""Evolutionary human-machine safety games: dynamics, policies and simulators."""

__version__ = "0.1.0"
