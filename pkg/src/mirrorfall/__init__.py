"""Quantum wavepackets falling under a mirror: a grid Schroedinger /
Gross-Pitaevskii propagator, an Airy mirror-eigenbasis solver, and the
closed-form solutions both are validated against."""

from .core import (ConfigurationError, DomainError, Grid, PacketSpec,
                   PhysicalParams, WaveField, assemble_potential,
                   crossover_ratio, gravitational_length, grid_with_spacing,
                   make_gaussian, params_preset)

__all__ = [
    "ConfigurationError", "DomainError", "Grid", "PacketSpec",
    "PhysicalParams", "WaveField", "assemble_potential", "crossover_ratio",
    "gravitational_length", "grid_with_spacing", "make_gaussian",
    "params_preset",
]

__version__ = "0.1.0"
