"""Spectra, energy and energy bounds of complex unit gain graphs."""

from .gain_core import (
    GainGraph,
    GainParseError,
    Graph,
    GraphError,
    HermitianMatrix,
    SwitchingFunction,
    UnitComplex,
    adjacency,
    bipartite_double,
    negate,
    switch,
)
from .spectra import eigendecompose, energy, energy_profile, spectral_radius, vertex_energy

__version__ = "0.1.0"

__all__ = [
    "GainGraph",
    "GainParseError",
    "Graph",
    "GraphError",
    "HermitianMatrix",
    "SwitchingFunction",
    "UnitComplex",
    "adjacency",
    "bipartite_double",
    "eigendecompose",
    "energy",
    "energy_profile",
    "negate",
    "spectral_radius",
    "switch",
    "vertex_energy",
]
