"""Exact finite checks for the toric code ground state on cone regions.

The package models Pauli operators on the square lattice symbolically, with
exact phases, and verifies vacuum pairings, canonical forms and the split
map without floating point.  A small dense state-vector oracle is used only
as an independent cross-check.
"""

from .canonical import (
    CanonicalForm,
    Scaffold,
    build_scaffold,
    canonicalize,
    classify_excitation,
    dense_decompose,
    h0_dimension,
)
from .lattice import Bond, Cone, Plaquette, Vertex, Window, cone_contains_bond, is_distally_separated
from .pauli import PauliOp, multiply, plaquette_op, star_op, syndrome
from .vacuum import GaussianRational, omega, states_equal

__version__ = "0.1.0"

__all__ = [
    "Bond", "CanonicalForm", "Cone", "GaussianRational", "PauliOp", "Plaquette", "Scaffold",
    "Vertex", "Window", "build_scaffold", "canonicalize", "classify_excitation",
    "cone_contains_bond", "dense_decompose", "h0_dimension", "is_distally_separated",
    "multiply", "omega", "plaquette_op", "star_op", "states_equal", "syndrome",
]
