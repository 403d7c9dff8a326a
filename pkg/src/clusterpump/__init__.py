"""Symmetry-protected pumps of cluster states onto lattice boundaries.

Driving Hamiltonians built from commuting Z-type products are compiled to
Clifford circuits, checked with a stabilizer tableau, and studied under
symmetric perturbations with an exact statevector.
"""

from clusterpump.f2poly import F2LaurentPoly
from clusterpump.lattice import (
    HamTerm,
    LatticeSpec,
    SymmetryGen,
    build_fcc,
    build_fractal_stack,
    build_honeycomb_stack,
    build_square,
    build_triangular,
    build_union_jack,
)
from clusterpump.pauli import CliffordCircuit, PauliOperator, commutes
from clusterpump.tableau import StabilizerTableau

__all__ = [
    "F2LaurentPoly",
    "HamTerm",
    "LatticeSpec",
    "SymmetryGen",
    "build_fcc",
    "build_fractal_stack",
    "build_honeycomb_stack",
    "build_square",
    "build_triangular",
    "build_union_jack",
    "CliffordCircuit",
    "PauliOperator",
    "commutes",
    "StabilizerTableau",
]

__version__ = "0.1.0"
