"""Exact symmetry-breaking operators between spherical principal series of rank-one groups.

Operators are encoded as scalar tables ``t_{alpha,alpha'}`` on a K-type pair
lattice.  The package computes closed forms, exact solution spaces of the
characterizing relations, multiplicities between subquotients, and a
floating-point quadrature oracle for the associated singular integrals.
"""

from __future__ import annotations

from .lattice import ComplexPair, CompositionFactor, GroupCase, Params, RealPair
from .numerics import Rat, format_rat, parse_rat

__version__ = "0.1.0"

__all__ = [
    "ComplexPair",
    "CompositionFactor",
    "GroupCase",
    "Params",
    "Rat",
    "RealPair",
    "__version__",
    "format_rat",
    "parse_rat",
]
