"""Exact computations for Fermat hyperplane arrangements and their line configurations."""

from __future__ import annotations

from .exactnum import QQ, CycNum, CyclotomicField, ModP, PrimeField
from .mpoly import Poly, PolyRing, parse_poly
from .fermat import fermat_poly, restricted_ideal_generators
from .arrangement import fermat_planes, intersection_lattice, restricted_config_lines

__version__ = "0.1.0"

__all__ = [
    "QQ", "CycNum", "CyclotomicField", "ModP", "PrimeField",
    "Poly", "PolyRing", "parse_poly",
    "fermat_poly", "restricted_ideal_generators",
    "fermat_planes", "intersection_lattice", "restricted_config_lines",
]
