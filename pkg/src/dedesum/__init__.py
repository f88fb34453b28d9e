"""Exact newform Dedekind sums for pairs of primitive Dirichlet characters."""

from .characters import CharacterPair, DirichletCharacter, enumerate_primitive, parse_label, valid_pairs
from .cyclotomic import CyclotomicNumber, cyclotomic_polynomial
from .dedekind import DedekindContext
from .lattice import IntegerLattice, image_lattice
from .modgroup import SL2Matrix

__version__ = "0.1.0"

__all__ = [
    "CharacterPair",
    "CyclotomicNumber",
    "DedekindContext",
    "DirichletCharacter",
    "IntegerLattice",
    "SL2Matrix",
    "cyclotomic_polynomial",
    "enumerate_primitive",
    "image_lattice",
    "parse_label",
    "valid_pairs",
]
