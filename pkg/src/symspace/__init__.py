"""Geometry, arithmetic and harmonic analysis of non-compact symmetric spaces SO(r,r+q)/SO(r)×SO(r+q)."""

from .errors import SymspaceError
from .geodesy import distance, geodesic, norm_squared
from .liealg import SignatureParams, build_basis
from .solvgroup import SolvablePoint, m_matrix, product, sigma_inverse, sigma_matrix

__version__ = "0.1.0"

__all__ = [
    "SignatureParams",
    "SolvablePoint",
    "SymspaceError",
    "build_basis",
    "distance",
    "geodesic",
    "m_matrix",
    "norm_squared",
    "product",
    "sigma_inverse",
    "sigma_matrix",
]
