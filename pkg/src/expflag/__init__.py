"""Exact-arithmetic engine for exponential-orbit combinatorics on affine
flag varieties: affine Weyl groups, generic Iwahori-Hecke algebras over
Z[q], the generic exponential module with its spherical action, and a
finite-field brute-force oracle validating everything by specialization.
"""

from .root_datum import RootDatum, build_root_datum
from .affine_weyl import AffineWeyl, AffineWeylElement, ExpLabel
from .coefficients import QPoly, CycNum, GF, gf, qpoly_interpolate
from .hecke import HeckeElement, hecke_mul, t_basis
from .spherical import SphericalElement, spherical_mul, unit_indicator
from .exp_module import ExpModule, ExpModVector, fiber_class, key_lemma_class

__all__ = [
    "RootDatum",
    "build_root_datum",
    "AffineWeyl",
    "AffineWeylElement",
    "ExpLabel",
    "QPoly",
    "CycNum",
    "GF",
    "gf",
    "qpoly_interpolate",
    "HeckeElement",
    "hecke_mul",
    "t_basis",
    "SphericalElement",
    "spherical_mul",
    "unit_indicator",
    "ExpModule",
    "ExpModVector",
    "fiber_class",
    "key_lemma_class",
]

__version__ = "0.1.0"
