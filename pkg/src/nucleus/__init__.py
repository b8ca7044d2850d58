"""Discrete Legendre-Fenchel calculus and concept lattices built on one
adjunction fixed-point core over two quantales."""

from . import cli, core, extreal, galois, legendre
from .core import EXT_REAL, TRUTH, LimitKind, PresheafVector, Profunctor, Side
from .extreal import NEG_INF, POS_INF, ZERO, ExtReal
from .galois import Concept, ConceptLattice, Context
from .legendre import DualityReport, Grid, SampledFunction, Space

__version__ = "0.1.0"

__all__ = [
    "cli",
    "core",
    "extreal",
    "galois",
    "legendre",
    "EXT_REAL",
    "TRUTH",
    "LimitKind",
    "PresheafVector",
    "Profunctor",
    "Side",
    "NEG_INF",
    "POS_INF",
    "ZERO",
    "ExtReal",
    "Concept",
    "ConceptLattice",
    "Context",
    "DualityReport",
    "Grid",
    "SampledFunction",
    "Space",
    "__version__",
]
