"""Exact models of split quadric motives and the lifting of motives from Z/2 to Z."""

from .correspondences import Correspondence, Motive, compose, diagonal, transpose
from .exact_linalg import ZZ, CoeffRing, Mat
from .motive_lift import IsoClass, classify, lift_isomorphism, lift_mod2_to_mod2n, lift_projector
from .rationality import RationalityContext
from .split_chow import Cell, Cycle, GaloisContext, SplitQuadric

__all__ = [
    "ZZ", "CoeffRing", "Mat",
    "Cell", "Cycle", "GaloisContext", "SplitQuadric",
    "Correspondence", "Motive", "compose", "diagonal", "transpose",
    "RationalityContext",
    "IsoClass", "classify", "lift_isomorphism", "lift_mod2_to_mod2n", "lift_projector",
]
__version__ = "0.1.0"
