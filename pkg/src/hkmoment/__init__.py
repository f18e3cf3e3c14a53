"""Numerical verification of the hyper-Kaehler moment map on the tangent bundle
of complex projective space and related harmonic morphisms.
"""

from . import calabi, calibration, conformality, fd, gibbons, matkit, moment, projective
from .calabi import TBPoint, TTVec
from .report import CheckReport

__all__ = [
    "CheckReport",
    "TBPoint",
    "TTVec",
    "calabi",
    "calibration",
    "conformality",
    "fd",
    "gibbons",
    "matkit",
    "moment",
    "projective",
]
