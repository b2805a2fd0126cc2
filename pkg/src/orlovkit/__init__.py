"""Graded rings, banded resolutions and the singularity-category embedding ``b_i``."""

from .errors import CertificateViolation, NotGorensteinInWindow, UnsupportedBase
from .grring import GradedRing, make_ring, parse_poly
from .grmod import GradedFreeModule, GradedMap, PresentedModule
from .scalars import GF, QQ

__version__ = "0.1.0"

__all__ = [
    "CertificateViolation",
    "GF",
    "GradedFreeModule",
    "GradedMap",
    "GradedRing",
    "NotGorensteinInWindow",
    "PresentedModule",
    "QQ",
    "UnsupportedBase",
    "make_ring",
    "parse_poly",
]
