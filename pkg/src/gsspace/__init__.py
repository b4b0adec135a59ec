"""Finite closure spaces and the geometric structure spaces of Banach spaces and C*-algebras."""

from .closure_core import FiniteClosureSpace, from_closed_family, from_operator, transforms
from .report import Report, RunConfig, render

__all__ = [
    "FiniteClosureSpace",
    "Report",
    "RunConfig",
    "from_closed_family",
    "from_operator",
    "render",
    "transforms",
]
__version__ = "0.1.0"
