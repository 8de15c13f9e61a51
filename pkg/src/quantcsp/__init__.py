"""Exact constraint satisfaction over value lattices.

Crisp CSP solving, polymorphism analysis with Siggers-based tractability
classification, tropical valued CSPs with their exact reduction to crisp
instances, and the linear-relation route to rational linear programming.
"""

from . import csp, finset, jsonio, linopt, polymorphism, qmorphism, qpoly, quantale, tvcsp
from .errors import (
    FormatError,
    MismatchError,
    NoPreimage,
    QuantcspError,
    SizeExceeded,
)
from .quantale import RBAR, TWO

__version__ = "0.1.0"

__all__ = [
    "csp",
    "finset",
    "jsonio",
    "linopt",
    "polymorphism",
    "qmorphism",
    "qpoly",
    "quantale",
    "tvcsp",
    "FormatError",
    "MismatchError",
    "NoPreimage",
    "QuantcspError",
    "SizeExceeded",
    "RBAR",
    "TWO",
    "__version__",
]
