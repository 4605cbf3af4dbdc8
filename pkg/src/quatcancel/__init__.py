"""Cancellation of projective modules over quaternionic orders and periodic groups.

Exact computations around groups with periodic cohomology, Eichler mass
constants of real cyclotomic fields, stably free cancellation for the orders
Z Q_4n / (Phi_n1 ... Phi_nk), Swan modules, and brute-force double cosets in
finite quotient rings.
"""

from .errors import (
    FixtureRequiredError,
    InternalError,
    NotApplicableError,
    UnsupportedError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "FixtureRequiredError",
    "InternalError",
    "NotApplicableError",
    "UnsupportedError",
    "ValidationError",
]
