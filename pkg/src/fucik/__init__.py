"""Limit Fucik spectrum of planar domains and of the unit interval."""

__version__ = "0.1.0"

from .errors import BudgetExceeded, DomainError, FucikError, ValidationError
from .geometry import DomainSpec, load_domain
from .packing import inradius, max_twin_radius, two_ball_rho
from .spectrum import c_infinity, classify, curve_C2, trivial_lines

__all__ = [
    "BudgetExceeded",
    "DomainError",
    "DomainSpec",
    "FucikError",
    "ValidationError",
    "c_infinity",
    "classify",
    "curve_C2",
    "inradius",
    "load_domain",
    "max_twin_radius",
    "trivial_lines",
    "two_ball_rho",
]
