"""Isoperimetric-profile numerics for spherically symmetric 3-manifolds."""
from .config import ComparisonConfig
from .errors import IsomassError, NumericalError, UsageError
from .geometry import RadialConformalEnd, SchwarzschildMetric
from .kernels import BACKEND
from .profile import IsoProfile, MassSeries
from .phasespace import PhasePath

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ComparisonConfig",
    "IsoProfile",
    "IsomassError",
    "MassSeries",
    "NumericalError",
    "PhasePath",
    "RadialConformalEnd",
    "SchwarzschildMetric",
    "UsageError",
]
