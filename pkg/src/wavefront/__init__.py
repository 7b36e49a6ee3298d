"""Differential geometry of wave fronts: invariants, ridges, parallels and focal sets."""

from .errors import GeometryError
from .jets import Jet
from .surface import SurfaceSpec

__all__ = ["GeometryError", "Jet", "SurfaceSpec"]
__version__ = "0.1.0"
