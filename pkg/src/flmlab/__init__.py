"""Vertex and facet counts, mean widths and radii of convex bodies, checked
against log|V| log|F| (R/r)^2 >= c n^2 and its relatives."""
from __future__ import annotations

__version__ = "0.1.0"

from .bodies import BodySpec, make_standard
from .counts import ExactCount, FCount
from .polytope import HPolytope, VPolytope

__all__ = ["BodySpec", "ExactCount", "FCount", "HPolytope", "VPolytope", "make_standard", "__version__"]
