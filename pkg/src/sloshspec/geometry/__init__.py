"""Sloshing domains, boundary pieces, and triangular mesh generation."""

from .domain import (
    BoundaryPiece,
    CircularArc,
    CornerSpec,
    LineSegment,
    ParametricCurve,
    Polyline,
    SloshingDomain,
    build_curvilinear_example,
    build_rectangle_domain,
    build_triangle_domain,
)
from .io import domain_from_json, domain_to_json, read_mesh_text, write_mesh_text
from .mesh import MeshError, TriangleMesh, generate_mesh

__all__ = [
    "BoundaryPiece",
    "CircularArc",
    "CornerSpec",
    "LineSegment",
    "MeshError",
    "ParametricCurve",
    "Polyline",
    "SloshingDomain",
    "TriangleMesh",
    "build_curvilinear_example",
    "build_rectangle_domain",
    "build_triangle_domain",
    "domain_from_json",
    "domain_to_json",
    "generate_mesh",
    "read_mesh_text",
    "write_mesh_text",
]
