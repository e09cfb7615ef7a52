"""Certified validation and Delaunay repair of 2D triangulations."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source checkout
    __version__ = "0.0.0"

from .delaunay import DelaunayReport, check_delaunay, is_locally_delaunay, repair_flip
from .edge_map import EdgeMap, build_edge_map
from .model import Edge, MeshDataset, Point, PreconditionViolation
from .predicates import Sign, incircle, on_segment, orientation, segments_intersect
from .pstv import FailureKind, ValidationReport, brute_force_valid, validate

__all__ = [
    "DelaunayReport",
    "Edge",
    "EdgeMap",
    "FailureKind",
    "MeshDataset",
    "Point",
    "PreconditionViolation",
    "Sign",
    "ValidationReport",
    "brute_force_valid",
    "build_edge_map",
    "check_delaunay",
    "incircle",
    "is_locally_delaunay",
    "on_segment",
    "orientation",
    "repair_flip",
    "segments_intersect",
    "validate",
]
