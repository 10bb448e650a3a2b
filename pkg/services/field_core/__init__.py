from services.field_core.field import Field, LatticePoint
from services.field_core.ordering import iter_spiral, spiral_index, spiral_order
from services.field_core.patches import (
    CandidateGrid,
    PatchVector,
    enumerate_candidates,
    extract_vector,
)
from services.field_core.shapes import Canvas, Scheme, Shape, neighborhood_shape

__all__ = [
    "CandidateGrid",
    "Canvas",
    "Field",
    "LatticePoint",
    "PatchVector",
    "Scheme",
    "Shape",
    "enumerate_candidates",
    "extract_vector",
    "iter_spiral",
    "neighborhood_shape",
    "spiral_index",
    "spiral_order",
]
