"""标架括号、增长向量、非完整度与 ball-box 指数。"""

from .brackets import bracket_table, coordinate_bracket, frame_bracket
from .growth import (
    REFERENCE_2_IN_3,
    BoxExponents,
    BoxReport,
    GrowthVector,
    box_check,
    box_exponents,
    field_is_nonzero,
    growth_vector,
)

__all__ = [
    "REFERENCE_2_IN_3",
    "BoxExponents",
    "BoxReport",
    "GrowthVector",
    "box_check",
    "box_exponents",
    "bracket_table",
    "coordinate_bracket",
    "field_is_nonzero",
    "frame_bracket",
    "growth_vector",
]
