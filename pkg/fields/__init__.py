"""4-势、分布标架、Faraday 张量与分布度规。"""

from .base import (
    PROJECT_ROOT,
    DistributionMetric,
    Event5,
    FramedDistribution,
    PotentialField,
    as_point,
    load_settings,
)
from .frame import (
    ConeClass,
    FaradayTensor,
    cone_membership,
    faraday,
    faraday_from_fields,
    frame_vectors,
    horizontality_defect,
    lift_velocity,
    pseudonorm,
    time_orientation,
)
from .metrics import build_metric, minkowski
from .polynomial import Polynomial
from .potentials import build_potential, constant_magnetic, zero_potential

__all__ = [
    "PROJECT_ROOT",
    "ConeClass",
    "DistributionMetric",
    "Event5",
    "FaradayTensor",
    "FramedDistribution",
    "Polynomial",
    "PotentialField",
    "as_point",
    "build_metric",
    "build_potential",
    "cone_membership",
    "constant_magnetic",
    "faraday",
    "faraday_from_fields",
    "frame_vectors",
    "horizontality_defect",
    "lift_velocity",
    "load_settings",
    "minkowski",
    "pseudonorm",
    "time_orientation",
    "zero_potential",
]
