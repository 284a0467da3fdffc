"""常磁场闭式测地线、测地球面 / 波前采样与渐近公式。"""

from .asymptotics import ConeReport, ConeRow, cone_bound_check, x4_return_distance
from .closed_form import (
    SERIES_SWITCH,
    MagneticGeodesicParams,
    canonical_endpoint,
    canonical_params,
    closed_form,
    closed_form_exact,
    closed_form_series,
    initial_velocity,
)
from .clouds import (
    CLOUD_COLUMNS,
    PointCloud,
    SphereSpec,
    axis_crossings,
    sphere_sample,
    wavefront_sample,
)

__all__ = [
    "CLOUD_COLUMNS",
    "SERIES_SWITCH",
    "ConeReport",
    "ConeRow",
    "MagneticGeodesicParams",
    "PointCloud",
    "SphereSpec",
    "axis_crossings",
    "canonical_endpoint",
    "canonical_params",
    "closed_form",
    "closed_form_exact",
    "closed_form_series",
    "cone_bound_check",
    "initial_velocity",
    "sphere_sample",
    "wavefront_sample",
    "x4_return_distance",
]
