"""单点分析：F、det F、秩、非正常核、增长向量与 ball-box 指数。"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fields.base import FramedDistribution, as_point
from fields.frame import FaradayTensor, faraday
from geodesic_engine.abnormal import DEFAULT_RCOND, AbnormalKernel, abnormal_kernel
from nonholonomy.growth import (
    FIELD_THRESHOLD,
    BoxExponents,
    GrowthVector,
    box_exponents,
    growth_vector,
)


@dataclass(frozen=True)
class PointAnalysis:
    x: np.ndarray
    faraday: FaradayTensor
    det_F: float
    kernel: AbnormalKernel
    growth: GrowthVector
    exponents: BoxExponents
    metric_eigenvalues: np.ndarray


def analyze_point(
    dist: FramedDistribution,
    x,
    rcond: float = DEFAULT_RCOND,
    threshold: float = FIELD_THRESHOLD,
) -> PointAnalysis:
    point = as_point(x)
    F = faraday(dist.potential, point)
    gv = growth_vector(dist.potential, point, threshold)
    g = dist.metric.validate(point)
    return PointAnalysis(
        x=point,
        faraday=F,
        det_F=float(np.linalg.det(F.F)),
        kernel=abnormal_kernel(F, rcond),
        growth=gv,
        exponents=box_exponents(gv),
        metric_eigenvalues=np.linalg.eigvalsh(g),
    )
