"""水平测地线的右端项、数值积分、非正常测地线与诊断量。"""

from .abnormal import AbnormalKernel, abnormal_kernel, kernel_residual
from .christoffel import christoffel
from .diagnostics import ActionValues, GaugeReport, action_values, gauge_transform_check
from .integrator import GeodesicIntegrator, IntegratorConfig, Trajectory, integrate
from .rhs import (
    GeodesicState,
    LagrangeRHS,
    ParticleParams,
    eom_rhs,
    lagrange_rhs,
    structure_constants,
)

__all__ = [
    "AbnormalKernel",
    "ActionValues",
    "GaugeReport",
    "GeodesicIntegrator",
    "GeodesicState",
    "IntegratorConfig",
    "LagrangeRHS",
    "ParticleParams",
    "Trajectory",
    "abnormal_kernel",
    "action_values",
    "christoffel",
    "eom_rhs",
    "gauge_transform_check",
    "integrate",
    "kernel_residual",
    "lagrange_rhs",
    "structure_constants",
]
