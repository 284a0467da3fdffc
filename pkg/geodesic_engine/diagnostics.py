"""
诊断量：经典四维作用量的两部分，以及规范变换检查。

作用量 S = −mc ∫⟨u,u⟩^{1/2} dt − (e/c) ∫ Σ Aᵢuⁱ dt 只作为诊断泛函，不参与积分。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from fields.base import FramedDistribution
from fields.errors import CausalityError

from .integrator import IntegratorConfig, Trajectory, integrate
from .rhs import GeodesicState, ParticleParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ActionValues:
    length_part: float
    coupling_part: float

    @property
    def total(self) -> float:
        return self.length_part + self.coupling_part


@dataclass(frozen=True)
class GaugeReport:
    """A 与 A + ∇f 两次积分的偏差。"""

    base_deviation: float
    velocity_deviation: float
    fiber_relation_deviation: float

    @property
    def max_base_deviation(self) -> float:
        return max(self.base_deviation, self.velocity_deviation)


def trapezoid(values: np.ndarray, t: np.ndarray) -> float:
    """梯形求积。"""
    return float(np.sum(0.5 * (values[1:] + values[:-1]) * np.diff(t)))


def action_values(
    dist: FramedDistribution,
    params: ParticleParams,
    traj: Trajectory,
    c: float = 1.0,
) -> ActionValues:
    """沿轨迹用梯形公式计算作用量的长度部分与耦合部分。"""
    non_timelike = np.flatnonzero(~(traj.pseudonorm > 0))
    if non_timelike.size:
        index = int(non_timelike[0])
        raise CausalityError(
            f"样本 {index} (t={traj.t[index]:.6g}) 非类时: ⟨u,u⟩ = {traj.pseudonorm[index]:.6g}",
            sample_index=index,
        )

    coupling = np.array(
        [np.dot(dist.potential.value(y[:4]), y[5:9]) for y in traj.states]
    )
    length_part = -params.mass * c * trapezoid(np.sqrt(traj.pseudonorm), traj.t)
    coupling_part = -(params.charge / c) * trapezoid(coupling, traj.t)
    return ActionValues(length_part=length_part, coupling_part=coupling_part)


def gauge_transform_check(
    dist: FramedDistribution,
    params: ParticleParams,
    start: GeodesicState,
    cfg: IntegratorConfig,
    f,
) -> GaugeReport:
    """
    分别用 A 与 A + ∇f 积分，比较底空间轨迹与纤维关系
    x⁴_{A′}(t) = x⁴_A(t) − (f(x(t)) − f(x(0)))。
    """
    reference = integrate(dist, params, start, cfg)
    shifted = integrate(dist.gauge_shifted(f), params, start, cfg)

    base_dev = float(np.max(np.abs(shifted.states[:, :4] - reference.states[:, :4])))
    vel_dev = float(np.max(np.abs(shifted.states[:, 5:] - reference.states[:, 5:])))

    f0 = f(reference.states[0, :4])
    shift = np.array([f(y[:4]) - f0 for y in reference.states])
    expected_fiber = reference.states[:, 4] - shift
    fiber_dev = float(np.max(np.abs(shifted.states[:, 4] - expected_fiber)))

    logger.debug(
        f"规范检查 f={f}: 底空间偏差 {base_dev:.3e}, 速度偏差 {vel_dev:.3e}, 纤维偏差 {fiber_dev:.3e}"
    )
    return GaugeReport(
        base_deviation=base_dev,
        velocity_deviation=vel_dev,
        fiber_relation_deviation=fiber_dev,
    )
