"""
定步长经典四阶 Runge–Kutta 积分器。

在 9 维状态 (x⁰..x³, x⁴, u⁰..u³) 上积分测地线方程，纤维坐标 x⁴ 由水平提升
dx⁴/dt = −Σ Aⱼuʲ 与底空间一起积分。每个记录样本都会重新计算监视量:
伪范数、右端 dx⁴ 的水平缺陷与正则动量 p_k = m g_kj uʲ / |⟨u,u⟩|^{1/2} + q A_k。

纤维漂移另行监视: 沿轨迹用带端点导数修正的梯形公式独立求积 −Σ Aⱼuʲ，
与积分得到的 x⁴ 比较。
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from fields.base import Event5, FramedDistribution
from fields.errors import DivergenceError
from fields.frame import horizontality_defect, lift_velocity

from .rhs import STATE_SIZE, GeodesicState, ParticleParams, eom_vector, lagrange_vector

RHS = Callable[[np.ndarray], np.ndarray]

FORMULATIONS = ("pontryagin", "lagrange")


@dataclass(frozen=True)
class IntegratorConfig:
    """积分器配置：步长、终止时间、记录间隔。"""

    step: float = 1e-3
    t_end: float = 1.0
    record_every: int = 1

    def __post_init__(self) -> None:
        if not self.step > 0:
            raise ValueError(f"步长必须为正数，收到 {self.step}")
        if not self.step <= self.t_end:
            raise ValueError(f"步长 {self.step} 不能超过终止时间 {self.t_end}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError(f"record_every 必须为正整数，收到 {self.record_every}")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_end / self.step - 1e-9))

    @property
    def effective_step(self) -> float:
        """t_end 被均分后的实际步长（不大于 step）。"""
        return self.t_end / self.n_steps


@dataclass(frozen=True)
class Trajectory:
    """
    积分结果。

    states 的每一行是 9 维状态；monitors 在每个记录样本处重新计算。
    """

    t: np.ndarray
    states: np.ndarray
    pseudonorm: np.ndarray
    horizontality_defect: np.ndarray
    fiber_drift: np.ndarray
    momenta: np.ndarray
    charge: float

    @property
    def positions(self) -> np.ndarray:
        return self.states[:, :5]

    @property
    def velocities(self) -> np.ndarray:
        return self.states[:, 5:]

    @property
    def final_state(self) -> GeodesicState:
        return GeodesicState.from_vector(self.states[-1])

    @property
    def samples(self) -> Iterator[tuple[float, GeodesicState]]:
        for t, y in zip(self.t, self.states):
            yield float(t), GeodesicState.from_vector(y)

    @property
    def max_pseudonorm_drift(self) -> float:
        return float(np.max(np.abs(self.pseudonorm - self.pseudonorm[0])))

    @property
    def max_horizontality_defect(self) -> float:
        return float(np.max(np.abs(self.horizontality_defect)))

    @property
    def max_fiber_drift(self) -> float:
        return float(np.max(np.abs(self.fiber_drift)))

    def __len__(self) -> int:
        return len(self.t)


def rk4_step(rhs: RHS, y: np.ndarray, h: float, k1: np.ndarray | None = None) -> np.ndarray:
    """经典四阶 Runge–Kutta 单步；k1 可由调用方传入已算好的 rhs(y)。"""
    h2 = 0.5 * h
    if k1 is None:
        k1 = rhs(y)
    k2 = rhs(y + h2 * k1)
    k3 = rhs(y + h2 * k2)
    k4 = rhs(y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)


class GeodesicIntegrator:
    """
    测地线积分器。

    formulation="pontryagin" 使用 eom_rhs，"lagrange" 使用 a0=1、λ=q 的 lagrange_rhs。
    """

    def __init__(
        self,
        dist: FramedDistribution,
        params: ParticleParams,
        formulation: str = "pontryagin",
    ):
        if formulation not in FORMULATIONS:
            raise ValueError(f"未知形式: {formulation}（可选: {', '.join(FORMULATIONS)}）")
        self.dist = dist
        self.params = params
        self.formulation = formulation
        self.logger = logging.getLogger(self.__class__.__name__)

    def rhs(self, y: np.ndarray) -> np.ndarray:
        # 中间级已溢出时传播 NaN，由步末的有限性检查报告发散
        if not np.all(np.isfinite(y)):
            return np.full(STATE_SIZE, np.nan)
        if self.formulation == "lagrange":
            return lagrange_vector(
                self.dist, self.params.mass, y, a0=1, lam=self.params.charge
            ).derivative
        return eom_vector(self.dist, self.params.charge_to_mass, y)

    def integrate(self, start: GeodesicState, cfg: IntegratorConfig) -> Trajectory:
        n_steps = cfg.n_steps
        h = cfg.effective_step
        y = start.to_vector()
        metric = self.dist.metric

        metric.validate(y[:4])
        with np.errstate(over="ignore", invalid="ignore"):
            dy = self.rhs(y)
        rate, accel = self._fiber_rate(y, dy)
        fiber = y[4]

        times = [0.0]
        states = [y.copy()]
        reported = [dy[4]]
        drifts = [0.0]
        self.logger.debug(
            f"开始积分: {n_steps} 步, h={h:.3e}, 形式={self.formulation}"
        )

        last_good_t = 0.0
        for n in range(1, n_steps + 1):
            metric.validate(y[:4])
            with np.errstate(over="ignore", invalid="ignore"):
                y_next = rk4_step(self.rhs, y, h, k1=dy)
                dy_next = self.rhs(y_next)
            t = n * h
            if not np.all(np.isfinite(y_next)):
                raise DivergenceError(
                    f"t={t:.6g} 处状态出现非有限值，最后正常时刻 t={last_good_t:.6g}",
                    last_good_t=last_good_t,
                )
            rate_next, accel_next = self._fiber_rate(y_next, dy_next)
            fiber += 0.5 * h * (rate + rate_next) + h * h / 12.0 * (accel - accel_next)
            y, dy, rate, accel = y_next, dy_next, rate_next, accel_next
            last_good_t = t
            if n % cfg.record_every == 0 or n == n_steps:
                times.append(t)
                states.append(y.copy())
                reported.append(dy[4])
                drifts.append(y[4] - fiber)

        return self._with_monitors(
            np.array(times), np.array(states), np.array(reported), np.array(drifts)
        )

    def _fiber_rate(self, y: np.ndarray, dy: np.ndarray) -> tuple[float, float]:
        """−Σ Aⱼuʲ 及其沿轨迹的时间导数 −(∂ₖAⱼ uᵏ)uʲ − Aⱼ u̇ʲ。"""
        x, u = y[:4], y[5:9]
        potential = self.dist.potential
        A = potential.value(x)
        rate = lift_velocity(potential, x, u)
        with np.errstate(over="ignore", invalid="ignore"):
            accel = float(-(potential.jacobian(x) @ u) @ u - A @ dy[5:9])
        return rate, accel

    def _with_monitors(
        self,
        times: np.ndarray,
        states: np.ndarray,
        reported: np.ndarray,
        drifts: np.ndarray,
    ) -> Trajectory:
        potential = self.dist.potential
        metric = self.dist.metric
        mass, charge = self.params.mass, self.params.charge

        norms = np.empty(len(times))
        defects = np.empty(len(times))
        momenta = np.empty((len(times), 5))
        for i, y in enumerate(states):
            x, u = y[:4], y[5:9]
            g = metric.value(x)
            A = potential.value(x)
            q = float(u @ g @ u)
            norms[i] = q
            # 右端给出的 dx⁴/dt 与底空间速度一起代入 ω
            defects[i] = horizontality_defect(potential, Event5(x, y[4]), np.append(u, reported[i]))
            scale = math.sqrt(abs(q)) if q != 0.0 else math.nan
            momenta[i, :4] = mass * (g @ u) / scale + charge * A
            momenta[i, 4] = charge

        return Trajectory(
            t=times,
            states=states,
            pseudonorm=norms,
            horizontality_defect=defects,
            fiber_drift=drifts,
            momenta=momenta,
            charge=charge,
        )


def integrate(
    dist: FramedDistribution,
    params: ParticleParams,
    start: GeodesicState,
    cfg: IntegratorConfig,
    formulation: str = "pontryagin",
) -> Trajectory:
    """积分一条水平测地线，返回带监视量的轨迹。"""
    return GeodesicIntegrator(dist, params, formulation).integrate(start, cfg)
