"""
水平测地线方程的右端项。

两种等价写法:
- eom_rhs:      极大值原理形式，duᵏ/dt = −Γᵏᵢⱼuⁱuʲ + (q/m)·g^{kl}F_lj uʲ
- lagrange_rhs: Lagrange 乘子形式，a₀⟨Dγ̇/dt, eᵢ⟩ + λ Σ c⁴ᵢⱼ vʲ = 0，c⁴ᵢⱼ = Fⱼᵢ，λ = const

状态向量布局: (x⁰..x³, x⁴, u⁰..u³)，共 9 个分量。
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fields.base import Event5, FramedDistribution, PotentialField
from fields.errors import AbnormalityViolation, DomainError
from fields.frame import faraday

from .christoffel import christoffel

STATE_SIZE = 9


@dataclass(frozen=True)
class ParticleParams:
    """粒子参数：质量 m > 0，电荷 q（即 p₄，也即 Lagrange 乘子 λ）。"""

    mass: float = 1.0
    charge: float = 0.0

    def __post_init__(self) -> None:
        if not self.mass > 0:
            raise ValueError(f"质量必须为正数，收到 {self.mass}")
        if not np.isfinite(self.charge):
            raise ValueError(f"电荷非有限: {self.charge}")

    @property
    def charge_to_mass(self) -> float:
        return self.charge / self.mass


@dataclass(frozen=True)
class GeodesicState:
    """5 维位置 + 分布标架下的 4-速度 u⁰..u³。"""

    position: Event5
    velocity: np.ndarray

    def __post_init__(self) -> None:
        velocity = np.asarray(self.velocity, dtype=float)
        if velocity.shape != (4,) or not np.all(np.isfinite(velocity)):
            raise ValueError(f"速度需要 4 个有限分量，收到 {self.velocity!r}")
        object.__setattr__(self, "velocity", velocity)

    @classmethod
    def at(cls, x=(0.0, 0.0, 0.0, 0.0), u=(1.0, 0.0, 0.0, 0.0), fiber: float = 0.0) -> "GeodesicState":
        return cls(Event5(np.asarray(x, dtype=float), float(fiber)), np.asarray(u, dtype=float))

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "GeodesicState":
        return cls(Event5(y[:4].copy(), float(y[4])), y[5:9].copy())

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.position.base, [self.position.fiber], self.velocity])


@dataclass(frozen=True)
class LagrangeRHS:
    """Lagrange 形式右端项：状态导数、dλ/dt（恒为 0）与非正常约束残差。"""

    derivative: np.ndarray
    dlambda: float
    residual: np.ndarray


def structure_constants(potential: PotentialField, x) -> np.ndarray:
    """标架结构常数 c⁴ᵢⱼ = Fⱼᵢ（[eᵢ, eⱼ] = −Fᵢⱼ∂₄，其余结构常数为 0）。"""
    return faraday(potential, x).F.T.copy()


def eom_vector(dist: FramedDistribution, charge_to_mass: float, y: np.ndarray) -> np.ndarray:
    """eom_rhs 的数组版本，供积分器内循环使用。"""
    x, u = y[:4], y[5:9]
    metric = dist.metric
    ginv = metric.inverse(x)
    dy = np.empty(STATE_SIZE)
    dy[:4] = u
    dy[4] = -np.dot(dist.potential.value(x), u)
    du = -np.einsum("kij,i,j->k", christoffel(metric, x, ginv), u, u)
    if charge_to_mass != 0.0:
        F = faraday(dist.potential, x).F
        du = du + charge_to_mass * (ginv @ (F @ u))
    dy[5:] = du
    return dy


def eom_rhs(dist: FramedDistribution, params: ParticleParams, state: GeodesicState) -> np.ndarray:
    """返回 (dx⁰..dx³, dx⁴, du⁰..du³)。"""
    return eom_vector(dist, params.charge_to_mass, state.to_vector())


def lagrange_vector(
    dist: FramedDistribution,
    mass: float,
    y: np.ndarray,
    a0: float,
    lam: float,
) -> LagrangeRHS:
    x, u = y[:4], y[5:9]
    c4 = structure_constants(dist.potential, x)
    residual = c4 @ u
    dy = np.empty(STATE_SIZE)
    dy[:4] = u
    dy[4] = -np.dot(dist.potential.value(x), u)

    if a0 == 1:
        metric = dist.metric
        g = metric.value(x)
        metric.inverse(x)  # 退化检查
        gamma_low = np.einsum("kl,lij->kij", g, christoffel(metric, x))
        # m·g_il(dvˡ/dt) = −m·Γ_{i,jk}vʲvᵏ − λ·c⁴ᵢⱼvʲ
        rhs_low = -mass * np.einsum("kij,i,j->k", gamma_low, u, u) - lam * residual
        dy[5:] = np.linalg.solve(mass * g, rhs_low)
    elif a0 == 0:
        scale = np.linalg.norm(c4) * np.linalg.norm(u)
        worst = float(np.max(np.abs(residual)))
        if worst > 1e-12 * scale:
            raise AbnormalityViolation(
                f"速度 {u} 不在 F 的核中: max|Σ F_jk uʲ| = {worst:.3e}"
            )
        # 非正常曲线只做逐点核成员检查，不给出速度演化
        dy[5:] = 0.0
    else:
        raise DomainError(f"a0 需归一化为 0 或 1，收到 {a0}")

    return LagrangeRHS(derivative=dy, dlambda=0.0, residual=residual)


def lagrange_rhs(
    dist: FramedDistribution,
    params: ParticleParams,
    state: GeodesicState,
    a0: float,
    lam: float,
) -> LagrangeRHS:
    """Lagrange 形式右端项；a0=1 时与 eom_rhs（q = λ）逐分量一致。"""
    return lagrange_vector(dist, params.mass, state.to_vector(), a0, lam)
