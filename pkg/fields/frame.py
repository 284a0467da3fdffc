"""
分布标架上的基本运算。

- faraday: F_jk = ∂A_k/∂x^j − ∂A_j/∂x^k（显式反对称化）
- horizontality_defect / lift_velocity: 水平条件 ω(γ′) = Σ Aᵢvⁱ + v⁴ = 0
- pseudonorm / cone_membership: 分布度规的二次型与因果锥分类

F 的分量约定: F₀₁ = Eₓ, F₁₂ = −H_z, F₂₃ = −H_x（与常见教材符号可能相反）。
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .base import DistributionMetric, Event5, PotentialField, as_point
from .errors import FieldEvaluationError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class FaradayTensor:
    """电磁场张量 F_jk，构造时已反对称化。"""

    F: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.F))

    @property
    def electric(self) -> np.ndarray:
        return self.F[0, 1:].copy()

    @property
    def magnetic(self) -> np.ndarray:
        return np.array([self.F[3, 2], self.F[1, 3], self.F[2, 1]])


class ConeClass(str, Enum):
    TIMELIKE_FUTURE = "timelike-future"
    NULL_FUTURE = "null-future"
    SPACELIKE = "spacelike"
    PAST = "past"
    ZERO = "zero"


def faraday(potential: PotentialField, x) -> FaradayTensor:
    """由 4-势计算 F_jk；有解析雅可比时直接使用，否则中心差分。"""
    jac = potential.jacobian(as_point(x))
    bad = np.argwhere(~np.isfinite(jac))
    if bad.size:
        k, j = bad[0]
        raise FieldEvaluationError(
            f"势 {potential.name} 在 {np.asarray(x)} 处导数 ∂A_{k}/∂x^{j} 非有限: {jac[k, j]}"
        )
    # jac[k, j] = ∂A_k/∂x^j，故 ∂_j A_k 矩阵为 jac.T
    F = jac.T - jac
    return FaradayTensor(0.5 * (F - F.T))


def faraday_from_fields(E, H) -> FaradayTensor:
    """按张量矩阵约定由电场 E 与磁场 H 组装 F。"""
    ex, ey, ez = (float(v) for v in E)
    hx, hy, hz = (float(v) for v in H)
    F = np.array(
        [
            [0.0, ex, ey, ez],
            [-ex, 0.0, -hz, hy],
            [-ey, hz, 0.0, -hx],
            [-ez, -hy, hx, 0.0],
        ]
    )
    return FaradayTensor(F)


def frame_vectors(potential: PotentialField, x) -> np.ndarray:
    """标架 eᵢ = ∂ᵢ − Aᵢ∂₄ 的坐标表示，形状 (4, 5)。"""
    A = potential.value(x)
    return np.hstack([np.eye(4), -A[:, None]])


def horizontality_defect(potential: PotentialField, x: Event5, v5) -> float:
    """ω(v) = Σ Aᵢ(x)vⁱ + v⁴；0 表示水平。"""
    v5 = np.asarray(v5, dtype=float)
    A = potential.value(x.base)
    return float(np.dot(A, v5[:4]) + v5[4])


def lift_velocity(potential: PotentialField, x, u) -> float:
    """水平提升: dx⁴/dt = −Σ Aⱼ(x) uʲ。"""
    A = potential.value(x)
    return float(-np.dot(A, np.asarray(u, dtype=float)))


def pseudonorm(metric: DistributionMetric, x, u) -> float:
    """二次型 Σ g_ij uⁱuʲ（不开方，带符号）。"""
    u = np.asarray(u, dtype=float)
    return float(u @ metric.value(x) @ u)


def time_orientation(metric: DistributionMetric, x) -> np.ndarray:
    """
    未来指向的参考类时向量 T：g(x) 唯一正特征值对应的单位特征向量。

    取 T⁰ > 0；T⁰ 为零时取第一个非零分量为正。g^{00} > 0 时按 g(u, T) 的符号
    定向与按 u⁰ 的符号定向一致。
    """
    w, v = np.linalg.eigh(metric.value(x))
    T = v[:, int(np.argmax(w))]
    lead = T[np.flatnonzero(np.abs(T) > 1e-12)[0]] if abs(T[0]) <= 1e-12 else T[0]
    return T if lead > 0 else -T


def cone_membership(metric: DistributionMetric, x, u) -> ConeClass:
    """按二次型符号分类，再以 g(u, T) 的符号区分未来与过去（T 见 time_orientation）。"""
    u = np.asarray(u, dtype=float)
    if not np.any(u):
        return ConeClass.ZERO
    g = metric.value(x)
    q = float(u @ g @ u)
    scale = float(np.abs(u) @ np.abs(g) @ np.abs(u))
    if abs(q) <= 4 * _EPS * scale:
        q = 0.0
    if q < 0:
        return ConeClass.SPACELIKE
    if float(u @ g @ time_orientation(metric, x)) <= 0:
        return ConeClass.PAST
    return ConeClass.TIMELIKE_FUTURE if q > 0 else ConeClass.NULL_FUTURE
