"""
场对象基类与数据模型定义。

PotentialField 描述 4-势 A(x)，DistributionMetric 描述分布上的度规 g_ij(x)，
二者只依赖 x⁰..x³（柱面条件由类型保证，x⁴ 不在定义域内）。
所有对象构造后不可变，可被任意多个求值方并发读取。
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import yaml
from dotenv import load_dotenv

from .errors import DegenerateMetricError, FieldEvaluationError, SignatureError

# 加载 .env 文件
load_dotenv()

# 项目根目录
PROJECT_ROOT = Path(__file__).resolve().parent.parent

DEFAULT_FD_STEP = 1e-6
DEFAULT_DEGENERACY_TOL = 1e-12

logger = logging.getLogger(__name__)

VectorFn = Callable[[np.ndarray], np.ndarray]


def load_settings() -> dict:
    """加载全局配置文件（SUBLORENTZ_SETTINGS 环境变量可指向其他文件）。"""
    settings_path = Path(
        os.getenv("SUBLORENTZ_SETTINGS", PROJECT_ROOT / "config" / "settings.yaml")
    )
    with open(settings_path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def as_point(x) -> np.ndarray:
    """把输入转换为 4 维时空点，并检查有限性。"""
    point = np.asarray(x, dtype=float)
    if point.shape != (4,):
        raise ValueError(f"时空点需要 4 个分量，收到形状 {point.shape}")
    if not np.all(np.isfinite(point)):
        raise FieldEvaluationError(f"时空点含非有限分量: {point}")
    return point


def central_jacobian(fn: VectorFn, x: np.ndarray, fd_step: float) -> np.ndarray:
    """
    中心差分求导，导数指标放在最后一维。

    步长按坐标相对缩放: h_j = fd_step · max(1, |x_j|)。
    """
    x = np.asarray(x, dtype=float)
    columns = []
    for j in range(4):
        h = fd_step * max(1.0, abs(x[j]))
        shift = np.zeros(4)
        shift[j] = h
        columns.append((np.asarray(fn(x + shift)) - np.asarray(fn(x - shift))) / (2.0 * h))
    return np.stack(columns, axis=-1)


@dataclass(frozen=True)
class Event5:
    """5 维流形上的点：底空间坐标 x⁰..x³ 加纤维坐标 x⁴。"""

    base: np.ndarray
    fiber: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", as_point(self.base))
        if not np.isfinite(self.fiber):
            raise FieldEvaluationError(f"纤维坐标非有限: {self.fiber}")

    def as_array(self) -> np.ndarray:
        return np.append(self.base, self.fiber)


@dataclass(frozen=True)
class PotentialField:
    """
    4-势 A(x)，同时定义电磁场 F 和分布 ω = Σ Aᵢ dxⁱ + dx⁴。

    jacobian(x)[k, j] = ∂A_k/∂x^j；未提供解析雅可比时用中心差分。
    """

    name: str
    eval_fn: VectorFn
    jacobian_fn: Optional[VectorFn] = None
    fd_step: float = DEFAULT_FD_STEP

    def __post_init__(self) -> None:
        if not self.fd_step > 0:
            raise ValueError(f"fd_step 必须为正数，收到 {self.fd_step}")

    def value(self, x) -> np.ndarray:
        return np.asarray(self.eval_fn(as_point(x)), dtype=float)

    def jacobian(self, x) -> np.ndarray:
        point = as_point(x)
        if self.jacobian_fn is not None:
            return np.asarray(self.jacobian_fn(point), dtype=float)
        return central_jacobian(self.eval_fn, point, self.fd_step)

    @property
    def has_analytic_jacobian(self) -> bool:
        return self.jacobian_fn is not None

    def with_fd_step(self, fd_step: float, analytic: bool = True) -> "PotentialField":
        """返回换了差分步长的副本；analytic=False 时丢弃解析雅可比。"""
        return PotentialField(
            name=self.name,
            eval_fn=self.eval_fn,
            jacobian_fn=self.jacobian_fn if analytic else None,
            fd_step=fd_step,
        )

    def gauge_shifted(self, gauge) -> "PotentialField":
        """
        规范变换 A → A + ∇f。

        gauge 需提供 gradient(x) 与 hessian(x)（见 fields.polynomial.Polynomial）。
        原势有解析雅可比时，新势的雅可比为 J_A + Hess f。
        """
        base_eval = self.eval_fn
        base_jac = self.jacobian_fn

        def shifted_eval(x: np.ndarray) -> np.ndarray:
            return np.asarray(base_eval(x), dtype=float) + gauge.gradient(x)

        shifted_jac = None
        if base_jac is not None:

            def shifted_jac(x: np.ndarray) -> np.ndarray:
                return np.asarray(base_jac(x), dtype=float) + gauge.hessian(x)

        return PotentialField(
            name=f"{self.name}+grad({gauge})",
            eval_fn=shifted_eval,
            jacobian_fn=shifted_jac,
            fd_step=self.fd_step,
        )


@dataclass(frozen=True)
class DistributionMetric:
    """
    分布上的度规 g_ij(x)，签名 (+,−,−,−)。

    jacobian(x)[i, j, k] = ∂g_ij/∂x^k。constant=True 表示度规与位置无关，
    此时签名只在构造时校验一次，Christoffel 符号恒为零。
    """

    name: str
    eval_fn: VectorFn
    jacobian_fn: Optional[VectorFn] = None
    fd_step: float = DEFAULT_FD_STEP
    constant: bool = False
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL
    sample_points: tuple = field(default=((0.0, 0.0, 0.0, 0.0),))

    def __post_init__(self) -> None:
        if not self.fd_step > 0:
            raise ValueError(f"fd_step 必须为正数，收到 {self.fd_step}")
        for point in self.sample_points:
            self._check(np.asarray(point, dtype=float))

    def value(self, x) -> np.ndarray:
        return np.asarray(self.eval_fn(as_point(x)), dtype=float)

    def jacobian(self, x) -> np.ndarray:
        point = as_point(x)
        if self.constant:
            return np.zeros((4, 4, 4))
        if self.jacobian_fn is not None:
            return np.asarray(self.jacobian_fn(point), dtype=float)
        return central_jacobian(self.eval_fn, point, self.fd_step)

    def inverse(self, x) -> np.ndarray:
        g = self.value(x)
        self._check_degeneracy(g, x)
        return np.linalg.inv(g)

    def validate(self, x) -> np.ndarray:
        """在 x 处校验对称性、非退化性与签名，返回 g(x)。"""
        if self.constant:
            return self.value(x)
        return self._check(as_point(x))

    def _check(self, x: np.ndarray) -> np.ndarray:
        g = self.value(x)
        if g.shape != (4, 4):
            raise FieldEvaluationError(f"度规 {self.name} 应为 4×4，收到 {g.shape}")
        if not np.all(np.isfinite(g)):
            raise FieldEvaluationError(f"度规 {self.name} 在 {x} 处含非有限分量")
        scale = max(1.0, float(np.max(np.abs(g))))
        asym = np.abs(g - g.T)
        if np.max(asym) > 1e-12 * scale:
            i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
            raise FieldEvaluationError(
                f"度规 {self.name} 不对称: g[{i}][{j}]={g[i, j]!r} ≠ g[{j}][{i}]={g[j, i]!r}"
            )
        self._check_degeneracy(g, x)
        eigenvalues = np.linalg.eigvalsh(g)
        positive = int(np.sum(eigenvalues > 0))
        negative = int(np.sum(eigenvalues < 0))
        if (positive, negative) != (1, 3):
            raise SignatureError(
                f"度规 {self.name} 在 {x} 处签名为 ({positive}+, {negative}−)，"
                f"需要 (+,−,−,−)；特征值 {eigenvalues}"
            )
        return g

    def _check_degeneracy(self, g: np.ndarray, x) -> None:
        det = float(np.linalg.det(g))
        if abs(det) <= self.degeneracy_tol:
            raise DegenerateMetricError(
                f"度规 {self.name} 在 {np.asarray(x)} 处退化: det g = {det:.3e}"
            )


@dataclass(frozen=True)
class FramedDistribution:
    """分布 𝒜：由 4-势给出标架 eᵢ = ∂ᵢ − Aᵢ∂₄，由度规给出内积。"""

    potential: PotentialField
    metric: DistributionMetric

    def gauge_shifted(self, gauge) -> "FramedDistribution":
        return FramedDistribution(self.potential.gauge_shifted(gauge), self.metric)
