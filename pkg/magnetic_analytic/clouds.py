"""
测地球面与非完整波前的点云采样。

- sphere_sample:    B(s) = {γ_{α,p}(s) | α ∈ [−π, π], |ps| ≤ 2π}
- wavefront_sample: 不做最优性截断，|ps| > 2π 的非最优测地线也参与

网格在 (α, p) 上均匀；输出按 (α 下标, p 下标) 行优先排列，与执行顺序无关。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from fields.errors import SpecError

from .closed_form import canonical_endpoint

logger = logging.getLogger(__name__)

CLOUD_KINDS = ("sphere", "wavefront")
CLOUD_COLUMNS = ("x2", "x3", "x4", "alpha", "p", "t")

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SphereSpec:
    radius_s: float = 1.0
    alpha_count: int = 256
    p_count: int = 256
    p_min: float = 0.0
    p_max: float = _TWO_PI
    phi: float = 1.0

    def __post_init__(self) -> None:
        if not self.radius_s > 0:
            raise SpecError(f"半径 s 必须为正数，收到 {self.radius_s}")
        if self.alpha_count < 2 or self.p_count < 2:
            raise SpecError(
                f"网格至少 2×2，收到 {self.alpha_count}×{self.p_count}"
            )
        if not self.p_min <= self.p_max:
            raise SpecError(f"p_min={self.p_min} 大于 p_max={self.p_max}")
        if not all(np.isfinite([self.p_min, self.p_max, self.phi])):
            raise SpecError("p 范围与 φ 必须有限")

    @property
    def max_phase(self) -> float:
        return max(abs(self.p_min), abs(self.p_max)) * self.radius_s

    def to_dict(self) -> dict:
        return {
            "radius_s": self.radius_s,
            "alpha_count": self.alpha_count,
            "p_count": self.p_count,
            "p_min": self.p_min,
            "p_max": self.p_max,
            "phi": self.phi,
        }


@dataclass(frozen=True)
class PointCloud:
    """
    带标签的端点样本。

    points 每行为 (x2, x3, x4, alpha, p, t)。
    """

    points: np.ndarray
    kind: str
    meta: SphereSpec
    columns: tuple[str, ...] = field(default=CLOUD_COLUMNS)

    def __len__(self) -> int:
        return len(self.points)

    def column(self, name: str) -> np.ndarray:
        return self.points[:, self.columns.index(name)]


def _sample(spec: SphereSpec, kind: str) -> PointCloud:
    alphas = np.linspace(-np.pi, np.pi, spec.alpha_count)
    ps = np.linspace(spec.p_min, spec.p_max, spec.p_count)
    alpha_grid, p_grid = np.meshgrid(alphas, ps, indexing="ij")
    t_grid = np.full_like(alpha_grid, spec.radius_s)
    x2, x3, x4 = canonical_endpoint(alpha_grid, p_grid, spec.phi, t_grid)
    points = np.column_stack(
        [a.ravel() for a in (x2, x3, x4, alpha_grid, p_grid, t_grid)]
    )
    logger.debug(f"{kind} 采样完成: {len(points)} 个端点")
    return PointCloud(points=points, kind=kind, meta=spec)


def sphere_sample(spec: SphereSpec) -> PointCloud:
    """测地球面；要求 |p|·s ≤ 2π（最优测地线）。"""
    if spec.max_phase > _TWO_PI * (1 + 1e-12):
        raise SpecError(
            f"测地球面要求 |p|·s ≤ 2π，当前 max|p|·s = {spec.max_phase:.6g}；"
            f"非最优区域请使用 wavefront"
        )
    return _sample(spec, "sphere")


def wavefront_sample(spec: SphereSpec) -> PointCloud:
    """非完整波前；不做最优性过滤。"""
    if spec.max_phase < np.pi:
        logger.warning(
            f"波前规格 max|p|·s = {spec.max_phase:.6g} < π，未进入非最优区域"
        )
    return _sample(spec, "wavefront")


def axis_crossings(s: float, phi: float, k_max: int) -> list[tuple[int, float, float]]:
    """
    端点回到 x⁴ 轴的位置：pt = 2πk 时端点与 α 无关，等于 (0, 0, −φs²/(4πk))。

    Returns:
        [(k, p, x⁴), ...]，k = ±1..±k_max
    """
    rows = []
    for k in [k for k in range(-k_max, k_max + 1) if k != 0]:
        p = _TWO_PI * k / s
        _, _, x4 = canonical_endpoint(0.0, p, phi, s)
        rows.append((k, p, float(x4)))
    return rows
