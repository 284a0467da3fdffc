"""
大 p 渐近与 x⁴ 回返距离。

对规范化闭式解有精确分解 x⁴(t) = −φt/(2p) + (φ/p²)·B(α, pt mod 2π)，
因此 x⁴ + φt/(2p) 的余项是 O(1/p²)，端点落在以 x⁴ 为轴、倾角
κ = (|φ|/4)t 的锥内。
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fields.errors import DomainError

from .closed_form import canonical_endpoint


@dataclass(frozen=True)
class ConeRow:
    p: float
    residual: float
    inclination_factor: float
    inside_cone: bool


@dataclass(frozen=True)
class ConeReport:
    s: float
    phi: float
    rows: list[ConeRow] = field(default_factory=list)
    slope: float | None = None

    @property
    def inside_cone(self) -> bool:
        return all(row.inside_cone for row in self.rows)

    @property
    def max_residual(self) -> float:
        return max((row.residual for row in self.rows), default=0.0)


def _log_slope(xs, ys) -> float | None:
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if len(xs) < 2 or np.any(ys <= 0):
        return None
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def cone_bound_check(
    s: float,
    phi: float,
    p_values,
    alpha_count: int = 64,
    phase_count: int = 64,
) -> ConeReport:
    """
    检查 x⁴(s) = −φs/(2p) + O(1/p²) 与锥包含。

    余项 r(p) 取 α 网格与末端相位 ψ ∈ [0, 2π) 上的最大值（长度取 t = s + ψ/|p|），
    这样 ps 恰为 2π 整数倍时不会得到退化的零余项。
    锥包含按每个离轴端点检查 |x⁴|/ρ ≥ κ(1 − 3/(|p|t))，κ = (|φ|/4)t。

    锥以 x⁴ 轴为轴、顶点在原点，内部是 |x⁴|/ρ ≥ κ（ρ 为到 x⁴ 轴的平面距离）。
    端点所在的圆经过 x⁴ 轴附近，ρ → 0 时 |x⁴|/ρ 无界，因此 max |x⁴|/ρ ≤ κ 形式的
    上界检查在轴附近必然失败；这里报告的是 min |x⁴|/ρ，并与带 O(1/p) 弦修正的
    下界比较。轴上的端点按定义在锥内，不参与比较。
    """
    p_values = [float(p) for p in p_values]
    for p in p_values:
        if abs(p) * s < 4 * np.pi:
            raise DomainError(f"锥界检查要求 |p|·s ≥ 4π，p={p:g} 时为 {abs(p) * s:.6g}")

    alphas = np.linspace(-np.pi, np.pi, alpha_count, endpoint=False)
    phases = np.linspace(0.0, 2 * np.pi, phase_count, endpoint=False)
    rows = []
    for p in p_values:
        t = s + phases / abs(p)
        alpha_grid, t_grid = np.meshgrid(alphas, t, indexing="ij")
        x2, x3, x4 = canonical_endpoint(alpha_grid, p, phi, t_grid)
        residual = float(np.max(np.abs(x4 + phi * t_grid / (2 * p))))

        rho = np.hypot(x2, x3)
        off_axis = rho > 1e-9 / abs(p)
        kappa = abs(phi) * t_grid / 4
        bound = kappa * (1 - 3 / (abs(p) * t_grid))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.abs(x4) / rho
        inside = bool(np.all(ratio[off_axis] >= bound[off_axis] - 1e-9 * kappa[off_axis]))
        if phi != 0 and np.any(off_axis):
            factor = float(np.min(ratio[off_axis] / kappa[off_axis]))
        else:
            factor = 1.0
        rows.append(ConeRow(p=p, residual=residual, inclination_factor=factor, inside_cone=inside))

    slope = _log_slope([abs(r.p) for r in rows], [r.residual for r in rows])
    return ConeReport(s=s, phi=phi, rows=rows, slope=slope)


def x4_return_distance(s: float, phi: float, k: int, theta: float = 0.0) -> float:
    """
    p = 2πk/t + θ 处 x⁴ 的两项展开（t = s）:
    x⁴ = −φt²/(4πk) + φt³θ/(4π²k²) + O(θ²)。
    """
    if k == 0:
        raise DomainError("k 不能为 0：k = 0 对应 p → 0 的直线极限")
    return -phi * s * s / (4 * np.pi * k) + phi * s ** 3 * theta / (4 * np.pi ** 2 * k * k)
