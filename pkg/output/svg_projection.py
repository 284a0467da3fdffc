"""
点云正交投影 SVG 生成器。

使用 Jinja2 模板生成两张独立 SVG:
- (x², x³) 投影
- (x², x⁴) 投影

每个 α 对应一条沿 p 的折线，另画坐标轴与标题。
输出到 <out>.x2x3.svg 与 <out>.x2x4.svg
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from jinja2 import BaseLoader, Environment

from magnetic_analytic.clouds import PointCloud

from .exporters import atomic_write_text

logger = logging.getLogger(__name__)


# ===== Jinja2 SVG 模板 =====

SVG_TEMPLATE = """\
<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{{ size }}" height="{{ size }}" viewBox="0 0 {{ size }} {{ size }}">
  <title>{{ title }}</title>
  <rect x="0" y="0" width="{{ size }}" height="{{ size }}" fill="white"/>
  <g stroke="#9CA3AF" stroke-width="1">
    <line x1="{{ margin }}" y1="{{ axis_y }}" x2="{{ size - margin }}" y2="{{ axis_y }}"/>
    <line x1="{{ axis_x }}" y1="{{ margin }}" x2="{{ axis_x }}" y2="{{ size - margin }}"/>
  </g>
  <g font-family="sans-serif" font-size="12" fill="#374151">
    <text x="{{ size - margin }}" y="{{ x_label_y }}" text-anchor="end">{{ x_label }}</text>
    <text x="{{ y_label_x }}" y="{{ margin - 6 }}">{{ y_label }}</text>
    <text x="{{ margin }}" y="{{ size - 12 }}">{{ caption }}</text>
  </g>
  <g fill="none" stroke="{{ color }}" stroke-width="0.6" stroke-opacity="0.7">
{% for line in polylines %}
    <polyline points="{{ line }}"/>
{% endfor %}
  </g>
</svg>
"""

PROJECTIONS = {
    "x2x3": ("x2", "x3", "#2563EB"),
    "x2x4": ("x2", "x4", "#D97706"),
}


class SvgProjectionWriter:
    """点云投影 SVG 生成器。"""

    def __init__(self, size: int = 600, margin: int = 40):
        self.size = size
        self.margin = margin
        self.env = Environment(loader=BaseLoader(), autoescape=False)
        self.template = self.env.from_string(SVG_TEMPLATE)

    def generate(self, cloud: PointCloud, projection: str) -> str:
        """
        生成单个投影的 SVG 文本。

        Args:
            cloud: sphere 或 wavefront 点云
            projection: "x2x3" 或 "x2x4"
        """
        x_name, y_name, color = PROJECTIONS[projection]
        xs, ys = cloud.column(x_name), cloud.column(y_name)
        x_map, x_zero = self._axis_map(xs, flip=False)
        y_map, y_zero = self._axis_map(ys, flip=True)

        shape = (cloud.meta.alpha_count, cloud.meta.p_count)
        px = x_map(xs).reshape(shape)
        py = y_map(ys).reshape(shape)
        polylines = [
            " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(row_x, row_y))
            for row_x, row_y in zip(px, py)
        ]

        spec = cloud.meta
        return self.template.render(
            size=self.size,
            margin=self.margin,
            axis_x=f"{x_zero:.2f}",
            axis_y=f"{y_zero:.2f}",
            x_label_y=f"{y_zero - 6:.2f}",
            y_label_x=f"{x_zero + 6:.2f}",
            x_label=x_name,
            y_label=y_name,
            title=f"{cloud.kind} projection ({x_name}, {y_name})",
            caption=(
                f"{cloud.kind}: s={spec.radius_s:g}, phi={spec.phi:g}, "
                f"p in [{spec.p_min:.4g}, {spec.p_max:.4g}], grid {spec.alpha_count}x{spec.p_count}"
            ),
            color=color,
            polylines=polylines,
        )

    def save(self, cloud: PointCloud, out_path: Path) -> list[Path]:
        """生成并保存两张投影，返回文件路径列表。"""
        out_path = Path(out_path)
        paths = []
        for projection in PROJECTIONS:
            path = out_path.with_name(f"{out_path.stem}.{projection}.svg")
            atomic_write_text(path, self.generate(cloud, projection))
            paths.append(path)
        logger.info(f"SVG 投影已保存: {', '.join(str(p) for p in paths)}")
        return paths

    # ===== 辅助方法 =====

    def _axis_map(self, values: np.ndarray, flip: bool):
        """数据坐标 → 画布坐标的线性映射，以及 0 所在的画布位置（超出范围时取边界）。"""
        lo, hi = float(np.min(values)), float(np.max(values))
        if hi - lo < 1e-300:
            lo, hi = lo - 1.0, hi + 1.0
        span = self.size - 2 * self.margin

        def mapping(v):
            frac = (np.asarray(v, dtype=float) - lo) / (hi - lo)
            if flip:
                frac = 1.0 - frac
            return self.margin + frac * span

        zero = float(mapping(min(max(0.0, lo), hi)))
        return mapping, zero
