"""
内置分布度规。

- minkowski:  g = diag(1, −1, −1, −1)
- constant:   用户给定的常对称矩阵
- polynomial: 每个分量 g_ij (i ≤ j) 为多项式，按对称性补全
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .base import DEFAULT_FD_STEP, DistributionMetric
from .polynomial import Polynomial

MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])


def minkowski() -> DistributionMetric:
    return constant_metric(MINKOWSKI, name="minkowski")


def constant_metric(matrix, name: str = "constant") -> DistributionMetric:
    g = np.array(matrix, dtype=float)
    return DistributionMetric(
        name=name,
        eval_fn=lambda x: g.copy(),
        constant=True,
    )


def polynomial_metric(
    entries: dict,
    fd_step: float = DEFAULT_FD_STEP,
    sample_points: tuple = ((0.0, 0.0, 0.0, 0.0),),
) -> DistributionMetric:
    """
    多项式度规。

    Args:
        entries: {"g00": 单项式列表, "g11": ..., "g23": ...}，未给出的分量为 0
    """
    polys: dict[tuple[int, int], Polynomial] = {}
    for key, raw in entries.items():
        key = str(key)
        if len(key) != 3 or key[0] != "g" or not key[1:].isdigit():
            raise ValueError(f"度规分量键应形如 g01，收到 {key!r}")
        i, j = int(key[1]), int(key[2])
        if i > 3 or j > 3:
            raise ValueError(f"度规分量下标越界: {key}")
        poly = raw if isinstance(raw, Polynomial) else Polynomial.from_spec(raw)
        polys[(min(i, j), max(i, j))] = poly

    def value(x: np.ndarray) -> np.ndarray:
        g = np.zeros((4, 4))
        for (i, j), p in polys.items():
            g[i, j] = g[j, i] = p(x)
        return g

    def jacobian(x: np.ndarray) -> np.ndarray:
        dg = np.zeros((4, 4, 4))
        for (i, j), p in polys.items():
            dg[i, j] = dg[j, i] = p.gradient(x)
        return dg

    return DistributionMetric(
        name="polynomial",
        eval_fn=value,
        jacobian_fn=jacobian,
        fd_step=fd_step,
        constant=all(p.is_constant for p in polys.values()),
        sample_points=sample_points,
    )


METRIC_BUILDERS: dict[str, Callable[..., DistributionMetric]] = {
    "minkowski": minkowski,
    "constant": constant_metric,
    "polynomial": polynomial_metric,
}


def build_metric(kind: str, **params) -> DistributionMetric:
    if kind not in METRIC_BUILDERS:
        raise KeyError(f"未知度规: {kind}（可选: {', '.join(METRIC_BUILDERS)}）")
    return METRIC_BUILDERS[kind](**params)
