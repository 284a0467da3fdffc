"""
限制在分布上的 4×4 度规的 Christoffel 符号。

先算全下标符号 Γ_{k,ij} = ½(∂ᵢg_kj + ∂ⱼg_ki − ∂_k g_ij)，再用 g^{kl} 升指标。
只需要限制度规非退化，不需要把度规延拓到整个切空间。
"""

from __future__ import annotations

import numpy as np

from fields.base import DistributionMetric, as_point


def christoffel_lower(metric: DistributionMetric, x) -> np.ndarray:
    """全下标 Γ_{k,ij}，形状 (4, 4, 4)，对 (i, j) 对称。"""
    dg = metric.jacobian(as_point(x))  # dg[i, j, k] = ∂_k g_ij
    return 0.5 * (
        np.einsum("kji->kij", dg) + dg - np.einsum("ijk->kij", dg)
    )


def christoffel(metric: DistributionMetric, x, ginv: np.ndarray | None = None) -> np.ndarray:
    """Γᵏᵢⱼ（第一个指标已升），形状 (4, 4, 4)。"""
    if metric.constant:
        return np.zeros((4, 4, 4))
    if ginv is None:
        ginv = metric.inverse(x)
    gamma = np.einsum("lk,kij->lij", ginv, christoffel_lower(metric, x))
    # 消除舍入造成的 (i, j) 不对称
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))
