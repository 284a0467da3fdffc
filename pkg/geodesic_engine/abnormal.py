"""
非正常测地线（a₀ = 0）：速度满足 Σ F_jk uʲ = 0，即位于 F 的核中。

核用奇异值分解的数值秩计算，阈值 1e−12·σ_max。
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fields.frame import FaradayTensor

DEFAULT_RCOND = 1e-12


@dataclass(frozen=True)
class AbnormalKernel:
    """F 的核：欧氏正交归一基（每行一个向量）与 F 的数值秩。"""

    basis: np.ndarray
    rank_F: int
    singular_values: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def contains(self, u, rtol: float = 1e-10) -> bool:
        """u 是否（在容差内）属于核的张成空间。"""
        u = np.asarray(u, dtype=float)
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return True
        if self.dimension == 0:
            return False
        projection = self.basis.T @ (self.basis @ u)
        return bool(np.linalg.norm(u - projection) <= rtol * norm)


def abnormal_kernel(F: FaradayTensor, rcond: float = DEFAULT_RCOND) -> AbnormalKernel:
    """
    计算 {u : Σⱼ F_jk uʲ = 0}。

    方程按列作用（uᵀF = 0），等价于 Fᵀ u = 0；F 反对称，故核与 F u = 0 相同。
    """
    matrix = np.asarray(F.F, dtype=float).T
    _, s, vh = np.linalg.svd(matrix)
    s_max = float(s[0]) if s.size else 0.0
    if s_max == 0.0:
        return AbnormalKernel(basis=np.eye(4), rank_F=0, singular_values=s)
    rank = int(np.sum(s > rcond * s_max))
    return AbnormalKernel(basis=vh[rank:].copy(), rank_F=rank, singular_values=s)


def kernel_residual(F: FaradayTensor, v) -> float:
    """max_k |Σⱼ F_jk vʲ|。"""
    return float(np.max(np.abs(np.asarray(v, dtype=float) @ F.F)))
