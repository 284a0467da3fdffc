"""
标架向量场的 Lie 括号。

[eᵢ, eⱼ] = −F_ij ∂₄：在标架 (e₀..e₃, ∂₄) 下前四个分量为 0，第五个为 −F_ij(x)。
coordinate_bracket 用坐标表达式的中心差分独立计算同一个括号，用于交叉验证。
"""

from __future__ import annotations

import numpy as np

from fields.base import PotentialField, as_point, central_jacobian
from fields.frame import faraday


def _check_index(i: int) -> None:
    if i not in range(4):
        raise ValueError(f"标架下标必须在 0..3，收到 {i}")


def frame_bracket(potential: PotentialField, x, i: int, j: int) -> np.ndarray:
    """[eᵢ, eⱼ] 在标架 (e₀..e₃, ∂₄) 下的分量。"""
    _check_index(i)
    _check_index(j)
    bracket = np.zeros(5)
    bracket[4] = -faraday(potential, x).F[i, j]
    return bracket


def coordinate_to_frame(potential: PotentialField, x, vector) -> np.ndarray:
    """坐标分量 (V⁰..V⁴) → 标架分量：V = Σ Vᵏeₖ + (V⁴ + Σ AₖVᵏ)∂₄。"""
    vector = np.asarray(vector, dtype=float)
    A = potential.value(x)
    return np.append(vector[:4], vector[4] + np.dot(A, vector[:4]))


def coordinate_bracket(potential: PotentialField, x, i: int, j: int) -> np.ndarray:
    """
    由坐标表达式 eᵢ = ∂ᵢ − Aᵢ∂₄ 直接差分计算 [eᵢ, eⱼ]，返回标架分量。

    [X, Y]ᵃ = Xᵇ∂_bYᵃ − Yᵇ∂_bXᵃ；各分量与 x⁴ 无关，故只对 x⁰..x³ 求导。
    """
    _check_index(i)
    _check_index(j)
    point = as_point(x)

    def field_component(k: int):
        def component(y: np.ndarray) -> np.ndarray:
            v = np.zeros(5)
            v[k] = 1.0
            v[4] = -potential.eval_fn(y)[k]
            return v

        return component

    d_ei = central_jacobian(field_component(i), point, potential.fd_step)  # [a, b] = ∂_b e_iᵃ
    d_ej = central_jacobian(field_component(j), point, potential.fd_step)
    ei = field_component(i)(point)
    ej = field_component(j)(point)
    coords = d_ej @ ei[:4] - d_ei @ ej[:4]
    return coordinate_to_frame(potential, point, coords)


def bracket_table(potential: PotentialField, x) -> np.ndarray:
    """全部括号 [eᵢ, eⱼ]，形状 (4, 4, 5)。"""
    F = faraday(potential, x).F
    table = np.zeros((4, 4, 5))
    table[:, :, 4] = -F
    return table
