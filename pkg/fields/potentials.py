"""
内置 4-势。

按字符串键选择:
- zero:               A ≡ 0
- constant-magnetic:  A = (0, 0, φx³, 0)，F₂₃ = −φ，即 H_x = φ
- constant-electric:  A = (−E x¹, 0, 0, 0)，F₀₁ = E
- generic-em:         A_k = ½ Σ_j F_jk x^j，F 由常矢量 E、H 组装
- polynomial:         每个 A_k 为多项式（见 fields.polynomial）
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .base import DEFAULT_FD_STEP, PotentialField
from .frame import faraday_from_fields
from .polynomial import Polynomial


def zero_potential(fd_step: float = DEFAULT_FD_STEP) -> PotentialField:
    return PotentialField(
        name="zero",
        eval_fn=lambda x: np.zeros(4),
        jacobian_fn=lambda x: np.zeros((4, 4)),
        fd_step=fd_step,
    )


def constant_magnetic(phi: float = 1.0, fd_step: float = DEFAULT_FD_STEP) -> PotentialField:
    phi = float(phi)
    jac = np.zeros((4, 4))
    jac[2, 3] = phi
    return PotentialField(
        name=f"constant-magnetic(phi={phi:g})",
        eval_fn=lambda x: np.array([0.0, 0.0, phi * x[3], 0.0]),
        jacobian_fn=lambda x: jac.copy(),
        fd_step=fd_step,
    )


def constant_electric(E: float = 1.0, fd_step: float = DEFAULT_FD_STEP) -> PotentialField:
    E = float(E)
    jac = np.zeros((4, 4))
    jac[0, 1] = -E
    return PotentialField(
        name=f"constant-electric(E={E:g})",
        eval_fn=lambda x: np.array([-E * x[1], 0.0, 0.0, 0.0]),
        jacobian_fn=lambda x: jac.copy(),
        fd_step=fd_step,
    )


def generic_em(E=(1.0, 0.0, 0.0), H=(1.0, 0.0, 0.0), fd_step: float = DEFAULT_FD_STEP) -> PotentialField:
    """常电磁场的线性势；E·H ≠ 0 时 F 满秩。"""
    F = faraday_from_fields(E, H).F
    jac = 0.5 * F.T
    return PotentialField(
        name=f"generic-em(E={tuple(E)}, H={tuple(H)})",
        eval_fn=lambda x: 0.5 * (F.T @ x),
        jacobian_fn=lambda x: jac.copy(),
        fd_step=fd_step,
    )


def linear_potential(F, fd_step: float = DEFAULT_FD_STEP) -> PotentialField:
    """给定常反对称矩阵 F 的线性势 A_k = ½ Σ_j F_jk x^j。"""
    F = np.asarray(F, dtype=float)
    F = 0.5 * (F - F.T)
    jac = 0.5 * F.T
    return PotentialField(
        name="linear",
        eval_fn=lambda x: 0.5 * (F.T @ x),
        jacobian_fn=lambda x: jac.copy(),
        fd_step=fd_step,
    )


def polynomial_potential(components, fd_step: float = DEFAULT_FD_STEP) -> PotentialField:
    """
    多项式势。

    Args:
        components: 长度为 4 的序列，每项是 Polynomial 或单项式列表
    """
    if len(components) != 4:
        raise ValueError(f"多项式势需要 4 个分量 A0..A3，收到 {len(components)} 个")
    polys = tuple(
        c if isinstance(c, Polynomial) else Polynomial.from_spec(c) for c in components
    )
    return PotentialField(
        name="polynomial(" + "; ".join(str(p) for p in polys) + ")",
        eval_fn=lambda x: np.array([p(x) for p in polys]),
        jacobian_fn=lambda x: np.stack([p.gradient(x) for p in polys]),
        fd_step=fd_step,
    )


# 势名称 → 构造函数的映射
POTENTIAL_BUILDERS: dict[str, Callable[..., PotentialField]] = {
    "zero": zero_potential,
    "constant-magnetic": constant_magnetic,
    "constant-electric": constant_electric,
    "generic-em": generic_em,
    "polynomial": polynomial_potential,
}


def build_potential(kind: str, **params) -> PotentialField:
    """按名称构造势。未知名称抛出 KeyError。"""
    if kind not in POTENTIAL_BUILDERS:
        raise KeyError(f"未知势: {kind}（可选: {', '.join(POTENTIAL_BUILDERS)}）")
    return POTENTIAL_BUILDERS[kind](**params)
