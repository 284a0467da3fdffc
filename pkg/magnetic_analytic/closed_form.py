"""
常磁场中测地线的闭式解。

A = (0, 0, φx³, 0)，平面 (x², x³) 上单位速率 (u²)² + (u³)² = 1，初始
u² = sin α, u³ = cos α，p = qφ/m。规范化 b₂ = cos α/p, b₃ = −sin α/p, x⁴(0) = 0 时:

    x²(t) = (cos α − cos(α+pt)) / p
    x³(t) = (sin(α+pt) − sin α) / p
    x⁴(t) = φ/(4p²)(−2pt + sin(2α+2pt) − sin 2α) + φ/p² · sin α (cos α − cos(α+pt))

公式在 p = 0 处有可去奇点。这里把它改写成 θ = pt 的三个核函数
sin θ/θ、(1 − cos θ)/θ²、(θ − sin θ)/θ³ 的组合；|θ| < SERIES_SWITCH 时各核用
6 阶 Taylor 多项式，否则精确计算。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

SERIES_SWITCH = 1e-4

# (θ − sin θ)/θ³ 在 |θ| < 0.5 内用级数，避免相消
_CUBIC_SERIES_RADIUS = 0.5
_CUBIC_COEFFS = np.array(
    [(-1) ** k / float(np.prod(np.arange(1, 2 * k + 4))) for k in range(9)]
)


@dataclass(frozen=True)
class MagneticGeodesicParams:
    """
    螺旋线测地线参数。

    b2/b3/b4 全为 None 时使用规范化（起点为原点，x⁴(0) = 0）；
    给出时按未规范化公式求值，此时要求 p ≠ 0。
    """

    alpha: float
    p: float
    phi: float = 1.0
    b2: Optional[float] = None
    b3: Optional[float] = None
    b4: Optional[float] = None

    def __post_init__(self) -> None:
        if not np.isfinite(self.phi):
            raise ValueError(f"φ 非有限: {self.phi}")
        given = [b is not None for b in (self.b2, self.b3, self.b4)]
        if any(given) and not all(given):
            raise ValueError("b2、b3、b4 需要同时给出或同时省略")
        if all(given) and self.p == 0:
            raise ValueError("未规范化的闭式解要求 p ≠ 0")

    @property
    def is_canonical(self) -> bool:
        return self.b2 is None

    @property
    def center(self) -> tuple[float, float]:
        """圆心 (b₂, b₃)；规范化时为 (cos α/p, −sin α/p)。"""
        if not self.is_canonical:
            return float(self.b2), float(self.b3)
        return float(np.cos(self.alpha) / self.p), float(-np.sin(self.alpha) / self.p)


def canonical_params(alpha: float, p: float, phi: float = 1.0) -> MagneticGeodesicParams:
    return MagneticGeodesicParams(alpha=alpha, p=p, phi=phi)


def initial_velocity(alpha: float, u0: float = 0.0) -> np.ndarray:
    """闭式解对应的积分器初速度 (u⁰, 0, sin α, cos α)。"""
    return np.array([u0, 0.0, np.sin(alpha), np.cos(alpha)])


def _sinc_kernel(theta, series: bool):
    if series:
        t2 = theta * theta
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0
    return np.sinc(theta / np.pi)


def _versine_kernel(theta, series: bool):
    """(1 − cos θ)/θ² = ½ (sin(θ/2)/(θ/2))²。"""
    if series:
        t2 = theta * theta
        return 0.5 - t2 / 24.0 + t2 * t2 / 720.0 - t2 * t2 * t2 / 40320.0
    half = np.sinc(theta / (2.0 * np.pi))
    return 0.5 * half * half


def _cubic_kernel(theta, series: bool):
    """(θ − sin θ)/θ³。"""
    t2 = theta * theta
    if series:
        return 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0 - t2 * t2 * t2 / 362880.0
    near = np.polynomial.polynomial.polyval(t2, _CUBIC_COEFFS)
    with np.errstate(divide="ignore", invalid="ignore"):
        far = (theta - np.sin(theta)) / (theta * t2)
    return np.where(np.abs(theta) < _CUBIC_SERIES_RADIUS, near, far)


def _canonical_branch(alpha, theta, phi, t, series: bool):
    sa, ca = np.sin(alpha), np.cos(alpha)
    k1 = _sinc_kernel(theta, series)
    k2 = _versine_kernel(theta, series)
    x2 = t * (sa * k1 + ca * theta * k2)
    x3 = t * (ca * k1 - sa * theta * k2)
    x4 = phi * t * t * (
        0.5 * np.sin(2.0 * alpha) * (k2 - 2.0 * _versine_kernel(2.0 * theta, series))
        - 2.0 * theta * np.cos(2.0 * alpha) * _cubic_kernel(2.0 * theta, series)
        - theta * sa * sa * _cubic_kernel(theta, series)
    )
    return x2, x3, x4


def canonical_endpoint(alpha, p, phi, t):
    """规范化闭式解，对 alpha/p/phi/t 广播。"""
    alpha, p, phi, t = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (alpha, p, phi, t))
    )
    theta = p * t
    exact = _canonical_branch(alpha, theta, phi, t, series=False)
    taylor = _canonical_branch(alpha, theta, phi, t, series=True)
    use_series = np.abs(theta) < SERIES_SWITCH
    return tuple(np.where(use_series, s, e) for s, e in zip(taylor, exact))


def _scalarize(values):
    return tuple(float(v) if np.ndim(v) == 0 else v for v in values)


def closed_form(params: MagneticGeodesicParams, t):
    """
    返回 (x², x³, x⁴)；t 可为标量或数组。

    未规范化参数时，在规范化解上叠加圆心平移与 x⁴ 的对应修正。
    """
    x2, x3, x4 = canonical_endpoint(params.alpha, params.p, params.phi, t)
    if params.is_canonical:
        return _scalarize((x2, x3, x4))

    alpha, p, phi = params.alpha, params.p, params.phi
    d2 = params.b2 - np.cos(alpha) / p
    d3 = params.b3 + np.sin(alpha) / p
    x4_start = phi / (4 * p * p) * np.sin(2 * alpha) + phi / p * params.b3 * np.cos(alpha) + params.b4
    return _scalarize((x2 + d2, x3 + d3, x4 - phi * d3 * x2 + x4_start))


def closed_form_series(params: MagneticGeodesicParams, t):
    """强制使用 Taylor 分支（用于分支连续性检查）。"""
    alpha, p, phi, t = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (params.alpha, params.p, params.phi, t))
    )
    return _scalarize(_canonical_branch(alpha, p * t, phi, t, series=True))


def closed_form_exact(params: MagneticGeodesicParams, t):
    """强制使用精确分支。"""
    alpha, p, phi, t = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (params.alpha, params.p, params.phi, t))
    )
    return _scalarize(_canonical_branch(alpha, p * t, phi, t, series=False))
