"""
增长向量、非完整度与 ball-box 指数。

对本模型，𝒜₁ = 𝒜 维数为 4；F(x) ≠ 0 时 [𝒜, 𝒜] 补上 ∂₄，𝒜₂ 维数为 5，
非完整度为 2；F 在 x 处为零时序列停在 4。
ball-box 指数 φ(i) = j 当且仅当 n_{j−1} < i ≤ n_j（n₀ = 0）。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from fields.base import Event5, FramedDistribution, PotentialField, as_point
from fields.errors import DomainError
from fields.frame import faraday
from geodesic_engine.integrator import IntegratorConfig, integrate
from geodesic_engine.rhs import GeodesicState, ParticleParams

logger = logging.getLogger(__name__)

FIELD_THRESHOLD = 1e-12


@dataclass(frozen=True)
class GrowthVector:
    dims: tuple[int, ...]
    degree: int

    def __post_init__(self) -> None:
        dims = tuple(int(n) for n in self.dims)
        if not dims or any(b <= a for a, b in zip(dims, dims[1:])) or dims[0] <= 0:
            raise ValueError(f"增长向量必须为严格递增的正整数序列，收到 {self.dims}")
        if self.degree != len(dims):
            raise ValueError(f"非完整度 {self.degree} 与序列长度 {len(dims)} 不符")
        object.__setattr__(self, "dims", dims)


@dataclass(frozen=True)
class BoxExponents:
    phi: tuple[int, ...]


# 3 维流形上的 2 维分布: n₀ = 0, n₁ = 2, n₂ = 3
REFERENCE_2_IN_3 = GrowthVector(dims=(2, 3), degree=2)


def field_is_nonzero(potential: PotentialField, x, threshold: float = FIELD_THRESHOLD) -> bool:
    """max|F_ij| > threshold · max(1, 势导数尺度)。"""
    point = as_point(x)
    F = faraday(potential, point).F
    scale = max(1.0, float(np.max(np.abs(potential.jacobian(point)))))
    return bool(np.max(np.abs(F)) > threshold * scale)


def growth_vector(potential: PotentialField, x, threshold: float = FIELD_THRESHOLD) -> GrowthVector:
    if field_is_nonzero(potential, x, threshold):
        return GrowthVector(dims=(4, 5), degree=2)
    return GrowthVector(dims=(4,), degree=1)


def box_exponents(gv: GrowthVector) -> BoxExponents:
    bounds = (0,) + gv.dims
    phi = []
    for i in range(1, gv.dims[-1] + 1):
        j = next(j for j in range(1, len(bounds)) if bounds[j - 1] < i <= bounds[j])
        phi.append(j)
    return BoxExponents(phi=tuple(phi))


@dataclass(frozen=True)
class BoxRow:
    epsilon: float
    max_fiber: float
    max_base: float
    charges: tuple[float, ...] = ()


@dataclass(frozen=True)
class BoxReport:
    rows: list[BoxRow] = field(default_factory=list)
    fiber_slope: float | None = None
    base_slope: float | None = None
    charge_mode: str = "fixed"

    @property
    def exact_containment(self) -> bool:
        """纤维方向完全没有位移（F ≡ 0）。"""
        return all(row.max_fiber == 0.0 for row in self.rows)


def _log_slope(xs, ys) -> float | None:
    ys = np.asarray(ys, dtype=float)
    if len(ys) < 2 or np.any(ys <= 0):
        return None
    slope, _ = np.polyfit(np.log(np.asarray(xs, dtype=float)), np.log(ys), 1)
    return float(slope)


def _fan_plane(F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """扇面所在平面：F 的两个主右奇异向量；F = 0 时取 (e₂, e₃)。"""
    if not np.any(F):
        return np.eye(4)[2], np.eye(4)[3]
    _, _, vh = np.linalg.svd(F)
    return vh[0], vh[1]


def box_check(
    dist: FramedDistribution,
    params: ParticleParams,
    epsilons,
    samples_per_eps: int = 6,
    steps_per_fan: int = 64,
    charges=None,
) -> BoxReport:
    """
    用长度 ε 的测地线扇估计可达集的尺度指数。

    扇面方向取 F 的主平面内均匀 α。电荷有两种取法，记录在 report.charge_mode:
    - "fixed": 每个 ε 都用 charges 给出的电荷（未给出且 F = 0 时用 params.charge）；
    - "scale-homogeneous": 未给出 charges 且 F ≠ 0 时，取使 |q/m|·max|F|·ε 覆盖
      [−2π, 2π] 的网格（最优扇），此时 x⁴ 的斜率 2 来自扇面本身的尺度不变性。
    对 log max|x⁴| 与 log max|xⁱ|（i ≤ 3）关于 log ε 做线性拟合。
    """
    epsilons = [float(e) for e in epsilons]
    if any(e <= 0 for e in epsilons):
        raise DomainError(f"ε 必须全部为正数，收到 {epsilons}")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise DomainError(f"ε 必须严格递减，收到 {epsilons}")
    if samples_per_eps < 2:
        raise DomainError(f"samples_per_eps 至少为 2，收到 {samples_per_eps}")
    if charges is not None:
        charges = np.asarray(charges, dtype=float).ravel()
        if charges.size == 0 or not np.all(np.isfinite(charges)):
            raise DomainError(f"charges 必须是非空的有限数列，收到 {charges}")

    origin = np.zeros(4)
    F = faraday(dist.potential, origin).F
    v1, v2 = _fan_plane(F)
    f_max = float(np.max(np.abs(F)))
    alphas = np.linspace(-np.pi, np.pi, samples_per_eps, endpoint=False)

    mode = "scale-homogeneous" if charges is None and f_max > 0 else "fixed"
    if charges is None and mode == "fixed":
        charges = np.array([params.charge])

    rows = []
    for eps in epsilons:
        if mode == "scale-homogeneous":
            eps_charges = params.mass * 2 * np.pi / (eps * f_max) * np.linspace(-1.0, 1.0, samples_per_eps)
        else:
            eps_charges = charges
        cfg = IntegratorConfig(step=eps / steps_per_fan, t_end=eps, record_every=steps_per_fan)

        max_fiber = 0.0
        max_base = 0.0
        for q in eps_charges:
            fan_params = ParticleParams(mass=params.mass, charge=float(q))
            for alpha in alphas:
                u = np.cos(alpha) * v1 + np.sin(alpha) * v2
                start = GeodesicState(Event5(origin, 0.0), u / np.linalg.norm(u))
                final = integrate(dist, fan_params, start, cfg).states[-1]
                max_fiber = max(max_fiber, abs(final[4]))
                max_base = max(max_base, float(np.max(np.abs(final[:4]))))
        logger.debug(f"ε={eps:g}: max|x⁴|={max_fiber:.3e}, max|xⁱ|={max_base:.3e}")
        rows.append(
            BoxRow(
                epsilon=eps,
                max_fiber=max_fiber,
                max_base=max_base,
                charges=tuple(float(q) for q in eps_charges),
            )
        )

    return BoxReport(
        rows=rows,
        fiber_slope=_log_slope(epsilons, [r.max_fiber for r in rows]),
        base_slope=_log_slope(epsilons, [r.max_base for r in rows]),
        charge_mode=mode,
    )
