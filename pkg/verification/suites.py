"""
验证套件。

每个套件继承 BaseSuite，实现统一的 run() 接口，返回 CheckResult 列表。
CLI 的 verify 子命令按名称从 SUITE_MAP 取套件，逐个 safe_run()。
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from fields.base import Event5, FramedDistribution
from fields.errors import AbnormalityViolation
from fields.frame import faraday
from fields.metrics import minkowski
from fields.polynomial import Polynomial
from fields.potentials import (
    constant_electric,
    constant_magnetic,
    generic_em,
    linear_potential,
    zero_potential,
)
from geodesic_engine.abnormal import abnormal_kernel, kernel_residual
from geodesic_engine.diagnostics import gauge_transform_check
from geodesic_engine.integrator import IntegratorConfig, integrate
from geodesic_engine.rhs import GeodesicState, ParticleParams, lagrange_vector
from magnetic_analytic.asymptotics import cone_bound_check, x4_return_distance
from magnetic_analytic.closed_form import (
    canonical_params,
    closed_form,
    closed_form_exact,
    closed_form_series,
    initial_velocity,
)
from magnetic_analytic.clouds import SphereSpec, axis_crossings, sphere_sample, wavefront_sample
from nonholonomy.brackets import coordinate_bracket, frame_bracket
from nonholonomy.growth import (
    REFERENCE_2_IN_3,
    box_check,
    box_exponents,
    growth_vector,
)

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    """单项检查结果。"""

    suite: str
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""


def magnetic_distribution(phi: float = 1.0) -> FramedDistribution:
    return FramedDistribution(constant_magnetic(phi), minkowski())


def magnetic_start(alpha: float) -> GeodesicState:
    return GeodesicState(Event5(np.zeros(4), 0.0), initial_velocity(alpha))


def magnetic_grid(n: int) -> list[tuple[float, float]]:
    """n×n 的 (α, p) 网格：α ∈ [−π, π]，p ∈ [−2π, 2π]；n 为奇数时含 p = 0 的直线。"""
    return [
        (float(a), float(p))
        for a in np.linspace(-np.pi, np.pi, n)
        for p in np.linspace(-2 * np.pi, 2 * np.pi, n)
    ]


class BaseSuite(ABC):
    """
    验证套件抽象基类。

    所有套件必须继承此类并实现 run() 方法。
    """

    def __init__(self, settings: dict):
        self.settings = settings
        self.logger = logging.getLogger(self.__class__.__name__)

        verify_cfg = settings.get("verify", {})
        self.grid: int = verify_cfg.get("oracle_grid", 5)
        self.random_scenarios: int = verify_cfg.get("random_scenarios", 20)
        self.seed: int = verify_cfg.get("seed", 7)

    @property
    @abstractmethod
    def suite_name(self) -> str:
        """套件名称，如 'oracle'、'gauge'。"""
        ...

    @abstractmethod
    def run(self) -> list[CheckResult]:
        ...

    def check(self, name: str, measured: float, tolerance: float, passed: bool | None = None, detail: str = "") -> CheckResult:
        """默认判据为 measured ≤ tolerance。"""
        measured = float(measured)
        if passed is None:
            passed = bool(measured <= tolerance)
        return CheckResult(
            suite=self.suite_name,
            name=name,
            measured=measured,
            tolerance=float(tolerance),
            passed=bool(passed),
            detail=detail,
        )

    def safe_run(self) -> list[CheckResult]:
        """安全的运行包装器，捕获异常避免单个套件失败影响整体。"""
        try:
            self.logger.info(f"开始验证 [{self.suite_name}] ...")
            results = self.run()
            failed = sum(not r.passed for r in results)
            self.logger.info(f"[{self.suite_name}] 完成，{len(results)} 项检查，{failed} 项失败")
            return results
        except Exception as e:
            self.logger.error(f"[{self.suite_name}] 运行失败: {e}", exc_info=True)
            return [
                CheckResult(
                    suite=self.suite_name,
                    name="exception",
                    measured=float("nan"),
                    tolerance=0.0,
                    passed=False,
                    detail=f"{type(e).__name__}: {e}",
                )
            ]


class ConservationSuite(BaseSuite):
    """常磁场网格上的赝范数守恒、水平性与电荷守恒。"""

    @property
    def suite_name(self) -> str:
        return "conservation"

    def run(self) -> list[CheckResult]:
        dist = magnetic_distribution(1.0)
        cfg = IntegratorConfig(step=1e-3, t_end=1.0)
        drift = defect = fiber = charge_dev = 0.0
        grid = magnetic_grid(self.grid)
        for alpha, p in grid:
            traj = integrate(dist, ParticleParams(mass=1.0, charge=p), magnetic_start(alpha), cfg)
            drift = max(drift, traj.max_pseudonorm_drift)
            defect = max(defect, traj.max_horizontality_defect)
            fiber = max(fiber, traj.max_fiber_drift)
            charge_dev = max(charge_dev, float(np.max(np.abs(traj.momenta[:, 4] - p))))
        return [
            self.check("pseudonorm drift", drift, 1e-9, detail=f"{len(grid)} 条轨迹"),
            self.check("horizontality defect", defect, 1e-12),
            self.check("fiber drift vs quadrature", fiber, 1e-10),
            self.check("p4 = q", charge_dev, 0.0),
        ]


class OracleSuite(BaseSuite):
    """积分器与闭式解、RK4 收敛阶、两种形式的一致性。"""

    @property
    def suite_name(self) -> str:
        return "oracle"

    def run(self) -> list[CheckResult]:
        return [
            self._closed_form_agreement(),
            self._step_halving(),
            self._branch_continuity(),
            self._formulation_equivalence(),
        ]

    def _closed_form_agreement(self) -> CheckResult:
        dist = magnetic_distribution(1.0)
        cfg = IntegratorConfig(step=1e-3, t_end=1.0)
        worst = 0.0
        grid = magnetic_grid(self.grid)
        for alpha, p in grid:
            traj = integrate(dist, ParticleParams(mass=1.0, charge=p), magnetic_start(alpha), cfg)
            expected = np.column_stack(closed_form(canonical_params(alpha, p), traj.t))
            worst = max(worst, float(np.max(np.abs(traj.states[:, 2:5] - expected))))
        return self.check("closed form vs RK4", worst, 1e-8, detail=f"{len(grid)} 条轨迹")

    def _final_error(self, step: float) -> float:
        alpha, p = 0.3, 2 * np.pi
        cfg = IntegratorConfig(step=step, t_end=1.0)
        traj = integrate(magnetic_distribution(1.0), ParticleParams(mass=1.0, charge=p), magnetic_start(alpha), cfg)
        expected = np.array(closed_form(canonical_params(alpha, p), 1.0))
        return float(np.max(np.abs(traj.states[-1, 2:5] - expected)))

    def _step_halving(self) -> CheckResult:
        ratio = self._final_error(0.02) / self._final_error(0.01)
        return self.check("RK4 error ratio (h/2)", ratio, 16.0, passed=14.0 <= ratio <= 18.0, detail="期望 ∈ [14, 18]")

    def _branch_continuity(self) -> CheckResult:
        worst = 0.0
        for alpha in np.linspace(-np.pi, np.pi, 9):
            for theta in (1e-4, -1e-4):
                params = canonical_params(float(alpha), theta)
                series = np.array(closed_form_series(params, 1.0))
                exact = np.array(closed_form_exact(params, 1.0))
                worst = max(worst, float(np.max(np.abs(series - exact))))
        return self.check("series/exact branch at |pt|=1e-4", worst, 1e-12)

    def _formulation_equivalence(self) -> CheckResult:
        rng = np.random.default_rng(self.seed)
        cfg = IntegratorConfig(step=1e-2, t_end=1.0)
        worst = 0.0
        for _ in range(self.random_scenarios):
            F = rng.normal(scale=0.5, size=(4, 4))
            dist = FramedDistribution(linear_potential(F - F.T), minkowski())
            params = ParticleParams(mass=float(rng.uniform(0.5, 2.0)), charge=float(rng.normal()))
            start = GeodesicState(Event5(rng.normal(size=4), 0.0), rng.normal(size=4))
            a = integrate(dist, params, start, cfg, formulation="pontryagin").states
            b = integrate(dist, params, start, cfg, formulation="lagrange").states
            scale = max(1.0, float(np.max(np.abs(a))))
            worst = max(worst, float(np.max(np.abs(a - b))) / scale)
        return self.check("pontryagin vs lagrange", worst, 1e-12)


class GaugeSuite(BaseSuite):
    """A → A + ∇f 下底空间轨迹不变，纤维按 −(f(x(t)) − f(x(0))) 平移。"""

    @property
    def suite_name(self) -> str:
        return "gauge"

    def run(self) -> list[CheckResult]:
        cfg = IntegratorConfig(step=1e-3, t_end=1.0)
        cases = [
            (
                "constant-magnetic, f=(x2)^2",
                magnetic_distribution(1.0),
                ParticleParams(mass=1.0, charge=2.0),
                magnetic_start(0.3),
                Polynomial.monomial(1.0, (0, 0, 2, 0)),
            ),
            (
                "generic-em, f=x0*x1",
                FramedDistribution(generic_em((0.3, 0.0, 0.1), (0.2, 0.5, 0.0)), minkowski()),
                ParticleParams(mass=1.0, charge=1.0),
                GeodesicState(Event5(np.zeros(4), 0.0), np.array([1.2, 0.3, -0.2, 0.4])),
                Polynomial.monomial(1.0, (1, 1, 0, 0)),
            ),
            (
                "zero, f=const",
                FramedDistribution(zero_potential(), minkowski()),
                ParticleParams(mass=1.0, charge=1.0),
                GeodesicState(Event5(np.zeros(4), 0.0), np.array([1.0, 0.5, 0.0, 0.0])),
                Polynomial.monomial(3.0, (0, 0, 0, 0)),
            ),
        ]
        results = []
        for label, dist, params, start, f in cases:
            report = gauge_transform_check(dist, params, start, cfg, f)
            results.append(self.check(f"{label}: base", report.max_base_deviation, 1e-10))
            results.append(self.check(f"{label}: fiber", report.fiber_relation_deviation, 1e-9))
        return results


def _sin_angle_to(basis: np.ndarray, axes: tuple[int, ...]) -> float:
    """核基与坐标子空间 span{e_axes} 之间最大主角的正弦。"""
    others = [k for k in range(4) if k not in axes]
    return float(np.linalg.norm(basis[:, others], ord=2))


class AbnormalSuite(BaseSuite):
    """F 的核维数与方向；a0=0 的逐点核检查。"""

    @property
    def suite_name(self) -> str:
        return "abnormal"

    def run(self) -> list[CheckResult]:
        x = np.zeros(4)
        magnetic = faraday(constant_magnetic(1.0), x)
        electric = faraday(constant_electric(1.0), x)
        full = faraday(generic_em((1.0, 0.0, 0.0), (1.0, 0.0, 0.0)), x)

        k_mag = abnormal_kernel(magnetic)
        k_el = abnormal_kernel(electric)
        k_full = abnormal_kernel(full)

        residual = max(kernel_residual(magnetic, v) for v in k_mag.basis)

        dist = magnetic_distribution(1.0)
        y = np.zeros(9)
        y[5:] = k_mag.basis[0]
        lagrange_vector(dist, 1.0, y, a0=0, lam=1.0)
        y[5:] = np.array([0.0, 0.0, 1.0, 0.0])
        try:
            lagrange_vector(dist, 1.0, y, a0=0, lam=1.0)
            rejected = False
        except AbnormalityViolation:
            rejected = True

        return [
            self.check("magnetic kernel dim", k_mag.dimension, 2, passed=k_mag.dimension == 2),
            self.check("magnetic kernel ∠ span{e0,e1}", _sin_angle_to(k_mag.basis, (0, 1)), 1e-10),
            self.check("magnetic |F v|", residual, 1e-12 * magnetic.norm),
            self.check("electric kernel dim", k_el.dimension, 2, passed=k_el.dimension == 2),
            self.check("electric kernel ∠ span{e2,e3}", _sin_angle_to(k_el.basis, (2, 3)), 1e-10),
            self.check("E·H ≠ 0 kernel dim", k_full.dimension, 0, passed=k_full.dimension == 0),
            self.check("a0=0 rejects u ∉ ker F", float(not rejected), 0.0),
        ]


class AsymptoticsSuite(BaseSuite):
    """大 p 锥界、x⁴ 回返距离、轴上塌缩、圆不变量与 ball-box 斜率。"""

    @property
    def suite_name(self) -> str:
        return "asymptotics"

    def run(self) -> list[CheckResult]:
        results = []

        cone = cone_bound_check(1.0, 1.0, [16 * np.pi, 32 * np.pi, 64 * np.pi, 128 * np.pi])
        slope = cone.slope if cone.slope is not None else float("nan")
        results.append(self.check("cone residual slope", slope, -2.0, passed=abs(slope + 2.0) <= 0.1))
        results.append(self.check("cone containment", float(not cone.inside_cone), 0.0))

        worst = 0.0
        for k, _, x4 in axis_crossings(1.0, 1.0, 4):
            expected = x4_return_distance(1.0, 1.0, k)
            worst = max(worst, abs(x4 - expected) / abs(expected))
        results.append(self.check("x4 return distance (rel)", worst, 1e-12))

        wave = wavefront_sample(SphereSpec(alpha_count=16, p_count=15, p_min=np.pi, p_max=8 * np.pi))
        shape = (16, 15)
        p_axis = wave.column("p").reshape(shape)[0]
        spread = 0.0
        turns = p_axis / (2 * np.pi)
        for j in np.flatnonzero(np.abs(turns - np.round(turns)) < 1e-9):
            for name in ("x2", "x3", "x4"):
                col = wave.column(name).reshape(shape)[:, j]
                spread = max(spread, float(np.ptp(col)))
        results.append(self.check("axis collapse spread", spread, 1e-12))

        sphere = sphere_sample(SphereSpec(alpha_count=32, p_count=33, p_min=-2 * np.pi, p_max=2 * np.pi))
        alpha, p = sphere.column("alpha"), sphere.column("p")
        mask = np.abs(p) >= 0.5
        radius = np.hypot(
            sphere.column("x2")[mask] - np.cos(alpha[mask]) / p[mask],
            sphere.column("x3")[mask] + np.sin(alpha[mask]) / p[mask],
        )
        circle = float(np.max(np.abs(radius * np.abs(p[mask]) - 1.0)))
        results.append(self.check("circle invariant (rel)", circle, 1e-12))

        box = box_check(magnetic_distribution(1.0), ParticleParams(mass=1.0, charge=1.0), [0.4, 0.2, 0.1, 0.05])
        fiber_slope = box.fiber_slope if box.fiber_slope is not None else float("nan")
        base_slope = box.base_slope if box.base_slope is not None else float("nan")
        results.append(self.check("box fiber slope", fiber_slope, 2.0, passed=abs(fiber_slope - 2.0) <= 0.05, detail=box.charge_mode))
        results.append(self.check("box base slope", base_slope, 1.0, passed=abs(base_slope - 1.0) <= 0.05))
        return results


class NonholonomySuite(BaseSuite):
    """增长向量、ball-box 指数与括号。"""

    @property
    def suite_name(self) -> str:
        return "nonholonomy"

    def run(self) -> list[CheckResult]:
        x = np.array([0.3, -0.2, 0.5, 0.1])
        magnetic = constant_magnetic(1.0)

        gv = growth_vector(magnetic, x)
        gv_zero = growth_vector(zero_potential(), x)
        gv_gauge = growth_vector(magnetic.gauge_shifted(Polynomial.monomial(1.0, (1, 1, 0, 0))), x)

        em = generic_em((0.3, -0.1, 0.2), (0.5, 0.0, -0.4))
        point = np.array([0.01, -0.02, 0.03, 0.01])
        bracket_dev = max(
            float(np.max(np.abs(frame_bracket(em, point, i, j) - coordinate_bracket(em, point, i, j))))
            for i in range(4)
            for j in range(4)
        )

        def same(measured, expected) -> bool:
            return tuple(measured) == tuple(expected)

        return [
            self.check("magnetic growth (4,5)", gv.degree, 2, passed=same(gv.dims, (4, 5))),
            self.check("magnetic exponents", 0, 0, passed=same(box_exponents(gv).phi, (1, 1, 1, 1, 2))),
            self.check("zero-field growth (4)", gv_zero.degree, 1, passed=same(gv_zero.dims, (4,))),
            self.check("zero-field exponents", 0, 0, passed=same(box_exponents(gv_zero).phi, (1, 1, 1, 1))),
            self.check("2-in-3 exponents", 0, 0, passed=same(box_exponents(REFERENCE_2_IN_3).phi, (1, 1, 2))),
            self.check("gauge-invariant growth", 0, 0, passed=gv_gauge == gv),
            self.check("frame vs coordinate bracket", bracket_dev, 1e-9),
        ]


# 套件名称 → 套件类的映射
SUITE_MAP: dict[str, type[BaseSuite]] = {
    "conservation": ConservationSuite,
    "oracle": OracleSuite,
    "gauge": GaugeSuite,
    "abnormal": AbnormalSuite,
    "asymptotics": AsymptoticsSuite,
    "nonholonomy": NonholonomySuite,
}


def run_suites(names, settings: dict) -> list[CheckResult]:
    """按顺序运行套件；names 含 "all" 时运行全部。"""
    names = list(names)
    if "all" in names:
        names = list(SUITE_MAP)
    results: list[CheckResult] = []
    for name in names:
        if name not in SUITE_MAP:
            raise KeyError(f"未知套件: {name}（可选: {', '.join(SUITE_MAP)}, all）")
        results.extend(SUITE_MAP[name](settings).safe_run())
    return results
