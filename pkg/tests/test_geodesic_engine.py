"""测地线引擎测试：Christoffel、右端项、RK4 积分器、诊断量与非正常核。"""

import math

import numpy as np
import pytest

from fields.base import DistributionMetric, Event5, FramedDistribution
from fields.errors import (
    AbnormalityViolation,
    CausalityError,
    DegenerateMetricError,
    DivergenceError,
    DomainError,
    SignatureError,
)
from fields.frame import faraday
from fields.metrics import MINKOWSKI, minkowski, polynomial_metric
from fields.polynomial import Polynomial
from fields.potentials import constant_electric, constant_magnetic, generic_em, zero_potential
from geodesic_engine.abnormal import abnormal_kernel, kernel_residual
from geodesic_engine.christoffel import christoffel, christoffel_lower
from geodesic_engine.diagnostics import action_values, gauge_transform_check
from geodesic_engine.integrator import GeodesicIntegrator, IntegratorConfig, integrate
from geodesic_engine.rhs import (
    GeodesicState,
    ParticleParams,
    eom_rhs,
    lagrange_rhs,
    structure_constants,
)
from magnetic_analytic.closed_form import canonical_params, closed_form


def bumped_metric(a: float = 0.5) -> DistributionMetric:
    """g = diag(1 + a(x¹)², −1, −1, −1)。"""
    return polynomial_metric(
        {
            "g00": [[1.0, [0, 0, 0, 0]], [a, [0, 2, 0, 0]]],
            "g11": [[-1.0, [0, 0, 0, 0]]],
            "g22": [[-1.0, [0, 0, 0, 0]]],
            "g33": [[-1.0, [0, 0, 0, 0]]],
        }
    )


def exponential_metric(a: float, b: float, fd_step=None) -> DistributionMetric:
    """g = diag(e^{2a x¹}, −1, −e^{2b x⁰}, −1)；fd_step 给出时改用中心差分求导。"""

    def value(x):
        return np.diag([np.exp(2 * a * x[1]), -1.0, -np.exp(2 * b * x[0]), -1.0])

    def jacobian(x):
        dg = np.zeros((4, 4, 4))
        dg[0, 0, 1] = 2 * a * np.exp(2 * a * x[1])
        dg[2, 2, 0] = -2 * b * np.exp(2 * b * x[0])
        return dg

    if fd_step is not None:
        return DistributionMetric(name="exponential-fd", eval_fn=value, fd_step=fd_step)
    return DistributionMetric(name="exponential", eval_fn=value, jacobian_fn=jacobian)


def random_polynomial_metric(rng) -> DistributionMetric:
    """Minkowski 加上小的非常数多项式扰动，原点处签名不变。"""
    entries = {}
    for i in range(4):
        for j in range(i, 4):
            terms = [[float(MINKOWSKI[i, j]), [0, 0, 0, 0]]] if i == j else []
            for _ in range(3):
                exps = [int(e) for e in rng.integers(0, 3, size=4)]
                if not any(exps):
                    exps[i] = 1
                terms.append([0.1 * float(rng.normal()), exps])
            entries[f"g{i}{j}"] = terms
    return polynomial_metric(entries)


class TestChristoffel:
    def test_flat_metric_is_zero(self):
        assert not np.any(christoffel(minkowski(), np.ones(4)))

    def test_known_components(self):
        a, x1 = 0.5, 0.8
        gamma = christoffel(bumped_metric(a), np.array([0.0, x1, 0.0, 0.0]))
        g00 = 1 + a * x1 * x1
        # Γ⁰₀₁ = ½ g⁰⁰ ∂₁g₀₀，Γ¹₀₀ = ½ ∂₁g₀₀（g¹¹ = −1）
        assert gamma[0, 0, 1] == pytest.approx(a * x1 / g00)
        assert gamma[0, 1, 0] == gamma[0, 0, 1]
        assert gamma[1, 0, 0] == pytest.approx(a * x1)
        np.testing.assert_allclose(gamma, gamma.transpose(0, 2, 1))

    @pytest.mark.parametrize("seed", range(6))
    def test_symmetric_for_random_metrics(self, seed):
        rng = np.random.default_rng(seed)
        metric = random_polynomial_metric(rng)
        x = 0.3 * rng.normal(size=4)
        lower = christoffel_lower(metric, x)
        gamma = christoffel(metric, x)
        np.testing.assert_array_equal(lower, lower.transpose(0, 2, 1))
        np.testing.assert_array_equal(gamma, gamma.transpose(0, 2, 1))
        # 降指标后回到全下标符号
        np.testing.assert_allclose(np.einsum("kl,lij->kij", metric.value(x), gamma), lower, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("x", [(0.0, 0.0, 0.0, 0.0), (0.4, -0.7, 1.2, 0.3), (-1.1, 0.9, 0.0, -2.0)])
    def test_exponential_metric(self, x):
        a, b = 0.6, -0.35
        x = np.array(x)
        gamma = christoffel(exponential_metric(a, b), x)
        assert gamma[0, 0, 1] == pytest.approx(a, rel=1e-14)
        assert gamma[1, 0, 0] == pytest.approx(a * np.exp(2 * a * x[1]), rel=1e-14)
        assert gamma[2, 0, 2] == pytest.approx(b, rel=1e-14)
        assert gamma[0, 2, 2] == pytest.approx(b * np.exp(2 * b * x[0] - 2 * a * x[1]), rel=1e-14)
        np.testing.assert_allclose(gamma[3], 0.0, atol=1e-15)

        oracle = christoffel(exponential_metric(a, b, fd_step=1e-5), x)
        scale = float(np.max(np.abs(gamma)))
        np.testing.assert_allclose(oracle, gamma, rtol=0, atol=1e-8 * scale)


class TestRHS:
    def test_structure_constants_transpose_faraday(self):
        pot = generic_em((0.3, 0.1, -0.2), (1.0, 0.5, 0.0))
        x = np.zeros(4)
        np.testing.assert_array_equal(structure_constants(pot, x), faraday(pot, x).F.T)

    def test_pontryagin_and_lagrange_agree(self):
        dist = FramedDistribution(generic_em((0.3, 0.1, -0.2), (1.0, 0.5, 0.7)), bumped_metric())
        params = ParticleParams(mass=1.7, charge=-0.6)
        state = GeodesicState.at(x=(0.1, 0.4, -0.3, 0.2), u=(1.2, 0.3, -0.1, 0.5), fiber=0.7)
        reference = eom_rhs(dist, params, state)
        lagrange = lagrange_rhs(dist, params, state, a0=1, lam=params.charge)
        np.testing.assert_allclose(lagrange.derivative, reference, rtol=1e-12, atol=1e-14)
        assert lagrange.dlambda == 0.0

    def test_fiber_derivative_is_horizontal_lift(self, magnetic_dist):
        state = GeodesicState.at(x=(0.0, 0.0, 0.0, 2.0), u=(0.0, 0.0, 1.0, 0.0))
        dy = eom_rhs(magnetic_dist, ParticleParams(charge=1.0), state)
        assert dy[4] == -2.0

    def test_abnormal_requires_kernel_velocity(self, magnetic_dist):
        params = ParticleParams()
        inside = GeodesicState.at(u=(1.0, 0.3, 0.0, 0.0))
        result = lagrange_rhs(magnetic_dist, params, inside, a0=0, lam=1.0)
        assert not np.any(result.residual)

        outside = GeodesicState.at(u=(0.0, 0.0, 1.0, 0.0))
        with pytest.raises(AbnormalityViolation):
            lagrange_rhs(magnetic_dist, params, outside, a0=0, lam=1.0)

    def test_a0_must_be_normalised(self, magnetic_dist):
        with pytest.raises(DomainError):
            lagrange_rhs(magnetic_dist, ParticleParams(), GeodesicState.at(), a0=0.5, lam=1.0)

    def test_particle_params_validation(self):
        with pytest.raises(ValueError):
            ParticleParams(mass=0.0)
        assert ParticleParams(mass=2.0, charge=3.0).charge_to_mass == 1.5


class TestIntegratorConfig:
    def test_uniform_step(self):
        cfg = IntegratorConfig(step=0.3, t_end=1.0)
        assert cfg.n_steps == 4
        assert cfg.effective_step == 0.25
        assert IntegratorConfig(step=0.25, t_end=1.0).n_steps == 4

    @pytest.mark.parametrize(
        "kwargs",
        [{"step": 0.0}, {"step": 2.0, "t_end": 1.0}, {"record_every": 0}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            IntegratorConfig(**kwargs)


class TestIntegrator:
    def test_free_particle_straight_line(self, free_dist):
        u = np.array([1.0, 0.5, 0.25, 0.0])
        start = GeodesicState(Event5(np.array([1.0, 2.0, 3.0, 4.0]), 0.5), u)
        traj = integrate(free_dist, ParticleParams(), start, IntegratorConfig(step=1e-2, t_end=2.0))
        np.testing.assert_allclose(traj.states[-1, :4], [3.0, 3.0, 3.5, 4.0], atol=1e-12)
        assert traj.states[-1, 4] == 0.5
        assert traj.max_pseudonorm_drift <= 1e-15
        assert traj.t[-1] == pytest.approx(2.0)

    def test_record_every_keeps_endpoints(self, free_dist):
        cfg = IntegratorConfig(step=0.1, t_end=1.0, record_every=3)
        traj = integrate(free_dist, ParticleParams(), GeodesicState.at(), cfg)
        np.testing.assert_allclose(traj.t, [0.0, 0.3, 0.6, 0.9, 1.0])
        assert len(traj) == 5

    def test_matches_closed_form(self, magnetic_dist, magnetic_start):
        alpha, p = 0.7, 2.0
        traj = integrate(
            magnetic_dist,
            ParticleParams(mass=1.0, charge=p),
            magnetic_start(alpha),
            IntegratorConfig(step=1e-3, t_end=1.0),
        )
        expected = np.column_stack(closed_form(canonical_params(alpha, p), traj.t))
        assert np.max(np.abs(traj.states[:, 2:5] - expected)) < 1e-8
        assert traj.max_pseudonorm_drift < 1e-9
        assert traj.max_horizontality_defect < 1e-12
        assert traj.max_fiber_drift < 1e-10
        np.testing.assert_array_equal(traj.momenta[:, 4], p)

    def test_fourth_order_convergence(self, magnetic_dist, magnetic_start):
        alpha, p = 0.3, 2 * np.pi
        expected = np.array(closed_form(canonical_params(alpha, p), 1.0))

        def error(step):
            traj = integrate(
                magnetic_dist,
                ParticleParams(mass=1.0, charge=p),
                magnetic_start(alpha),
                IntegratorConfig(step=step, t_end=1.0),
            )
            return np.max(np.abs(traj.states[-1, 2:5] - expected))

        assert 14.0 <= error(0.02) / error(0.01) <= 18.0

    def test_formulations_agree(self):
        dist = FramedDistribution(generic_em((0.4, 0.0, 0.2), (0.3, -0.5, 0.1)), minkowski())
        params = ParticleParams(mass=1.3, charge=0.8)
        start = GeodesicState.at(u=(1.5, 0.2, -0.3, 0.4))
        cfg = IntegratorConfig(step=1e-2, t_end=1.0)
        a = integrate(dist, params, start, cfg, formulation="pontryagin")
        b = integrate(dist, params, start, cfg, formulation="lagrange")
        np.testing.assert_allclose(a.states, b.states, rtol=0, atol=1e-12)

    def test_biased_fiber_rate_is_detected(self, magnetic_dist, magnetic_start):
        class BiasedIntegrator(GeodesicIntegrator):
            def rhs(self, y):
                dy = super().rhs(y)
                dy[4] += 0.25
                return dy

        params = ParticleParams(mass=1.0, charge=2.0)
        traj = BiasedIntegrator(magnetic_dist, params).integrate(
            magnetic_start(0.7), IntegratorConfig(step=1e-2, t_end=1.0)
        )
        np.testing.assert_allclose(traj.horizontality_defect, 0.25, atol=1e-12)
        np.testing.assert_allclose(traj.fiber_drift, 0.25 * traj.t, atol=1e-8)

    def test_fiber_drift_of_free_particle_is_zero(self, free_dist):
        traj = integrate(free_dist, ParticleParams(), GeodesicState.at(u=(1.0, 0.5, 0.0, 0.0)), IntegratorConfig(step=0.1, t_end=1.0))
        assert traj.max_fiber_drift == 0.0

    def test_unknown_formulation(self, free_dist):
        with pytest.raises(ValueError):
            GeodesicIntegrator(free_dist, ParticleParams(), formulation="hamilton")

    def test_divergence_reports_last_good_time(self):
        dist = FramedDistribution(constant_electric(1000.0), minkowski())
        start = GeodesicState.at(u=(1.0, 0.5, 0.0, 0.0))
        with pytest.raises(DivergenceError) as info:
            integrate(dist, ParticleParams(charge=1.0), start, IntegratorConfig(step=1e-3, t_end=1.0))
        assert 0.0 < info.value.last_good_t < 1.0

    def test_metric_breakdown_along_path(self):
        # g₀₀ = 1 − x¹ 在 x¹ = 1 处退化，越过后签名改变
        metric = polynomial_metric(
            {
                "g00": [[1.0, [0, 0, 0, 0]], [-1.0, [0, 1, 0, 0]]],
                "g11": [[-1.0, [0, 0, 0, 0]]],
                "g22": [[-1.0, [0, 0, 0, 0]]],
                "g33": [[-1.0, [0, 0, 0, 0]]],
            }
        )
        dist = FramedDistribution(zero_potential(), metric)
        start = GeodesicState.at(u=(0.0, 1.0, 0.0, 0.0))
        with pytest.raises((DegenerateMetricError, SignatureError)):
            integrate(dist, ParticleParams(), start, IntegratorConfig(step=1e-2, t_end=3.0))

    def test_momenta_monitor(self, free_dist):
        u = np.array([2.0, 1.0, 0.0, 1.0])  # ⟨u,u⟩ = 2
        traj = integrate(free_dist, ParticleParams(mass=3.0, charge=0.5), GeodesicState.at(u=u), IntegratorConfig(step=0.1, t_end=0.2))
        np.testing.assert_allclose(traj.momenta[0, :4], 3.0 * np.array([2.0, -1.0, 0.0, -1.0]) / math.sqrt(2.0))
        assert traj.momenta[0, 4] == 0.5


class TestDiagnostics:
    def test_action_of_free_timelike_particle(self, free_dist):
        start = GeodesicState.at(u=(math.sqrt(2.0), 1.0, 0.0, 0.0))
        traj = integrate(free_dist, ParticleParams(mass=2.0), start, IntegratorConfig(step=1e-2, t_end=3.0))
        action = action_values(free_dist, ParticleParams(mass=2.0), traj)
        assert action.length_part == pytest.approx(-6.0, rel=1e-12)
        assert action.coupling_part == 0.0
        assert action.total == action.length_part

    def test_coupling_part_tracks_fiber(self, magnetic_dist, magnetic_start):
        params = ParticleParams(mass=1.0, charge=1.5)
        traj = integrate(magnetic_dist, params, magnetic_start(0.4, u0=math.sqrt(2.0)), IntegratorConfig(step=1e-3, t_end=1.0))
        action = action_values(magnetic_dist, params, traj)
        expected = params.charge * (traj.states[-1, 4] - traj.states[0, 4])
        assert action.coupling_part == pytest.approx(expected, rel=1e-5)
        assert action.length_part == pytest.approx(-1.0, rel=1e-9)

    def test_action_rejects_spacelike(self, magnetic_dist, magnetic_start):
        traj = integrate(magnetic_dist, ParticleParams(charge=1.0), magnetic_start(0.0), IntegratorConfig(step=0.1, t_end=0.5))
        with pytest.raises(CausalityError) as info:
            action_values(magnetic_dist, ParticleParams(charge=1.0), traj)
        assert info.value.sample_index == 0

    def test_gauge_transform(self, magnetic_dist, magnetic_start):
        f = Polynomial.from_spec([[1.0, [0, 0, 2, 0]], [0.3, [1, 0, 0, 1]]])
        report = gauge_transform_check(
            magnetic_dist,
            ParticleParams(mass=1.0, charge=2.0),
            magnetic_start(0.3, u0=0.5),
            IntegratorConfig(step=1e-3, t_end=1.0),
            f,
        )
        assert report.max_base_deviation < 1e-10
        assert report.fiber_relation_deviation < 1e-9


class TestAbnormalKernel:
    def test_magnetic_kernel_is_time_and_x1(self):
        F = faraday(constant_magnetic(1.0), np.zeros(4))
        kernel = abnormal_kernel(F)
        assert kernel.rank_F == 2
        assert kernel.dimension == 2
        assert np.linalg.norm(kernel.basis[:, 2:], ord=2) < 1e-10
        np.testing.assert_allclose(kernel.basis @ kernel.basis.T, np.eye(2), atol=1e-14)
        assert kernel.contains((1.0, -2.0, 0.0, 0.0))
        assert not kernel.contains((0.0, 0.0, 1.0, 0.0))
        for v in kernel.basis:
            assert kernel_residual(F, v) <= 1e-12 * F.norm

    def test_zero_field_kernel_is_everything(self):
        kernel = abnormal_kernel(faraday(zero_potential(), np.zeros(4)))
        assert kernel.rank_F == 0
        assert kernel.dimension == 4

    def test_full_rank_when_e_dot_h_nonzero(self):
        F = faraday(generic_em((1.0, 0.0, 0.0), (1.0, 0.0, 0.0)), np.zeros(4))
        assert abs(np.linalg.det(F.F)) > 0.5
        kernel = abnormal_kernel(F)
        assert kernel.rank_F == 4
        assert kernel.dimension == 0
        assert not kernel.contains((1.0, 0.0, 0.0, 0.0))
