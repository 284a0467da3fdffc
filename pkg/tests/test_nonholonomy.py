"""括号、增长向量、ball-box 指数与 box_check 的测试。"""

import numpy as np
import pytest

from fields.base import PotentialField
from fields.errors import DomainError
from fields.frame import faraday
from fields.polynomial import Polynomial
from fields.potentials import constant_electric, constant_magnetic, generic_em, zero_potential
from geodesic_engine.rhs import ParticleParams
from nonholonomy import (
    REFERENCE_2_IN_3,
    GrowthVector,
    box_check,
    box_exponents,
    bracket_table,
    coordinate_bracket,
    frame_bracket,
    growth_vector,
)


def half_space_potential() -> PotentialField:
    """A₂ = (x³)²（x³ > 0），否则为 0：场只在上半空间非零。"""

    def eval_fn(x):
        return np.array([0.0, 0.0, x[3] ** 2 if x[3] > 0 else 0.0, 0.0])

    return PotentialField(name="half-space", eval_fn=eval_fn)


class TestBrackets:
    def test_frame_bracket_is_minus_faraday(self):
        pot = generic_em((0.3, -0.1, 0.7), (0.2, 0.9, -0.4))
        x = np.array([0.1, 0.2, 0.3, 0.4])
        F = faraday(pot, x).F
        for i in range(4):
            for j in range(4):
                expected = np.zeros(5)
                expected[4] = -F[i, j]
                np.testing.assert_array_equal(frame_bracket(pot, x, i, j), expected)

    def test_coordinate_bracket_agrees(self):
        pot = generic_em((0.3, -0.1, 0.7), (0.2, 0.9, -0.4)).gauge_shifted(
            Polynomial.from_spec([[0.5, [1, 1, 0, 0]], [0.2, [0, 0, 2, 1]]])
        )
        x = np.array([0.4, -0.3, 0.8, 0.2])
        for i in range(4):
            for j in range(4):
                np.testing.assert_allclose(
                    coordinate_bracket(pot, x, i, j), frame_bracket(pot, x, i, j), rtol=0, atol=1e-8
                )

    def test_table_is_antisymmetric(self):
        table = bracket_table(constant_magnetic(2.0), np.zeros(4))
        assert table.shape == (4, 4, 5)
        np.testing.assert_array_equal(table, -table.transpose(1, 0, 2))
        assert table[2, 3, 4] == 2.0

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            frame_bracket(zero_potential(), np.zeros(4), 0, 4)


class TestGrowthVector:
    @pytest.mark.parametrize("pot", [constant_magnetic(1.0), constant_electric(0.5), generic_em()])
    def test_nonzero_field(self, pot):
        gv = growth_vector(pot, np.array([0.2, 0.1, -0.3, 0.4]))
        assert gv.dims == (4, 5)
        assert gv.degree == 2
        assert box_exponents(gv).phi == (1, 1, 1, 1, 2)

    def test_zero_field(self):
        gv = growth_vector(zero_potential(), np.ones(4))
        assert gv.dims == (4,)
        assert gv.degree == 1
        assert box_exponents(gv).phi == (1, 1, 1, 1)

    def test_pure_gauge_has_zero_field(self):
        pot = zero_potential().gauge_shifted(Polynomial.from_spec([[1.0, [2, 1, 0, 1]]]))
        assert growth_vector(pot, np.array([0.5, -1.0, 2.0, 0.3])).dims == (4,)

    def test_field_depends_on_point(self):
        pot = half_space_potential()
        assert growth_vector(pot, np.array([0.0, 0.0, 0.0, 1.0])).dims == (4, 5)
        assert growth_vector(pot, np.array([0.0, 0.0, 0.0, -1.0])).dims == (4,)

    def test_reference_distribution(self):
        assert box_exponents(REFERENCE_2_IN_3).phi == (1, 1, 2)

    @pytest.mark.parametrize("dims, degree", [((), 0), ((4, 4), 2), ((5, 4), 2), ((4, 5), 1), ((0, 2), 2)])
    def test_invalid_growth_vector(self, dims, degree):
        with pytest.raises(ValueError):
            GrowthVector(dims=dims, degree=degree)


class TestBoxCheck:
    def test_magnetic_scaling(self, magnetic_dist):
        report = box_check(magnetic_dist, ParticleParams(mass=1.0, charge=1.0), [0.4, 0.2, 0.1])
        assert report.fiber_slope == pytest.approx(2.0, abs=0.05)
        assert report.base_slope == pytest.approx(1.0, abs=0.05)
        assert not report.exact_containment
        assert [row.epsilon for row in report.rows] == [0.4, 0.2, 0.1]
        assert report.charge_mode == "scale-homogeneous"
        assert len(report.rows[0].charges) == 6
        assert max(report.rows[-1].charges) == pytest.approx(4 * max(report.rows[0].charges))

    def test_supplied_charges_are_used(self, magnetic_dist):
        report = box_check(magnetic_dist, ParticleParams(mass=1.0, charge=3.0), [0.4, 0.2, 0.1], charges=[0.0])
        assert report.charge_mode == "fixed"
        assert all(row.charges == (0.0,) for row in report.rows)
        # q = 0 时扇面是直线，x⁴ = −φ u²u³ ε²/2 严格为二次
        assert report.fiber_slope == pytest.approx(2.0, abs=1e-9)
        assert report.base_slope == pytest.approx(1.0, abs=1e-9)

    def test_supplied_charges_change_the_fan(self, magnetic_dist):
        straight = box_check(magnetic_dist, ParticleParams(), [0.4, 0.2], charges=[0.0])
        curved = box_check(magnetic_dist, ParticleParams(), [0.4, 0.2], charges=[30.0])
        assert curved.rows[0].charges == (30.0,)
        assert curved.rows[0].max_fiber != pytest.approx(straight.rows[0].max_fiber, rel=1e-3)

    @pytest.mark.parametrize("charges", [[], [np.nan]])
    def test_rejects_bad_charges(self, magnetic_dist, charges):
        with pytest.raises(DomainError):
            box_check(magnetic_dist, ParticleParams(), [0.2, 0.1], charges=charges)

    def test_zero_field_has_no_fiber_displacement(self, free_dist):
        report = box_check(free_dist, ParticleParams(), [0.2, 0.1], samples_per_eps=4, steps_per_fan=8)
        assert report.exact_containment
        assert report.fiber_slope is None
        assert report.charge_mode == "fixed"
        assert report.base_slope == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("epsilons", [[0.1, 0.2], [0.1, 0.1], [0.1, -0.05]])
    def test_rejects_bad_epsilons(self, magnetic_dist, epsilons):
        with pytest.raises(DomainError):
            box_check(magnetic_dist, ParticleParams(), epsilons)
