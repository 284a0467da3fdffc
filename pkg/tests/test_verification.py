"""验证套件注册表与网格的测试。"""

import numpy as np
import pytest

from verification import SUITE_MAP, run_suites
from verification.suites import ConservationSuite, magnetic_grid


def test_magnetic_grid_is_full_square():
    grid = magnetic_grid(5)
    assert len(grid) == 25
    assert sum(abs(p) < 1e-12 for _, p in grid) == 5
    assert min(p for _, p in grid) == pytest.approx(-2 * np.pi)


def test_conservation_reports_trajectory_count():
    results = ConservationSuite({"verify": {"oracle_grid": 3}}).safe_run()
    by_name = {r.name: r for r in results}
    assert all(r.passed for r in results), [r for r in results if not r.passed]
    assert by_name["pseudonorm drift"].detail == "9 条轨迹"
    assert by_name["fiber drift vs quadrature"].measured < 1e-10


def test_unknown_suite_name():
    with pytest.raises(KeyError):
        run_suites(["everything"], {})


def test_registry_names():
    assert set(SUITE_MAP) == {"conservation", "oracle", "gauge", "abnormal", "asymptotics", "nonholonomy"}
