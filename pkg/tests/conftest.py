"""pytest 公共 fixture。"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 确保项目根目录在 sys.path 中
PROJECT_ROOT = Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from fields.base import Event5, FramedDistribution  # noqa: E402
from fields.metrics import minkowski  # noqa: E402
from fields.potentials import constant_magnetic, zero_potential  # noqa: E402
from geodesic_engine.rhs import GeodesicState  # noqa: E402
from magnetic_analytic.closed_form import initial_velocity  # noqa: E402

SCENARIO_DIR = PROJECT_ROOT / "config" / "scenarios"


@pytest.fixture
def magnetic_dist() -> FramedDistribution:
    return FramedDistribution(constant_magnetic(1.0), minkowski())


@pytest.fixture
def free_dist() -> FramedDistribution:
    return FramedDistribution(zero_potential(), minkowski())


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR


@pytest.fixture
def magnetic_start():
    """闭式解对应的起点：原点，u = (u⁰, 0, sin α, cos α)。"""

    def build(alpha: float, u0: float = 0.0) -> GeodesicState:
        return GeodesicState(Event5(np.zeros(4), 0.0), initial_velocity(alpha, u0))

    return build
