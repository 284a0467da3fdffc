"""验证套件与单点分析。"""

from .analysis import PointAnalysis, analyze_point
from .suites import SUITE_MAP, BaseSuite, CheckResult, run_suites

__all__ = [
    "SUITE_MAP",
    "BaseSuite",
    "CheckResult",
    "PointAnalysis",
    "analyze_point",
    "run_suites",
]
