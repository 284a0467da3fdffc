"""场景文件：YAML 加载、--set 覆盖与校验。"""

from .loader import Scenario, apply_overrides, build_scenario, flatten, load_scenario, unflatten

__all__ = [
    "Scenario",
    "apply_overrides",
    "build_scenario",
    "flatten",
    "load_scenario",
    "unflatten",
]
