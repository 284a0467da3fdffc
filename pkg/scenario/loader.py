"""
场景文件加载器。

场景文件是 YAML；嵌套映射被展平为点分键（potential.kind、metric.matrix.row0 …），
--set key=value 覆盖项作用在展平视图上（值按 YAML 标量/列表解析），然后重建并校验。

示例:
    potential:
      kind: constant-magnetic
      phi: 1.0
    metric:
      kind: minkowski
    particle: {mass: 1.0, charge: 2.0}
    initial: {x: [0, 0, 0, 0], fiber: 0.0, u: [0, 0, 0, 1]}
    integrator: {step: 0.001, t_end: 1.0, record_every: 1}
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from fields.base import DistributionMetric, Event5, FramedDistribution, PotentialField
from fields.errors import ScenarioError, SubLorentzError
from fields.metrics import METRIC_BUILDERS, build_metric
from fields.polynomial import Polynomial
from fields.potentials import POTENTIAL_BUILDERS, build_potential
from geodesic_engine.integrator import IntegratorConfig
from geodesic_engine.rhs import GeodesicState, ParticleParams

logger = logging.getLogger(__name__)

SECTIONS = ("potential", "metric", "particle", "initial", "integrator")


@dataclass(frozen=True)
class Scenario:
    potential: PotentialField
    metric: DistributionMetric
    particle: ParticleParams
    initial: GeodesicState
    integrator: IntegratorConfig
    name: str = "scenario"
    flat: dict = field(default_factory=dict)

    @property
    def distribution(self) -> FramedDistribution:
        return FramedDistribution(self.potential, self.metric)

    def describe(self) -> dict:
        """场景的展平回显（用于 JSON 导出的 meta）。"""
        return {"name": self.name, **{k: _plain(v) for k, v in self.flat.items()}}


def _plain(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


# ===== 展平 / 重建 =====

def flatten(tree: dict, prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in tree.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def unflatten(flat: dict[str, Any]) -> dict:
    tree: dict = {}
    for dotted, value in flat.items():
        node = tree
        parts = dotted.split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ScenarioError("键同时作为值与分节使用", field=dotted)
            node = child
        node[parts[-1]] = value
    return tree


def _key_lines(text: str) -> dict[str, int]:
    """展平键 → 行号（从 1 开始），用于诊断信息。"""
    lines: dict[str, int] = {}

    def walk(node, prefix: str) -> None:
        if not isinstance(node, yaml.MappingNode):
            return
        for key_node, value_node in node.value:
            dotted = f"{prefix}{key_node.value}"
            lines[dotted] = key_node.start_mark.line + 1
            walk(value_node, f"{dotted}.")

    try:
        walk(yaml.compose(text), "")
    except yaml.YAMLError:
        pass
    return lines


def apply_overrides(flat: dict[str, Any], overrides) -> dict[str, Any]:
    """应用 --set key=value 覆盖项。"""
    result = dict(flat)
    for item in overrides or ():
        if "=" not in item:
            raise ScenarioError(f"覆盖项应为 key=value，收到 {item!r}", field="--set")
        key, raw = item.split("=", 1)
        key = key.strip()
        if not key:
            raise ScenarioError(f"覆盖项缺少键: {item!r}", field="--set")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as e:
            raise ScenarioError(f"无法解析覆盖值 {raw!r}: {e}", field=key) from None
        # 覆盖整个分节时去掉旧的子键
        for existing in [k for k in result if k.startswith(f"{key}.")]:
            del result[existing]
        result[key] = value
        logger.debug(f"覆盖 {key} = {value!r}")
    return result


# ===== 字段解析 =====

class _Fields:
    """带行号诊断的字段读取器。"""

    def __init__(self, tree: dict, lines: dict[str, int]):
        self.tree = tree
        self.lines = lines

    def error(self, key: str, message: str) -> ScenarioError:
        return ScenarioError(message, field=key, line=self.lines.get(key))

    def raw(self, key: str, default: Any = ...) -> Any:
        node: Any = self.tree
        for part in key.split("."):
            if not isinstance(node, dict) or part not in node:
                if default is ...:
                    raise self.error(key, "缺少必填字段")
                return default
            node = node[part]
        return node

    def number(self, key: str, default: Any = ..., positive: bool = False) -> float:
        value = self.raw(key, default)
        if isinstance(value, bool):
            raise self.error(key, f"需要数值，收到 {value!r}")
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise self.error(key, f"需要数值，收到 {value!r}") from None
        if not np.isfinite(number):
            raise self.error(key, f"数值非有限: {value!r}")
        if positive and not number > 0:
            raise self.error(key, f"需要正数，收到 {value!r}")
        return number

    def vector(self, key: str, size: int, default: Any = ...) -> np.ndarray:
        value = self.raw(key, default)
        if not isinstance(value, (list, tuple)) or len(value) != size:
            raise self.error(key, f"需要 {size} 个数值的列表，收到 {value!r}")
        out = np.empty(size)
        for i, v in enumerate(value):
            if isinstance(v, bool):
                raise self.error(f"{key}[{i}]", f"需要数值，收到 {v!r}")
            try:
                out[i] = float(v)
            except (TypeError, ValueError):
                raise self.error(f"{key}[{i}]", f"需要数值，收到 {v!r}") from None
            if not np.isfinite(out[i]):
                raise self.error(f"{key}[{i}]", f"数值非有限: {v!r}")
        return out

    def polynomial(self, key: str) -> Polynomial:
        try:
            return Polynomial.from_spec(self.raw(key, None))
        except ValueError as e:
            raise self.error(key, str(e)) from None


def _build_potential(f: _Fields, fd_step: float) -> PotentialField:
    kind = f.raw("potential.kind", "zero")
    if kind not in POTENTIAL_BUILDERS:
        raise f.error("potential.kind", f"未知势 {kind!r}（可选: {', '.join(POTENTIAL_BUILDERS)}）")
    fd_step = f.number("potential.fd_step", fd_step, positive=True)
    if kind == "constant-magnetic":
        return build_potential(kind, phi=f.number("potential.phi", 1.0), fd_step=fd_step)
    if kind == "constant-electric":
        return build_potential(kind, E=f.number("potential.E", 1.0), fd_step=fd_step)
    if kind == "generic-em":
        return build_potential(
            kind,
            E=f.vector("potential.E", 3),
            H=f.vector("potential.H", 3),
            fd_step=fd_step,
        )
    if kind == "polynomial":
        components = [f.polynomial(f"potential.terms.A{k}") for k in range(4)]
        return build_potential(kind, components=components, fd_step=fd_step)
    return build_potential(kind, fd_step=fd_step)


def _build_metric(f: _Fields, fd_step: float, start: np.ndarray) -> DistributionMetric:
    kind = f.raw("metric.kind", "minkowski")
    if kind not in METRIC_BUILDERS:
        raise f.error("metric.kind", f"未知度规 {kind!r}（可选: {', '.join(METRIC_BUILDERS)}）")
    try:
        if kind == "constant":
            rows = np.array([f.vector(f"metric.matrix.row{i}", 4) for i in range(4)])
            for i in range(4):
                for j in range(i + 1, 4):
                    if abs(rows[i, j] - rows[j, i]) > 1e-12 * max(1.0, abs(rows[i, j])):
                        raise f.error(
                            f"metric.matrix.row{i}[{j}]",
                            f"矩阵不对称: row{i}[{j}]={rows[i, j]!r} ≠ row{j}[{i}]={rows[j, i]!r}",
                        )
            return build_metric(kind, matrix=rows)
        if kind == "polynomial":
            terms = f.raw("metric.terms", {})
            if not isinstance(terms, dict) or not terms:
                raise f.error("metric.terms", "多项式度规需要 g00..g33 分量")
            entries = {key: f.polynomial(f"metric.terms.{key}") for key in terms}
            return build_metric(
                kind,
                entries=entries,
                fd_step=fd_step,
                sample_points=(tuple(start),),
            )
        return build_metric(kind)
    except ScenarioError:
        raise
    except (SubLorentzError, ValueError) as e:
        raise f.error("metric", str(e)) from None


def build_scenario(tree: dict, lines: dict[str, int] | None = None, defaults: dict | None = None, name: str = "scenario") -> Scenario:
    """由嵌套字典构造并校验场景。"""
    defaults = defaults or {}
    numerics = defaults.get("numerics", {})
    integ_defaults = defaults.get("integrator", {})
    f = _Fields(tree, lines or {})

    unknown = [k for k in tree if k not in SECTIONS]
    if unknown:
        raise f.error(unknown[0], f"未知分节（可选: {', '.join(SECTIONS)}）")

    fd_step = float(numerics.get("fd_step", 1e-6))
    start_x = f.vector("initial.x", 4, [0.0, 0.0, 0.0, 0.0])
    potential = _build_potential(f, fd_step)
    metric = _build_metric(f, fd_step, start_x)

    try:
        particle = ParticleParams(
            mass=f.number("particle.mass", 1.0, positive=True),
            charge=f.number("particle.charge", 0.0),
        )
    except ValueError as e:
        raise f.error("particle", str(e)) from None

    initial = GeodesicState(
        Event5(start_x, f.number("initial.fiber", 0.0)),
        f.vector("initial.u", 4),
    )

    record_every = f.raw("integrator.record_every", integ_defaults.get("record_every", 1))
    if isinstance(record_every, bool) or not isinstance(record_every, int) or record_every < 1:
        raise f.error("integrator.record_every", f"需要正整数，收到 {record_every!r}")
    try:
        integrator = IntegratorConfig(
            step=f.number("integrator.step", integ_defaults.get("step", 1e-3), positive=True),
            t_end=f.number("integrator.t_end", integ_defaults.get("t_end", 1.0), positive=True),
            record_every=record_every,
        )
    except ValueError as e:
        raise f.error("integrator", str(e)) from None

    return Scenario(
        potential=potential,
        metric=metric,
        particle=particle,
        initial=initial,
        integrator=integrator,
        name=name,
        flat=flatten(tree),
    )


def load_scenario(path: Path, overrides=None, defaults: dict | None = None) -> Scenario:
    """
    加载场景文件。

    Args:
        path: 场景 YAML 文件
        overrides: --set key=value 列表
        defaults: 全局配置（提供 numerics / integrator 默认值）

    Raises:
        ScenarioError: 解析或校验失败（带字段名，能定位时带行号）
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"无法读取场景文件: {e}", field=str(path)) from None

    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ScenarioError(
            f"YAML 语法错误: {getattr(e, 'problem', e)}",
            field=str(path),
            line=mark.line + 1 if mark is not None else None,
        ) from None
    if tree is None:
        tree = {}
    if not isinstance(tree, dict):
        raise ScenarioError("场景文件顶层必须是映射", field=str(path))

    flat = apply_overrides(flatten(tree), overrides)
    scenario = build_scenario(unflatten(flat), _key_lines(text), defaults, name=path.stem)
    logger.info(f"📋 场景已加载: {path.name}（势 {scenario.potential.name}，度规 {scenario.metric.name}）")
    return scenario
