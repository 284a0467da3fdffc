#!/usr/bin/env python3
"""
sublorentz 主入口脚本。

子命令:
    python main.py integrate config/scenarios/constant_magnetic.yaml --out traj.csv
    python main.py integrate scenario.yaml --out traj.json --format json --set particle.charge=3
    python main.py sphere --s 1 --phi 1 --p-min 0 --p-max 2pi --grid 256x256 --out sphere.csv --svg
    python main.py wavefront --p-min pi --p-max 8pi --out wave.csv --svg
    python main.py verify all
    python main.py analyze config/scenarios/generic_em.yaml

退出码: 0 成功，1 验证失败，2 输入错误，3 数值发散/度规错误，4 I/O 错误。
"""

from __future__ import annotations

import functools
import logging
import os
import re
import sys
from pathlib import Path

import click
import numpy as np

# 确保项目根目录在 sys.path 中
PROJECT_ROOT = Path(__file__).resolve().parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from fields.base import load_settings
from fields.errors import (
    DegenerateMetricError,
    DivergenceError,
    DomainError,
    FieldEvaluationError,
    ScenarioError,
    SignatureError,
    SpecError,
    SubLorentzError,
)
from geodesic_engine.integrator import FORMULATIONS, GeodesicIntegrator
from magnetic_analytic.clouds import SphereSpec, sphere_sample, wavefront_sample
from output.exporters import EXPORT_FORMATS, export_cloud, export_trajectory
from output.svg_projection import SvgProjectionWriter
from scenario.loader import load_scenario
from verification.analysis import analyze_point
from verification.suites import SUITE_MAP, run_suites

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]

# 异常类型 → 退出码
EXIT_CODES: list[tuple[tuple[type[BaseException], ...], int]] = [
    ((ScenarioError, SpecError, DomainError), 2),
    ((DivergenceError, DegenerateMetricError, SignatureError, FieldEvaluationError), 3),
    ((OSError,), 4),
    ((SubLorentzError,), 2),
]


def setup_logging(level: str = "INFO") -> None:
    """配置日志（输出到 stderr，stdout 只留给结果表格）。"""
    from rich.console import Console
    from rich.logging import RichHandler

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True, show_path=False)],
        force=True,
    )


def exit_code_for(error: BaseException) -> int:
    for types, code in EXIT_CODES:
        if isinstance(error, types):
            return code
    return 1


def handle_errors(fn):
    """把项目异常转换为约定的退出码。"""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (SubLorentzError, OSError) as e:
            code = exit_code_for(e)
            logging.getLogger("main").error(f"❌ {type(e).__name__}: {e}")
            click.echo(f"error: {e}", err=True)
            sys.exit(code)

    return wrapper


# ===== 参数类型 =====

class PiFloat(click.ParamType):
    """浮点数，允许 pi 倍数写法: 2pi、-8pi、pi/2。"""

    name = "float"
    _pattern = re.compile(r"^\s*([+-]?\d*\.?\d*(?:[eE][+-]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")

    def convert(self, value, param, ctx):
        if isinstance(value, (int, float)):
            return float(value)
        text = str(value).strip().lower()
        match = self._pattern.match(text)
        if match:
            coef = match.group(1)
            if coef in ("", "+", "-"):
                coef = f"{coef}1"
            try:
                number = float(coef) * np.pi
            except ValueError:
                self.fail(f"无法解析 {value!r}", param, ctx)
            if match.group(2):
                number /= float(match.group(2))
            return number
        try:
            return float(text)
        except ValueError:
            self.fail(f"无法解析 {value!r}（示例: 3.14、2pi、-8pi、pi/2）", param, ctx)


class GridType(click.ParamType):
    """NxM 网格（α 个数 × p 个数）。"""

    name = "NxM"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        match = re.fullmatch(r"\s*(\d+)\s*[xX×]\s*(\d+)\s*", str(value))
        if not match:
            self.fail(f"网格应为 NxM，收到 {value!r}", param, ctx)
        return int(match.group(1)), int(match.group(2))


PI_FLOAT = PiFloat()
GRID = GridType()


# ===== 输出 =====

def _console():
    from rich.console import Console

    return Console()


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def _print_trajectory_summary(scenario, traj, out_path: Path, formulation: str) -> None:
    from rich.table import Table

    final = traj.states[-1]
    table = Table(title=f"integrate: {scenario.name}")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    table.add_row("potential", scenario.potential.name)
    table.add_row("metric", scenario.metric.name)
    table.add_row("formulation", formulation)
    table.add_row("steps", str(scenario.integrator.n_steps))
    table.add_row("h", _fmt(scenario.integrator.effective_step))
    table.add_row("t", _fmt(traj.t[-1]))
    for k in range(5):
        table.add_row(f"x{k}", _fmt(final[k]))
    for k in range(4):
        table.add_row(f"u{k}", _fmt(final[5 + k]))
    table.add_row("max pseudonorm drift", f"{traj.max_pseudonorm_drift:.3e}")
    table.add_row("max horiz defect", f"{traj.max_horizontality_defect:.3e}")
    table.add_row("max fiber drift", f"{traj.max_fiber_drift:.3e}")
    table.add_row("output", str(out_path))
    _console().print(table)


def _print_cloud_summary(cloud, paths: list[Path]) -> None:
    from rich.table import Table

    spec = cloud.meta
    table = Table(title=cloud.kind)
    table.add_column("quantity")
    table.add_column("value", justify="right")
    table.add_row("s", _fmt(spec.radius_s))
    table.add_row("phi", _fmt(spec.phi))
    table.add_row("p range", f"[{_fmt(spec.p_min)}, {_fmt(spec.p_max)}]")
    table.add_row("grid", f"{spec.alpha_count}x{spec.p_count}")
    table.add_row("points", str(len(cloud)))
    for path in paths:
        table.add_row("output", str(path))
    _console().print(table)


# ===== 命令 =====

@click.group()
@click.option(
    "--log-level",
    "-l",
    default=None,
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    help="日志级别（默认取 SUBLORENTZ_LOG_LEVEL 或 settings.yaml）",
)
@click.pass_context
def cli(ctx: click.Context, log_level: str | None) -> None:
    """
    🧭 sublorentz — 带电粒子运动的五维非完整（次洛伦兹）测地线引擎

    积分水平测地线，计算常磁场闭式解，生成测地球面与非完整波前，
    并分析非正常测地线与增长向量。
    """
    settings = load_settings()
    level = log_level or os.getenv("SUBLORENTZ_LOG_LEVEL") or settings.get("logging", {}).get("level", "INFO")
    setup_logging(level)
    ctx.obj = settings


def _export_options(fn):
    fn = click.option(
        "--format",
        "fmt",
        default=None,
        type=click.Choice(EXPORT_FORMATS),
        help="导出格式（默认取 settings.yaml 的 export.format）",
    )(fn)
    fn = click.option("--out", "-o", "out", required=True, type=click.Path(dir_okay=False, path_type=Path), help="输出文件路径")(fn)
    return fn


def _export_settings(settings: dict, fmt: str | None) -> tuple[str, int]:
    export_cfg = settings.get("export", {})
    return fmt or export_cfg.get("format", "csv"), int(export_cfg.get("digits", 17))


@cli.command()
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@_export_options
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="覆盖场景字段，可重复")
@click.option(
    "--formulation",
    default="pontryagin",
    type=click.Choice(FORMULATIONS),
    help="运动方程形式",
)
@click.pass_obj
@handle_errors
def integrate(settings: dict, scenario_file: Path, out: Path, fmt: str | None, overrides: tuple[str, ...], formulation: str) -> None:
    """积分场景文件描述的水平测地线，导出轨迹。"""
    logger = logging.getLogger("integrate")
    scenario = load_scenario(scenario_file, overrides, settings)
    fmt, digits = _export_settings(settings, fmt)

    integrator = GeodesicIntegrator(scenario.distribution, scenario.particle, formulation)
    logger.info(f"🚀 开始积分: T={scenario.integrator.t_end:g}, h={scenario.integrator.effective_step:.3e}")
    traj = integrator.integrate(scenario.initial, scenario.integrator)

    meta = {**scenario.describe(), "formulation": formulation}
    export_trajectory(traj, out, fmt=fmt, meta=meta, digits=digits)
    logger.info(f"✅ 轨迹已保存: {out}（{len(traj)} 个样本）")
    _print_trajectory_summary(scenario, traj, out, formulation)


def _cloud_options(fn):
    """sphere / wavefront 共用选项；p 范围默认值取自 settings.yaml。"""
    fn = _export_options(fn)
    fn = click.option("--svg", is_flag=True, default=False, help="同时输出 (x2,x3) 与 (x2,x4) 投影 SVG")(fn)
    fn = click.option("--grid", default=None, type=GRID, help="网格 NxM（α 个数 × p 个数）")(fn)
    fn = click.option("--p-max", default=None, type=PI_FLOAT, help="p 上界（可写 2pi、8pi）")(fn)
    fn = click.option("--p-min", default=None, type=PI_FLOAT, help="p 下界（可写 -2pi、pi）")(fn)
    fn = click.option("--phi", default=None, type=float, help="磁场强度 φ")(fn)
    fn = click.option("--s", "radius_s", default=None, type=float, help="测地线长度 s")(fn)
    return fn


def _run_cloud(kind: str, settings: dict, radius_s, phi, p_min, p_max, grid, svg: bool, out: Path, fmt) -> None:
    logger = logging.getLogger(kind)
    cloud_cfg = settings.get("cloud", {})
    p_range = cloud_cfg.get(f"{kind}_p_range_pi", [0.0, 2.0] if kind == "sphere" else [1.0, 8.0])
    alpha_count, p_count = grid or (cloud_cfg.get("alpha_count", 256), cloud_cfg.get("p_count", 256))
    spec = SphereSpec(
        radius_s=radius_s if radius_s is not None else float(cloud_cfg.get("s", 1.0)),
        alpha_count=alpha_count,
        p_count=p_count,
        p_min=p_min if p_min is not None else float(p_range[0]) * np.pi,
        p_max=p_max if p_max is not None else float(p_range[1]) * np.pi,
        phi=phi if phi is not None else float(cloud_cfg.get("phi", 1.0)),
    )
    fmt, digits = _export_settings(settings, fmt)

    cloud = sphere_sample(spec) if kind == "sphere" else wavefront_sample(spec)
    paths = [export_cloud(cloud, out, fmt=fmt, digits=digits)]
    if svg:
        paths.extend(SvgProjectionWriter().save(cloud, out))
    logger.info(f"✅ {kind} 已保存: {out}（{len(cloud)} 个端点）")
    _print_cloud_summary(cloud, paths)


@cli.command()
@_cloud_options
@click.pass_obj
@handle_errors
def sphere(settings: dict, radius_s, phi, p_min, p_max, grid, svg, out, fmt) -> None:
    """测地球面 B(s)：要求 |p|·s ≤ 2π。"""
    _run_cloud("sphere", settings, radius_s, phi, p_min, p_max, grid, svg, out, fmt)


@cli.command()
@_cloud_options
@click.pass_obj
@handle_errors
def wavefront(settings: dict, radius_s, phi, p_min, p_max, grid, svg, out, fmt) -> None:
    """非完整波前：不做最优性截断。"""
    _run_cloud("wavefront", settings, radius_s, phi, p_min, p_max, grid, svg, out, fmt)


@cli.command()
@click.argument("suite", default="all", type=click.Choice([*SUITE_MAP, "all"]))
@click.pass_obj
def verify(settings: dict, suite: str) -> None:
    """运行验证套件并打印结果表格；任一检查失败时退出码为 1。"""
    from rich.table import Table

    logger = logging.getLogger("verify")
    results = run_suites([suite], settings)

    table = Table(title=f"verify: {suite}")
    table.add_column("suite")
    table.add_column("check")
    table.add_column("measured", justify="right")
    table.add_column("tolerance", justify="right")
    table.add_column("status")
    for r in results:
        table.add_row(
            r.suite,
            r.name,
            f"{r.measured:.3e}",
            f"{r.tolerance:.3e}",
            "[green]PASS[/green]" if r.passed else "[red]FAIL[/red]",
        )
    _console().print(table)

    failed = [r for r in results if not r.passed]
    if failed:
        for r in failed:
            logger.error(f"[{r.suite}] {r.name}: measured {r.measured:.6g}, tolerance {r.tolerance:.6g} {r.detail}")
            click.echo(f"FAILED {r.suite}/{r.name}: measured={r.measured:.6g} tolerance={r.tolerance:.6g}", err=True)
        sys.exit(1)
    logger.info(f"🎉 全部 {len(results)} 项检查通过")


@cli.command()
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="覆盖场景字段，可重复")
@click.pass_obj
@handle_errors
def analyze(settings: dict, scenario_file: Path, overrides: tuple[str, ...]) -> None:
    """在场景初始点报告 det F、rank F、非正常核、增长向量与 ball-box 指数。"""
    from rich.table import Table

    scenario = load_scenario(scenario_file, overrides, settings)
    numerics = settings.get("numerics", {})
    result = analyze_point(
        scenario.distribution,
        scenario.initial.position.base,
        rcond=float(numerics.get("kernel_rcond", 1e-12)),
        threshold=float(numerics.get("field_threshold", 1e-12)),
    )

    def vec(v) -> str:
        return "(" + ", ".join(f"{c:.6g}" for c in v) + ")"

    table = Table(title=f"analyze: {scenario.name}")
    table.add_column("quantity")
    table.add_column("value")
    table.add_row("x", vec(result.x))
    table.add_row("E", vec(result.faraday.electric))
    table.add_row("H", vec(result.faraday.magnetic))
    table.add_row("det F", f"{result.det_F:.10g}")
    table.add_row("rank F", str(result.kernel.rank_F))
    table.add_row("kernel dim", str(result.kernel.dimension))
    table.add_row("kernel basis", "; ".join(vec(v) for v in result.kernel.basis) or "∅")
    table.add_row("growth vector", "(" + ", ".join(str(n) for n in result.growth.dims) + ")")
    table.add_row("nonholonomy degree", str(result.growth.degree))
    table.add_row("box exponents", "(" + ", ".join(str(p) for p in result.exponents.phi) + ")")
    table.add_row("metric eigenvalues", vec(result.metric_eigenvalues))
    _console().print(table)


if __name__ == "__main__":
    cli()
