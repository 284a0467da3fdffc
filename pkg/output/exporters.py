"""
轨迹与点云导出器。

- CSV: 逗号分隔、表头为固定列名、LF 换行、17 位有效数字（double 无损往返）
- JSON: {"meta": ..., "columns": [...], "points": [[...], ...]}

所有文件先写入同目录临时文件，成功后再重命名，出错时不留残缺文件。
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np

from geodesic_engine.integrator import Trajectory
from magnetic_analytic.clouds import PointCloud

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = (
    "t", "x0", "x1", "x2", "x3", "x4",
    "u0", "u1", "u2", "u3",
    "pseudonorm", "horiz_defect",
)
CLOUD_EXPORT_COLUMNS = ("x2", "x3", "x4", "alpha", "p")

EXPORT_FORMATS = ("csv", "json")
SIGNIFICANT_DIGITS = 17


def format_number(value: float, digits: int = SIGNIFICANT_DIGITS) -> str:
    return format(float(value), f".{digits}g")


def atomic_write_text(path: Path, content: str) -> Path:
    """写入临时文件后 os.replace 到目标路径。"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(content)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.debug(f"已写入: {path}")
    return path


def trajectory_rows(traj: Trajectory) -> np.ndarray:
    return np.column_stack(
        [traj.t, traj.states, traj.pseudonorm, traj.horizontality_defect]
    )


def cloud_rows(cloud: PointCloud) -> np.ndarray:
    return np.column_stack([cloud.column(name) for name in CLOUD_EXPORT_COLUMNS])


def render_csv(columns, rows: np.ndarray, digits: int = SIGNIFICANT_DIGITS) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(v, digits) for v in row])
    return buffer.getvalue()


def render_json(columns, rows: np.ndarray, meta: dict) -> str:
    payload = {
        "meta": meta,
        "columns": list(columns),
        "points": [[float(v) for v in row] for row in rows],
    }
    return json.dumps(payload, indent=1) + "\n"


def export_trajectory(
    traj: Trajectory,
    path: Path,
    fmt: str = "csv",
    meta: dict | None = None,
    digits: int = SIGNIFICANT_DIGITS,
) -> Path:
    rows = trajectory_rows(traj)
    if fmt == "json":
        return atomic_write_text(path, render_json(TRAJECTORY_COLUMNS, rows, meta or {}))
    return atomic_write_text(path, render_csv(TRAJECTORY_COLUMNS, rows, digits))


def export_cloud(
    cloud: PointCloud,
    path: Path,
    fmt: str = "csv",
    digits: int = SIGNIFICANT_DIGITS,
) -> Path:
    rows = cloud_rows(cloud)
    if fmt == "json":
        meta = {"kind": cloud.kind, **cloud.meta.to_dict()}
        return atomic_write_text(path, render_json(CLOUD_EXPORT_COLUMNS, rows, meta))
    return atomic_write_text(path, render_csv(CLOUD_EXPORT_COLUMNS, rows, digits))


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    """读回导出的 CSV（表头 + 浮点矩阵）。"""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))
