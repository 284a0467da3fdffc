"""CSV/JSON 导出与 SVG 投影的测试。"""

import json
import os
import re

import numpy as np
import pytest

from geodesic_engine.integrator import IntegratorConfig, integrate
from geodesic_engine.rhs import ParticleParams
from magnetic_analytic.clouds import SphereSpec, sphere_sample, wavefront_sample
from output.exporters import (
    CLOUD_EXPORT_COLUMNS,
    TRAJECTORY_COLUMNS,
    atomic_write_text,
    export_cloud,
    export_trajectory,
    read_csv,
)
from output.svg_projection import SvgProjectionWriter


@pytest.fixture
def trajectory(magnetic_dist, magnetic_start):
    cfg = IntegratorConfig(step=0.01, t_end=0.1, record_every=2)
    return integrate(magnetic_dist, ParticleParams(mass=1.0, charge=1.5), magnetic_start(0.7), cfg)


class TestTrajectoryExport:
    def test_csv_round_trip_is_exact(self, trajectory, tmp_path):
        path = export_trajectory(trajectory, tmp_path / "traj.csv")
        header, rows = read_csv(path)
        assert tuple(header) == TRAJECTORY_COLUMNS
        assert rows.shape == (len(trajectory.t), len(TRAJECTORY_COLUMNS))
        np.testing.assert_array_equal(rows[:, 0], trajectory.t)
        np.testing.assert_array_equal(rows[:, 1:10], trajectory.states)

    def test_csv_uses_lf(self, trajectory, tmp_path):
        path = export_trajectory(trajectory, tmp_path / "traj.csv")
        assert b"\r\n" not in path.read_bytes()

    def test_json_layout(self, trajectory, tmp_path):
        meta = {"name": "magnetic", "charge": 1.5}
        path = export_trajectory(trajectory, tmp_path / "traj.json", fmt="json", meta=meta)
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert set(payload) == {"meta", "columns", "points"}
        assert payload["meta"] == meta
        assert payload["columns"] == list(TRAJECTORY_COLUMNS)
        assert len(payload["points"]) == len(trajectory.t)
        assert payload["points"][-1][5] == trajectory.states[-1][4]

    def test_output_is_deterministic(self, magnetic_dist, magnetic_start, tmp_path):
        cfg = IntegratorConfig(step=0.01, t_end=0.1)
        params = ParticleParams(mass=1.0, charge=1.5)
        first = export_trajectory(integrate(magnetic_dist, params, magnetic_start(0.7), cfg), tmp_path / "a.csv")
        second = export_trajectory(integrate(magnetic_dist, params, magnetic_start(0.7), cfg), tmp_path / "b.csv")
        assert first.read_bytes() == second.read_bytes()


class TestCloudExport:
    def test_csv_columns(self, tmp_path):
        cloud = sphere_sample(SphereSpec(alpha_count=3, p_count=4))
        header, rows = read_csv(export_cloud(cloud, tmp_path / "sphere.csv"))
        assert tuple(header) == CLOUD_EXPORT_COLUMNS
        assert rows.shape == (12, 5)
        np.testing.assert_array_equal(rows[:, 3], cloud.column("alpha"))

    def test_json_meta_records_sampling(self, tmp_path):
        cloud = wavefront_sample(SphereSpec(alpha_count=2, p_count=3, p_min=np.pi, p_max=4 * np.pi))
        payload = json.loads(export_cloud(cloud, tmp_path / "wf.json", fmt="json").read_text(encoding="utf-8"))
        assert payload["meta"]["kind"] == "wavefront"
        assert payload["meta"]["p_count"] == 3
        assert len(payload["points"]) == 6


class TestAtomicWrite:
    def test_failed_replace_leaves_nothing(self, tmp_path, monkeypatch):
        target = tmp_path / "out.csv"

        def broken_replace(src, dst):
            raise OSError("disk full")

        monkeypatch.setattr(os, "replace", broken_replace)
        with pytest.raises(OSError):
            atomic_write_text(target, "a,b\n1,2\n")
        assert list(tmp_path.iterdir()) == []

    def test_overwrites_existing(self, tmp_path):
        target = tmp_path / "out.csv"
        target.write_text("old", encoding="utf-8")
        atomic_write_text(target, "new")
        assert target.read_text(encoding="utf-8") == "new"
        assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]


class TestSvgProjection:
    def test_one_polyline_per_alpha(self, tmp_path):
        cloud = sphere_sample(SphereSpec(alpha_count=5, p_count=7))
        paths = SvgProjectionWriter().save(cloud, tmp_path / "sphere.csv")
        assert [p.name for p in paths] == ["sphere.x2x3.svg", "sphere.x2x4.svg"]
        for path in paths:
            text = path.read_text(encoding="utf-8")
            assert text.count("<polyline") == 5
            assert text.startswith("<?xml")

    def test_degenerate_axis_does_not_divide_by_zero(self):
        # α = ±π、p = 0 时所有点的 x³ 相同
        cloud = sphere_sample(SphereSpec(alpha_count=2, p_count=2, p_min=0.0, p_max=0.0))
        svg = SvgProjectionWriter().generate(cloud, "x2x3")
        assert "nan" not in svg

    @pytest.mark.parametrize("projection, y_name", [("x2x3", "x3"), ("x2x4", "x4")])
    def test_axis_labels_sit_beside_axes(self, projection, y_name):
        cloud = sphere_sample(SphereSpec(alpha_count=3, p_count=4))
        svg = SvgProjectionWriter().generate(cloud, projection)
        (_, axis_y), (axis_x, _) = [
            tuple(map(float, pair)) for pair in re.findall(r'<line x1="([-\d.]+)" y1="([-\d.]+)"', svg)
        ]
        x_label_y = float(re.search(r'y="([-\d.]+)" text-anchor="end">x2<', svg).group(1))
        y_label_x = float(re.search(rf'<text x="([-\d.]+)" y="34">{y_name}<', svg).group(1))
        assert x_label_y == pytest.approx(axis_y - 6, abs=0.011)
        assert y_label_x == pytest.approx(axis_x + 6, abs=0.011)
