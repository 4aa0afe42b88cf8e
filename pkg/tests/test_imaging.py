"""Camera projection tests."""

import math

import numpy as np
import pytest

from radiofusion.errors import BehindCameraError, InvalidInputError
from radiofusion.imaging import CameraModel, RadioRegion, batch_project, project
from radiofusion.radio import SPEED_OF_LIGHT, RadioEstimate

CAMERA = CameraModel(
    focal_length_px=3000.0, image_width=1280.0, image_height=720.0,
    fov_h=64.0, fov_v=52.0,
)
# Short focal length makes the FOV limit bind before the image border.
WIDE = CameraModel(
    focal_length_px=500.0, image_width=1280.0, image_height=720.0,
    fov_h=64.0, fov_v=52.0,
)


def estimate(aoa_h=90.0, aoa_v=90.0, tof=20e-9, identifier="p0"):
    return RadioEstimate(aoa_h=aoa_h, aoa_v=aoa_v, tof=tof,
                         magnitude=1.0, identifier=identifier)


class TestProject:
    def test_broadside_center_is_image_center(self):
        for tof in (5e-9, 50e-9, 500e-9):
            region = project(estimate(tof=tof), CAMERA)
            assert region is not None
            assert region.center_x == pytest.approx(640.0)
            assert region.center_y == pytest.approx(360.0)

    def test_edge_from_similar_triangles(self):
        # 5 m plane distance with a 3000 px focal length: 1 m maps to 600 px.
        tof = 5.0 / SPEED_OF_LIGHT
        region = project(estimate(tof=tof), CAMERA, person_extent_m=1.0)
        assert region.edge == pytest.approx(600.0, rel=1e-12)

    def test_doubling_range_halves_edge_fixed_center(self):
        near = project(estimate(tof=10e-9), CAMERA)
        far = project(estimate(tof=20e-9), CAMERA)
        assert far.edge == pytest.approx(near.edge / 2.0, rel=1e-12)
        assert (far.center_x, far.center_y) == (near.center_x, near.center_y)

    def test_round_trip_factor_scales_range(self):
        one_way = project(estimate(tof=10e-9), CAMERA, range_factor=1.0)
        radar = project(estimate(tof=20e-9), CAMERA, range_factor=0.5)
        assert radar.edge == pytest.approx(one_way.edge, rel=1e-12)

    def test_out_of_fov_returns_none(self):
        assert project(estimate(aoa_h=90.0 + 33.0), WIDE) is None
        assert project(estimate(aoa_h=90.0 + 31.0), WIDE) is not None
        assert project(estimate(aoa_v=90.0 + 27.0), WIDE) is None

    def test_out_of_frame_center_returns_none(self):
        # In FOV but the tangent mapping leaves the image with l = 3000 px.
        assert project(estimate(aoa_h=90.0 + 20.0), CAMERA) is None

    def test_behind_camera_raises(self):
        with pytest.raises(BehindCameraError):
            project(estimate(aoa_h=180.0), WIDE)
        with pytest.raises(BehindCameraError):
            project(estimate(aoa_v=0.0), WIDE)

    def test_rejects_bad_extent(self):
        with pytest.raises(InvalidInputError):
            project(estimate(), CAMERA, person_extent_m=0.0)

    def test_angle_round_trip_recovers_estimate(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            aoa_h = 90.0 + rng.uniform(-30, 30)
            aoa_v = 90.0 + rng.uniform(-24, 24)
            region = project(estimate(aoa_h=aoa_h, aoa_v=aoa_v, tof=30e-9), WIDE)
            if region is None:
                continue
            back_h = 90.0 + math.degrees(
                math.atan((region.center_x - WIDE.image_width / 2) / WIDE.focal_length_px))
            back_v = 90.0 + math.degrees(
                math.atan((region.center_y - WIDE.image_height / 2) / WIDE.focal_length_px))
            assert back_h == pytest.approx(aoa_h, abs=1e-9)
            assert back_v == pytest.approx(aoa_v, abs=1e-9)

    def test_edge_strictly_decreasing_in_tof(self):
        tofs = np.linspace(5e-9, 200e-9, 40)
        edges = [project(estimate(tof=float(t)), CAMERA).edge for t in tofs]
        assert all(a > b for a, b in zip(edges, edges[1:]))

    def test_centers_always_inside_image(self):
        rng = np.random.default_rng(4)
        for _ in range(300):
            region = project(
                estimate(aoa_h=90 + rng.uniform(-40, 40), aoa_v=90 + rng.uniform(-40, 40),
                         tof=float(rng.uniform(1e-9, 1e-6))),
                WIDE,
            )
            if region is None:
                continue
            assert 0.0 <= region.center_x <= WIDE.image_width
            assert 0.0 <= region.center_y <= WIDE.image_height


class TestBatchProject:
    def test_empty(self):
        assert batch_project([], CAMERA) == []

    def test_drops_out_of_fov(self):
        estimates = [estimate(identifier="in"), estimate(aoa_h=150.0, identifier="out")]
        regions = batch_project(estimates, WIDE)
        assert [r.identifier for r in regions] == ["in"]

    def test_drops_behind_camera_without_raising(self):
        estimates = [estimate(identifier="a"), estimate(aoa_h=180.0, identifier="b")]
        regions = batch_project(estimates, WIDE)
        assert [r.identifier for r in regions] == ["a"]

    def test_duplicate_estimates_keep_identifiers(self):
        estimates = [estimate(identifier="a"), estimate(identifier="b")]
        regions = batch_project(estimates, CAMERA)
        assert [r.identifier for r in regions] == ["a", "b"]


class TestRadioRegion:
    def test_bbox(self):
        region = RadioRegion(center_x=50.0, center_y=40.0, edge=20.0, identifier="r")
        assert region.to_bbox() == (40.0, 30.0, 20.0, 20.0)

    def test_positive_edge_required(self):
        with pytest.raises(InvalidInputError):
            RadioRegion(center_x=0, center_y=0, edge=0.0, identifier="r")

    def test_camera_validation(self):
        with pytest.raises(InvalidInputError):
            CameraModel(0.0, 100, 100, 60, 60)
        with pytest.raises(InvalidInputError):
            CameraModel(100.0, 100, 100, 190.0, 60)
