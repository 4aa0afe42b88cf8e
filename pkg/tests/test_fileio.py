"""Round-trip tests for every file schema."""

import json

import numpy as np
import pytest

from radiofusion import fileio
from radiofusion.errors import SchemaError
from radiofusion.fusion import Detection
from radiofusion.imaging import RadioRegion
from radiofusion.radio import ArrayGeometry, RadioEstimate, synthesize_csi
from radiofusion.sim_regions import Annotation

GEO = ArrayGeometry(num_antennas=4, element_spacing=0.0258, num_subcarriers=8,
                    base_frequency=5.8e9, frequency_interval=312.5e3)


def test_csi_round_trip(tmp_path):
    frame = synthesize_csi([(75.0, 40e-9, 1.0)], GEO, noise_std=0.1, seed=3,
                           timestamp=1.25)
    path = tmp_path / "frame.json"
    fileio.write_csi_frame(path, frame, image_id="img7")
    loaded, image_id = fileio.read_csi_frame(path)
    assert image_id == "img7"
    assert loaded.geometry == GEO
    assert loaded.timestamp == 1.25
    np.testing.assert_array_equal(loaded.samples, frame.samples)


def test_annotations_round_trip(tmp_path):
    anns = [
        Annotation(image_id="a", bbox=(1.0, 2.0, 30.0, 60.0)),
        Annotation(image_id="b", bbox=(5.0, 5.0, 20.0, 40.0), height_px=42.0,
                   occlusion_fraction=0.25),
    ]
    path = tmp_path / "ann.json"
    fileio.write_annotations(path, ["a", "b", "empty"], anns, image_size=(640, 480))
    image_ids, loaded = fileio.read_annotations(path)
    assert image_ids == ["a", "b", "empty"]
    assert loaded == anns


def test_annotations_ignore_flag_dropped(tmp_path):
    path = tmp_path / "ann.json"
    payload = {
        "schema": fileio.ANNOTATIONS_SCHEMA,
        "images": [{"id": 3}],
        "annotations": [
            {"image_id": 3, "bbox": [0, 0, 10, 10]},
            {"image_id": 3, "bbox": [5, 5, 10, 10], "ignore": True},
        ],
    }
    path.write_text(json.dumps(payload))
    image_ids, loaded = fileio.read_annotations(path)
    assert image_ids == ["3"]  # integer ids normalized to strings
    assert len(loaded) == 1 and loaded[0].image_id == "3"


def test_regions_round_trip(tmp_path):
    regions = {
        "img0": [RadioRegion(center_x=10.5, center_y=20.25, edge=33.125, identifier="r0")],
        "img1": [
            RadioRegion(center_x=1.0, center_y=2.0, edge=3.0, identifier="r0"),
            RadioRegion(center_x=4.0, center_y=5.0, edge=6.0, identifier="r1"),
        ],
    }
    path = tmp_path / "regions.json"
    fileio.write_regions(path, regions)
    assert fileio.read_regions(path) == regions


def test_detections_round_trip(tmp_path):
    dets = [
        Detection(image_id="x", bbox=(0.0, 1.0, 2.0, 3.0), score=0.5),
        Detection(image_id="y", bbox=(1.0, 1.0, 2.0, 2.0), score=0.25,
                  region_id="r1", cell=(0.0, 0.0, 8.0, 8.0)),
    ]
    path = tmp_path / "dets.json"
    fileio.write_detections(path, dets)
    assert fileio.read_detections(path) == dets


def test_estimates_round_trip(tmp_path):
    estimates = {
        "img0": [RadioEstimate(aoa_h=91.0, aoa_v=88.5, tof=42e-9, magnitude=12.5,
                               identifier="p0")],
    }
    path = tmp_path / "est.json"
    fileio.write_estimates(path, estimates)
    assert fileio.read_estimates(path) == estimates


def test_curve_round_trip(tmp_path):
    curve = [(0.0, 1.0), (0.125, 0.5), (1.0, 0.03125)]
    path = tmp_path / "curve.csv"
    fileio.write_curve_csv(path, curve)
    assert fileio.read_curve_csv(path) == curve


def test_report_round_trip(tmp_path):
    payload = {"method": "baseline", "metrics": {"ap": 0.5}}
    path = tmp_path / "report.json"
    fileio.write_report(path, payload)
    assert fileio.read_report(path) == payload


def test_schema_mismatch_raises(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema": "something-else/9", "detections": []}))
    with pytest.raises(SchemaError):
        fileio.read_detections(path)


def test_missing_field_raises(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "schema": fileio.DETECTIONS_SCHEMA,
        "detections": [{"image_id": "a", "score": 0.5}],
    }))
    with pytest.raises(SchemaError):
        fileio.read_detections(path)


def test_invalid_json_raises(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(SchemaError):
        fileio.read_detections(path)
