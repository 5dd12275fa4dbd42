import json
import math

import numpy as np
import pytest

import pitchcam

CLEAN = json.dumps(
    {
        "frames": 5,
        "seed": 3,
        "player_boxes": 0,
        "noise": {
            "marking_sigma_px": 0.0,
            "flow_sigma_px": 0.0,
            "flow_outlier_rate": 0.0,
            "keypoint_sigma_px": 0.0,
            "keypoint_outlier_rate": 0.0,
        },
    }
)


def rig():
    return pitchcam.TripodRig(np.array([0.0, 55.0, -12.0]), 0.25)


def test_rotation_is_orthonormal():
    r = pitchcam.rotation_from_angles(0.3, 1.2, -0.1)
    assert np.allclose(r.T @ r, np.eye(3), atol=1e-12)
    assert math.isclose(np.linalg.det(r), 1.0, abs_tol=1e-12)


def test_optical_axis_projects_to_principal_point():
    cam = pitchcam.camera_on_rig(rig(), math.radians(-10), math.radians(77), 0.0, 0.3, 2000.0, -0.05)
    axis = cam.rotation()[2]
    px = pitchcam.project(cam, cam.position + 40.0 * axis)
    assert np.allclose(px, cam.principal_point(), atol=1e-9)
    assert pitchcam.project(cam, cam.position - 40.0 * axis) is None


def test_ground_round_trip_and_tripod_residual():
    cam = pitchcam.camera_on_rig(rig(), 0.2, math.radians(76), 0.0, 0.5, 1800.0, 0.0)
    ground = np.array([10.0, -5.0, 0.0])
    assert np.allclose(pitchcam.lift_to_ground(cam, pitchcam.project(cam, ground)), ground, atol=1e-6)
    assert abs(pitchcam.tripod_residual(cam, rig())) < 1e-12


def test_fit_rig_recovers_the_rig():
    cams = [
        pitchcam.camera_on_rig(rig(), math.radians(p), math.radians(t), 0.0, lam, 2000.0, 0.0)
        for p, t, lam in [(-25 + 4 * i, 72 + (i % 5) * 2, 0.1 * (i % 3)) for i in range(15)]
    ]
    fit = pitchcam.fit_rig(cams)
    assert np.allclose(fit.center, [0.0, 55.0, -12.0], atol=1e-6)
    assert math.isclose(fit.offset, 0.25, abs_tol=1e-6)


def test_simulate_track_evaluate():
    detections = pitchcam.simulate(CLEAN)
    annotations = pitchcam.simulate(CLEAN, what="annotations")
    assert pitchcam.simulate(CLEAN) == detections
    reports = pitchcam.track(detections, rig=rig())
    lines = [json.loads(line) for line in reports.splitlines()]
    assert len(lines) == 5
    assert all(r["status"] == "tracking" for r in lines)
    summary = pitchcam.evaluate(reports, annotations)
    assert summary["jac_percent"] == [100.0, 100.0]
    assert summary["completeness_percent"] == 100.0


def test_errors_are_typed():
    with pytest.raises(pitchcam.PitchcamError):
        pitchcam.simulate(CLEAN, what="nonsense")
    with pytest.raises(pitchcam.PitchcamError):
        pitchcam.evaluate("", "")
    assert len(pitchcam.class_names()) == 29
    assert "solver" in json.loads(pitchcam.default_config())
