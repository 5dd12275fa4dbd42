"""Broadcast soccer camera calibration and tracking."""

import json

from ._core import (
    CameraState,
    ImageSize,
    PitchcamError,
    TripodRig,
    camera_on_rig,
    class_names,
    default_config,
    fit_rig,
    lift_to_ground,
    project,
    rotation_from_angles,
    simulate,
    track,
    tripod_residual,
    unproject,
)
from ._core import evaluate as _evaluate


def evaluate(reports, annotations, taus=(5.0, 10.0)):
    """Summary dict of JaC per tolerance, MRE, MedRE and completeness."""
    return json.loads(_evaluate(reports, annotations, list(taus)))


__all__ = [
    "CameraState",
    "ImageSize",
    "PitchcamError",
    "TripodRig",
    "camera_on_rig",
    "class_names",
    "default_config",
    "evaluate",
    "fit_rig",
    "lift_to_ground",
    "project",
    "rotation_from_angles",
    "simulate",
    "track",
    "tripod_residual",
    "unproject",
]
