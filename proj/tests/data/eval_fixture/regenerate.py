"""Rebuilds the evaluation fixture from the CLI.

Usage: python regenerate.py path/to/pitchcam

Predictions are the truth cameras with fixed pan/tilt/focal perturbations,
and frame 4 has no camera. expected_summary.json is the CLI evaluation of
predictions.jsonl and is frozen afterwards.
"""
import json
import pathlib
import subprocess
import sys

here = pathlib.Path(__file__).resolve().parent
cli = sys.argv[1]
spec = {"frames": 10, "seed": 7}
(here / "spec.json").write_text(json.dumps(spec) + "\n")
subprocess.run([cli, "simulate", str(here / "spec.json"), "-o", str(here / "sim")], check=True)
for name in ("annotations.jsonl", "truth.jsonl"):
    (here / name).write_text((here / "sim" / name).read_text())
for p in (here / "sim").iterdir():
    p.unlink()
(here / "sim").rmdir()

# Perturbations in degrees and relative focal change, one per frame.
offsets = [(0.0, 0.0, 0.0), (0.02, 0.0, 0.0), (0.0, 0.05, 0.0), (0.1, 0.0, 0.002), (None, None, None),
           (-0.15, 0.05, 0.0), (0.0, 0.0, 0.01), (0.25, -0.1, 0.0), (0.05, 0.02, -0.005), (0.4, 0.2, 0.02)]
out = []
for line, (dp, dt, df) in zip((here / "truth.jsonl").read_text().splitlines(), offsets):
    r = json.loads(line)
    if dp is None:
        r["camera"] = None
        r["status"] = "lost"
        r["s"] = None
    else:
        r["camera"]["pan_deg"] += dp
        r["camera"]["tilt_deg"] += dt
        r["camera"]["f_px"] *= 1.0 + df
    out.append(json.dumps(r))
(here / "predictions.jsonl").write_text("\n".join(out) + "\n")
subprocess.run([cli, "eval", str(here / "predictions.jsonl"), str(here / "annotations.jsonl"), "--tau", "5,10",
                "--summary", str(here / "expected_summary.json")], check=True)
