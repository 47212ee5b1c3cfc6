"""Runs every CLI command with --format json and validates the files against schemas/."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])

runs = [
    (["response", "--c3", "-0.6", "--f", "0.005,0.008"], {"response_0.json": "response", "response_1.json": "response",
                                                          "response_summary.json": "response_summary"}),
    (["singular", "--c3", "-0.6"], {"singular.json": "singular"}),
    (["regions", "--resolution", "40"], {"regions.json": "regions"}),
    (["predict", "--law", "sine_cubic", "--c1", "0.1", "--c3", "1e-5", "--x0max", "35"], {"predict.json": "predict"}),
    (["basin", "--c3", "-0.6", "--resolution", "7"], {"basin.json": "basin"}),
    (["verify", "--c3", "-0.8"], {"verify.json": "verify"}),
    (["integrate", "--c3", "-0.6", "--periods", "2"], {"trajectory.json": "trajectory"}),
    (["continue", "--c3", "-0.6", "--f", "0.008", "--x-peak", "0.6"], {"orbit_branch.json": "orbit_branch"}),
]

failures = 0
with tempfile.TemporaryDirectory() as tmp:
    for args, files in runs:
        out = pathlib.Path(tmp) / args[0]
        proc = subprocess.run([cli, "--out", str(out), "--format", "json", *args], capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"FAIL {args[0]}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        for name, schema_name in files.items():
            schema = json.loads((schema_dir / f"{schema_name}.schema.json").read_text())
            try:
                jsonschema.validate(json.loads((out / name).read_text()), schema)
                print(f"ok   {args[0]}: {name}")
            except (jsonschema.ValidationError, FileNotFoundError) as e:
                print(f"FAIL {args[0]}: {name}: {e}")
                failures += 1

    # A failure after the first file was written leaves a flagged partial result.
    out = pathlib.Path(tmp) / "partial"
    (out / "response_1.json").mkdir(parents=True)
    proc = subprocess.run([cli, "--out", str(out), "--format", "json", "response", "--f", "0.005,0.008"],
                          capture_output=True, text=True)
    try:
        assert proc.returncode == 1, f"exit {proc.returncode}"
        assert proc.stderr.startswith("error: response: "), proc.stderr
        marker = json.loads((out / "INCOMPLETE.json").read_text())
        jsonschema.validate(marker, json.loads((schema_dir / "incomplete.schema.json").read_text()))
        assert marker["files"] == ["response_0.json"], marker
        print("ok   partial result flagged")
    except (AssertionError, jsonschema.ValidationError, FileNotFoundError) as e:
        print(f"FAIL partial result: {e}")
        failures += 1

sys.exit(1 if failures else 0)
