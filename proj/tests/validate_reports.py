"""Validate report.json for every preset plus edge-case configs against the schema."""
import json
import os
import subprocess
import sys
import tempfile

import jsonschema

cli, schema_path = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)
validator = jsonschema.Draft202012Validator(schema)

presets = [line.split()[0] for line in subprocess.run([cli, "presets"], check=True, capture_output=True, text=True).stdout.splitlines()]
fig2 = {"model": {"kind": "ext1", "t": {"0": [0.5, 0.125], "1": [2, 2], "2": [4, 1]}},
        "analyses": ["spectrum", "charpoly", "winding", "edges", "trajectory"]}
extra = {
    "pbc": dict(fig2, chain={"n_cells": 12, "boundary": "pbc"}),
    "strict": dict(fig2, tolerances={"char_qh": 1e-15}),
    "critical": dict(fig2, model={"kind": "ssh", "t": {"0": [1, 1], "1": [1, 1]}}),
    "odd-general": dict(fig2, model={"kind": "ext1", "t": {"0": [1, 1], "1": [3, 3], "2": [3.5, 4]}},
                        chain={"n_cells": 6, "parity": "odd"}),
}

failures = 0
with tempfile.TemporaryDirectory() as tmp:
    jobs = [(p, ["reproduce", p]) for p in presets]
    for name, cfg in extra.items():
        path = os.path.join(tmp, name + ".json")
        with open(path, "w") as f:
            json.dump(cfg, f)
        jobs.append((name, ["run", path]))
    for name, args in jobs:
        out = os.path.join(tmp, "out_" + name)
        rc = subprocess.run([cli] + args, env=dict(os.environ, NHSSH_OUT=out), capture_output=True).returncode
        if rc not in (0, 2):
            print(f"{name}: exit {rc}")
            failures += 1
            continue
        with open(os.path.join(out, "report.json")) as f:
            report = json.load(f)
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        for e in errors:
            print(f"{name}: {'/'.join(map(str, e.path))}: {e.message}")
        failures += bool(errors)
        print(f"{name}: exit {rc}, {'valid' if not errors else 'INVALID'}")

sys.exit(1 if failures else 0)
