"""Runs each JSON-producing ptmsa command and validates its output against docs/schema."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

RUNS = [
    ("dc.json", "dc", ["dc", "--topology", "bulk-ptm-fixture"]),
    ("sense.json", "sense", ["sense", "--topology", "hn-vsa", "--cell", "hrs"]),
    ("sense.json", "sense", ["sense", "--topology", "hp-csa", "--cell", "lrs"]),
    ("transitions.json", "transitions", ["transitions", "--polarity", "p", "--fins", "2"]),
    ("transitions.json", "transitions", ["transitions", "--set", "ptm.v_c_imt=0.79"]),
    ("window.json", "window", ["window", "--polarity", "n", "--fins", "6"]),
    ("mc_summary.json", "mc", ["mc", "--topology", "conv-vsa", "--samples", "8"]),
    ("mc_summary.json", "mc", ["mc", "--topology", "hp-vsa", "--samples", "8", "--mode", "one-at-a-time",
                               "--family", "l_ptm"]),
]


def main() -> int:
    exe, schema_dir = sys.argv[1], Path(sys.argv[2])
    schemas = {p.name: json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
    registry = Registry().with_resources((name, Resource.from_contents(s)) for name, s in schemas.items())
    failures = 0
    for output, schema, args in RUNS:
        with tempfile.TemporaryDirectory() as out:
            proc = subprocess.run([exe, *args, "--out", out], capture_output=True, text=True)
            label = " ".join(args)
            if proc.returncode != 0:
                print(f"FAIL {label}: exit {proc.returncode}: {proc.stderr.strip()}")
                failures += 1
                continue
            doc = json.loads((Path(out) / output).read_text())
            validator = jsonschema.Draft202012Validator(schemas[f"{schema}.schema.json"], registry=registry)
            errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
            for e in errors:
                print(f"FAIL {label}: {'/'.join(map(str, e.path))}: {e.message}")
            failures += bool(errors)
            if not errors:
                print(f"ok   {label}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
