#!/usr/bin/env python3
"""Validate a CLI output directory: manifests against the schema, checksums, CSV headers, SVG well-formedness."""
import csv
import hashlib
import json
import pathlib
import sys
import xml.etree.ElementTree as ET

import jsonschema

HEADERS = {
    "spectrum.csv": ["q", "n", "E", "size", "q_quality", "degenerate_pair", "residual"],
    "sweep.csv": ["h0", "l0", "level", "eigenvalue", "E", "residual"],
    "oracle.csv": ["level", "E_reduced", "E_direct", "q_reduced", "q_direct", "diff"],
}
TRAJECTORY = ["t", "deviation", "certified_bound", "paper_bound"]
SVG_NS = "{http://www.w3.org/2000/svg}"


def main(out: pathlib.Path, schema_path: pathlib.Path) -> int:
    schema = json.loads(schema_path.read_text())
    failures = []

    manifests = sorted(out.glob("*.manifest.json"))
    if {m.name.split(".")[0] for m in manifests} != {"build", "spectrum", "fit", "equilibrate", "oracle"}:
        failures.append(f"expected one manifest per command, found {[m.name for m in manifests]}")
    for m in manifests:
        doc = json.loads(m.read_text())
        try:
            jsonschema.validate(doc, schema)
        except jsonschema.ValidationError as e:
            failures.append(f"{m.name}: {e.message}")
            continue
        if doc["status"] not in ("ok", "partial"):
            failures.append(f"{m.name}: status {doc['status']}")
        for entry in doc["outputs"]:
            data = (out / entry["path"]).read_bytes()
            if hashlib.sha256(data).hexdigest() != entry["sha256"] or len(data) != entry["bytes"]:
                failures.append(f"{m.name}: checksum mismatch for {entry['path']}")

    for path in sorted(out.glob("*.csv")):
        raw = path.read_bytes()
        if b"\n" in raw.replace(b"\r\n", b""):
            failures.append(f"{path.name}: bare LF line ending")
        rows = list(csv.reader(raw.decode().splitlines()))
        expected = TRAJECTORY if path.name.startswith("trajectory_d") else HEADERS.get(path.name)
        if expected is not None and rows[0] != expected:
            failures.append(f"{path.name}: header {rows[0]}")
        if len(rows) < 2 or any(len(r) != len(rows[0]) for r in rows):
            failures.append(f"{path.name}: ragged or empty")

    svgs = sorted(out.glob("*.svg"))
    if not svgs:
        failures.append("no SVG output")
    for path in svgs:
        try:
            root = ET.parse(path).getroot()
        except ET.ParseError as e:
            failures.append(f"{path.name}: {e}")
            continue
        marks = root.iter(SVG_NS + "polyline"), root.iter(SVG_NS + "circle")
        if root.tag != SVG_NS + "svg" or sum(1 for it in marks for _ in it) == 0:
            failures.append(f"{path.name}: no plotted data")

    for f in failures:
        print("FAIL", f)
    print(f"checked {len(manifests)} manifests, {len(list(out.glob('*.csv')))} CSV, {len(svgs)} SVG")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])))
