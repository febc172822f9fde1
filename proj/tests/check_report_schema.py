"""Validates `kgdash report --format json` output against docs/report.schema.json."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def report(kgdash, *args):
    out = subprocess.run([kgdash, "report", "--format", "json", *args], check=True, capture_output=True, text=True)
    return json.loads(out.stdout)


def main():
    kgdash, root = sys.argv[1], pathlib.Path(sys.argv[2])
    schema = json.loads((root / "docs" / "report.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    with tempfile.TemporaryDirectory() as tmp:
        empty = pathlib.Path(tmp) / "empty.json"
        empty.write_text('{"entities": [], "statements": []}')
        cases = {
            "fixture (json dump)": report(kgdash, str(root / "tests" / "fixtures" / "kg.json")),
            "fixture (n-triples)": report(kgdash, "--ntriples", str(root / "tests" / "fixtures" / "sample.nt")),
            "empty snapshot": report(kgdash, str(empty)),
        }

    failures = 0
    for name, doc in cases.items():
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for e in errors:
            print(f"{name}: {'/'.join(map(str, e.path))}: {e.message}")
        failures += bool(errors)

    # The schema must actually constrain: a few corrupted variants are rejected.
    base = cases["fixture (json dump)"]
    broken = [
        {**base, "summary": {**base["summary"], "papers_total": -1}},
        {**base, "kpis": {k: v for k, v in base["kpis"].items() if k != "templates"}},
        {**base, "built_at": "yesterday"},
        {**base, "extra": 1},
    ]
    for i, doc in enumerate(broken):
        if validator.is_valid(doc):
            print(f"corrupted variant {i} was accepted")
            failures += 1

    print(f"{len(cases)} reports validated, {len(broken)} corrupted variants checked")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
