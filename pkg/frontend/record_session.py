#!/usr/bin/env python3
"""Record a service session against the people fixture for the UI contract tests.

Run from the repository root after installing the Python package:

    python3 frontend/record_session.py

Overwrites frontend/tests/fixtures/recorded_session.json.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from shapekit.service import create_app

ROOT = Path(__file__).resolve().parent.parent
GRAPH = ROOT / "tests" / "fixtures" / "people.ttl"
OUT = Path(__file__).resolve().parent / "tests" / "fixtures" / "recorded_session.json"

FOAF = "http://xmlns.com/foaf/0.1/"


def main() -> None:
    client = TestClient(create_app())
    session = client.post("/sessions", json={"graph_path": str(GRAPH)}).json()["session_id"]
    client.post(
        f"/sessions/{session}/infer",
        json={"label": "Person", "mode": "msc", "target": {"selector": "class", "iri": FOAF + "Person"}},
    ).raise_for_status()
    schema = client.get(f"/sessions/{session}/schema").json()
    stats = client.get(f"/sessions/{session}/stats/Person").json()
    cooccurrence = client.get(f"/sessions/{session}/stats/Person/cooccurrence").json()
    validation_before = client.get(f"/sessions/{session}/validation").json()
    conjuncts = schema["ast"]["shapes"]["Person"]["conjuncts"]
    name_index = next(
        i for i, c in enumerate(conjuncts) if c.get("predicate") == FOAF + "name"
    )
    edit = client.post(
        f"/sessions/{session}/edits",
        json={
            "kind": "set-cardinality",
            "label": "Person",
            "steps": [["conjunct", name_index]],
            "cardinality": "{1;1}",
        },
    ).json()
    validation_after = client.get(f"/sessions/{session}/validation").json()
    schema_after = client.get(f"/sessions/{session}/schema").json()
    recording = {
        "schema": schema,
        "stats": stats,
        "cooccurrence": cooccurrence,
        "validation_before": validation_before,
        "edit": edit,
        "schema_after": schema_after,
        "validation_after": validation_after,
    }
    OUT.write_text(json.dumps(recording, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
