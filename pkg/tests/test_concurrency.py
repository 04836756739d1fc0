"""Concurrent-read safety and per-session write serialization."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from fastapi.testclient import TestClient

from shapekit.infer import msc
from shapekit.lattice import ValueLattice
from shapekit.model import Schema
from shapekit.service import create_app
from shapekit.terms import Iri
from shapekit.validate import validate

from .conftest import EX, FIXTURES, FOAF

GRAPH_PATH = str(FIXTURES / "people.ttl")


def test_parallel_validation_of_shared_graph(people_graph, people_lattice):
    # The graph, schema and lattice are immutable; concurrent target
    # validation must agree with the sequential result.
    sample = [Iri(EX + "virginia"), Iri(EX + "william")]
    schema = Schema({"S": msc(people_graph, sample, people_lattice).to_shape_constraint()})
    expected = validate(people_graph, schema, {"S": sample}).to_dict()

    def work(_: int):
        return validate(people_graph, schema, {"S": sample}).to_dict()

    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(work, range(32)))
    assert all(result == expected for result in results)


def test_parallel_inference_is_pure(people_graph):
    lattice = ValueLattice(people_graph.prefixes.prefixes.values())
    sample = [Iri(EX + "virginia"), Iri(EX + "william")]
    expected = msc(people_graph, sample, lattice)

    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(lambda _: msc(people_graph, sample, lattice), range(32)))
    assert all(result == expected for result in results)


def test_session_edits_are_serialized():
    client = TestClient(create_app())
    session = client.post("/sessions", json={"graph_path": GRAPH_PATH}).json()["session_id"]
    client.post(
        f"/sessions/{session}/infer",
        json={"label": "Person", "target": {"selector": "class", "iri": FOAF + "Person"}},
    )

    def add(i: int) -> int:
        return client.post(
            f"/sessions/{session}/edits",
            json={
                "kind": "add-conjunct",
                "label": "Person",
                "steps": [],
                "conjunct": f"<http://edit.example/p{i}> lit {{0;1}}",
            },
        ).status_code

    with ThreadPoolExecutor(max_workers=8) as pool:
        codes = list(pool.map(add, range(24)))
    assert codes == [200] * 24
    schema = client.get(f"/sessions/{session}/schema").json()
    # One infer op plus 24 serialized edits, all present in the schema.
    assert schema["edit_count"] == 25
    conjuncts = schema["ast"]["shapes"]["Person"]["conjuncts"]
    added = [c for c in conjuncts if c.get("predicate", "").startswith("http://edit.example/")]
    assert len(added) == 24
