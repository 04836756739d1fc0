from __future__ import annotations

from pathlib import Path

import pytest

from shapekit.lattice import ValueLattice
from shapekit.scl_text import parse_scl
from shapekit.turtle import load_graph

FIXTURES = Path(__file__).parent / "fixtures"

EX = "http://example.org/"
FOAF = "http://xmlns.com/foaf/0.1/"
OWL = "http://www.w3.org/2002/07/owl#"
SCHEMA = "http://schema.org/"
BIO = "http://purl.org/vocab/bio/0.1/"
RDGR2 = "http://rdvocab.info/ElementsGr2/"
WD = "http://www.wikidata.org/entity/"
BNF = "http://data.bnf.fr/ark:/12148/cb"
TIME = "http://www.w3.org/2006/time#"


@pytest.fixture(scope="session")
def people_graph():
    return load_graph(str(FIXTURES / "people.ttl"))


@pytest.fixture(scope="session")
def person_schema():
    return parse_scl((FIXTURES / "person_schema.scl").read_text())


@pytest.fixture()
def people_lattice(people_graph):
    return ValueLattice(people_graph.prefixes.prefixes.values())


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion."""
    rows: list[tuple[str, str]] = []
    for status, flag in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::" in nodeid and getattr(report, "when", "call") == "call":
                rows.append((nodeid.split("::")[-1], flag))
    if not rows:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, flag in sorted(rows):
        terminalreporter.write_line(f"{flag}  {name}")
