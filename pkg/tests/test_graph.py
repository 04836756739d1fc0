"""Graph model and Turtle/N-Triples ingestion."""

from __future__ import annotations

import pytest

from shapekit.terms import Blank, Iri, Literal, XSD_INTEGER, xsd
from shapekit.turtle import (
    PrefixRedefinedWarning,
    RdfSyntaxError,
    parse_graph,
    serialize_ntriples,
    serialize_turtle,
)

from .conftest import BIO, BNF, EX, FOAF, OWL, RDGR2, SCHEMA, WD


def term(iri: str) -> Iri:
    return Iri(iri)


RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


class TestParsing:
    def test_people_fixture_statement_count(self, people_graph):
        # 5 statements for each person plus 2 for the date entity.
        assert len(people_graph) == 12

    def test_empty_input(self):
        g = parse_graph("")
        assert len(g) == 0

    def test_duplicate_triples_collapse(self):
        g = parse_graph("<http://e/s> <http://e/p> <http://e/o> . <http://e/s> <http://e/p> <http://e/o> .")
        assert len(g) == 1

    def test_plain_literal_gets_string_datatype(self, people_graph):
        objs = people_graph.objects(term(EX + "virginia"), FOAF + "name")
        assert objs == (Literal("Virginia", datatype=xsd("string")),)

    def test_language_literal_gets_langstring(self):
        g = parse_graph('<http://e/s> <http://e/p> "hola"@es .')
        lit = g.triples[0].object
        assert lit.language == "es"
        assert lit.datatype == "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"

    def test_bare_integer_is_xsd_integer(self, people_graph):
        objs = people_graph.objects(term(BNF + "1564"), "http://www.w3.org/2000/01/rdf-schema#label")
        assert objs == (Literal("1564", datatype=XSD_INTEGER),)

    def test_syntax_error_carries_position(self):
        with pytest.raises(RdfSyntaxError) as err:
            parse_graph("<http://e/s> <http://e/p>\n; .")
        assert err.value.line == 2
        assert err.value.column == 1

    def test_undeclared_prefix(self):
        with pytest.raises(RdfSyntaxError, match="undeclared prefix"):
            parse_graph("ex:a ex:b ex:c .")

    def test_prefix_redefinition_warns_last_wins(self):
        text = (
            "@prefix ex: <http://one/> .\n"
            "@prefix ex: <http://two/> .\n"
            "ex:s ex:p ex:o .\n"
        )
        with pytest.warns(PrefixRedefinedWarning):
            g = parse_graph(text)
        assert g.triples[0].subject == term("http://two/s")

    def test_ntriples_rejects_turtle_shorthands(self):
        with pytest.raises(RdfSyntaxError, match="'a' keyword"):
            parse_graph("<http://e/s> a <http://e/C> .", format="ntriples")
        with pytest.raises(RdfSyntaxError, match="prefix directives"):
            parse_graph("@prefix ex: <http://e/> .", format="ntriples")

    def test_blank_node_labels(self):
        g = parse_graph("_:a <http://e/p> _:b .", format="ntriples")
        assert g.triples[0].subject == Blank("a")
        assert g.triples[0].object == Blank("b")


class TestRoundTrip:
    NT = (
        '_:item <http://e/note> "caf\\u00e9"@fr .\n'
        '<http://e/s> <http://e/p> "12"^^<http://www.w3.org/2001/XMLSchema#int> .\n'
        "<http://e/s> <http://e/q> <http://e/o> .\n"
    )

    def test_ntriples_round_trip(self):
        g = parse_graph(self.NT, format="ntriples")
        assert len(g) == 3
        again = parse_graph(serialize_ntriples(g), format="ntriples")
        assert set(again.triples) == set(g.triples)

    def test_turtle_round_trip(self, people_graph):
        again = parse_graph(serialize_turtle(people_graph))
        assert set(again.triples) == set(people_graph.triples)

    def test_ntriples_round_trip_of_fixture(self, people_graph):
        again = parse_graph(serialize_ntriples(people_graph), format="ntriples")
        assert set(again.triples) == set(people_graph.triples)

    def test_random_graph_round_trips_in_both_formats(self):
        import random

        from .randgen import random_graph

        rng = random.Random(99)
        for _ in range(25):
            g = random_graph(rng, max_nodes=15, max_predicates=6)
            assert set(parse_graph(serialize_turtle(g)).triples) == set(g.triples)
            assert set(parse_graph(serialize_ntriples(g), format="ntriples").triples) == set(
                g.triples
            )


class TestAccessors:
    def test_neighbourhood_of_virginia(self, people_graph):
        triples = people_graph.neighbourhood(term(EX + "virginia"))
        assert len(triples) == 5
        assert all(t.subject == term(EX + "virginia") for t in triples)

    def test_neighbourhood_of_object_only_node(self, people_graph):
        assert people_graph.neighbourhood(term(WD + "Q692")) == []

    def test_neighbourhood_of_date_entity(self, people_graph):
        triples = people_graph.neighbourhood(term(BNF + "1564"))
        assert [t.predicate for t in triples] == [
            RDF_TYPE,
            "http://www.w3.org/2000/01/rdf-schema#label",
        ]

    def test_props_of_both_people(self, people_graph):
        props = people_graph.props([term(EX + "virginia"), term(EX + "william")])
        assert props == {
            RDF_TYPE,
            FOAF + "name",
            FOAF + "familyName",
            BIO + "birth",
            RDGR2 + "placeOfBirth",
            OWL + "sameAs",
            SCHEMA + "name",
            RDGR2 + "dateOfBirth",
        }

    def test_props_empty(self, people_graph):
        assert people_graph.props([]) == set()

    def test_props_union_property(self, people_graph):
        a = {term(EX + "virginia")}
        b = {term(BNF + "1564")}
        assert people_graph.props(a | b) == people_graph.props(a) | people_graph.props(b)

    def test_p_neighbours_single(self, people_graph):
        out = people_graph.p_neighbours([term(EX + "william")], BIO + "birth")
        assert out == [Literal("1564", datatype=xsd("gYear"))]

    def test_p_neighbours_absent_predicate(self, people_graph):
        assert people_graph.p_neighbours([term(EX + "virginia")], OWL + "sameAs") == []

    def test_p_neighbours_multiset(self, people_graph):
        out = people_graph.p_neighbours(
            [term(EX + "virginia"), term(EX + "william")], RDF_TYPE
        )
        assert out == [term(FOAF + "Person"), term(FOAF + "Person")]

    def test_neighbourhood_subset_of_triples(self, people_graph):
        for node in people_graph.subjects():
            nb = people_graph.neighbourhood(node)
            assert set(nb) <= set(people_graph.triples)
            expected = [t for t in people_graph.triples if t.subject == node]
            assert len(nb) == len(expected)

    def test_props_of_date_entity(self, people_graph):
        assert people_graph.props([term(BNF + "1564")]) == {
            RDF_TYPE,
            "http://www.w3.org/2000/01/rdf-schema#label",
        }

    def test_class_members(self, people_graph):
        members = people_graph.class_members(FOAF + "Person")
        assert members == [term(EX + "virginia"), term(EX + "william")]
