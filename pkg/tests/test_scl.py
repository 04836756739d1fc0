"""SCL AST, compact-syntax parser and printer, uniform projection."""

from __future__ import annotations

import pytest

from shapekit.model import (
    ANY,
    CARD_01,
    CARD_11,
    CARD_0N,
    Cardinality,
    Choice,
    IRI,
    IriPrefix,
    NeighbourhoodConstraint,
    NotUniform,
    Schema,
    SchemaError,
    ShapeConstraint,
    ShapeRef,
    TripleConstraint,
    UniformConstraint,
    UniformEntry,
    ValueSet,
    XsdType,
    as_uniform,
)
from shapekit.scl_text import parse_scl, print_scl
from shapekit.terms import Iri, xsd
from shapekit.turtle import RdfSyntaxError

from .conftest import BIO, FOAF


class TestParse:
    def test_person_schema_structure(self, person_schema):
        assert set(person_schema.labels) == {"Person", "Date"}
        person = person_schema.defs["Person"]
        conjuncts = person.neighbourhood.conjuncts
        singles = [c for c in conjuncts if isinstance(c, TripleConstraint)]
        choices = [c for c in conjuncts if isinstance(c, Choice)]
        assert len(singles) == 4
        assert len(choices) == 1
        assert len(choices[0].branches) == 2

    def test_choice_branches(self, person_schema):
        choice = person_schema.defs["Person"].neighbourhood.conjuncts[-1]
        assert choice.branches[0].predicate == BIO + "birth"
        assert choice.branches[0].object == XsdType(xsd("gYear"))
        assert choice.branches[1].object == ShapeRef("Date")

    def test_empty_constraint(self):
        schema = parse_scl("<L> { }")
        assert schema.defs["L"] == ShapeConstraint((), NeighbourhoodConstraint(()))

    def test_uppercase_iri_keyword(self):
        schema = parse_scl("<L> { <http://e/p> IRI {0;*} }")
        tc = schema.defs["L"].neighbourhood.conjuncts[0]
        assert tc.object == IRI

    def test_prefix_value_constraint(self):
        schema = parse_scl(
            "PREFIX wd: <http://www.wikidata.org/entity/>\n<L> { <http://e/p> wd: {1;1} }"
        )
        tc = schema.defs["L"].neighbourhood.conjuncts[0]
        assert tc.object == IriPrefix("http://www.wikidata.org/entity/")

    def test_unresolved_reference_rejected(self):
        with pytest.raises(SchemaError, match="undefined shape"):
            parse_scl("<L> { <http://e/p> @<Missing> {1;1} }")

    def test_cyclic_reference_rejected(self):
        text = (
            "<A> { <http://e/p> @<B> {1;1} }\n"
            "<B> { <http://e/q> @<A> {1;1} }\n"
        )
        with pytest.raises(SchemaError, match="recursive"):
            parse_scl(text)

    def test_value_part_and_nested(self):
        text = (
            "<L> iri AND <http://e/ns/>~ {\n"
            "  <http://e/p> { <http://e/q> lit {1;1} } {0;1}\n"
            "}"
        )
        schema = parse_scl(text)
        constraint = schema.defs["L"]
        assert constraint.values == (IRI, IriPrefix("http://e/ns/"))
        nested = constraint.neighbourhood.conjuncts[0].object
        assert isinstance(nested, NeighbourhoodConstraint)
        assert nested.conjuncts[0].predicate == "http://e/q"

    def test_missing_object_constraint(self):
        with pytest.raises(RdfSyntaxError, match="missing object"):
            parse_scl("<L> { <http://e/p> {1;1} }")

    def test_duplicate_predicate_in_choice_rejected(self):
        with pytest.raises((SchemaError, RdfSyntaxError), match="at most once"):
            parse_scl("<L> { ( <http://e/p> lit {1;1} | <http://e/p> iri {1;1} ) }")

    def test_duplicate_label_rejected(self):
        with pytest.raises(RdfSyntaxError, match="defined twice"):
            parse_scl("<L> { }\n<L> { }")

    def test_choice_and_sibling_single_sharing_predicate_rejected(self):
        text = (
            "<L> {\n"
            "  <http://e/p> lit {1;1} ;\n"
            "  ( <http://e/p> iri {1;1} | <http://e/q> iri {1;1} )\n"
            "}"
        )
        with pytest.raises(SchemaError, match="both inside a choice"):
            parse_scl(text)


class TestPrint:
    def test_choice_line(self, person_schema):
        text = print_scl(person_schema)
        assert "( bio:birth xsd:gYear {1;1} | rdgr2:dateOfBirth @<Date> {1;1} )" in text

    def test_empty_schema_prints_empty(self):
        assert print_scl(Schema()) == ""

    def test_round_trip_preserves_structure(self, person_schema):
        reparsed = parse_scl(print_scl(person_schema))
        assert reparsed.defs == person_schema.defs

    def test_print_is_idempotent(self, person_schema):
        once = print_scl(person_schema)
        assert print_scl(parse_scl(once)) == once

    def test_five_shape_fixture_round_trip(self):
        text = (
            "PREFIX ex: <http://e/>\n"
            "<A> { ex:p [ex:v1, \"x\"^^ex:dt] {1;1} }\n"
            "<B> { ( ex:p lit {0;1} | ex:q @<A> {1;1} ) ; ex:r blank {1;*} }\n"
            "<C> nonlit { }\n"
            "<D> { ex:s { ex:t any {0;*} } {2;4} }\n"
            "<E> { ex:u ex: {1;1} ; ex:v \"plain\" {0;1} }\n"
        )
        # A value set with a plain string literal member exercises term printing.
        schema = parse_scl(text.replace('ex:v \"plain\" {0;1}', 'ex:v ["plain"] {0;1}'))
        reparsed = parse_scl(print_scl(schema))
        assert reparsed.defs == schema.defs
        assert print_scl(reparsed) == print_scl(schema)


class TestUniform:
    def test_projection_round_trip(self):
        uniform = UniformConstraint(
            (
                UniformEntry("http://e/p", XsdType(xsd("string")), CARD_01),
                UniformEntry("http://e/q", ValueSet((Iri("http://e/v"),)), CARD_11),
            )
        )
        assert as_uniform(uniform.to_shape_constraint()) == uniform

    def test_person_is_not_uniform(self, person_schema):
        with pytest.raises(NotUniform, match="choice"):
            as_uniform(person_schema.defs["Person"])

    def test_repeated_property_rejected(self):
        constraint = ShapeConstraint(
            (),
            NeighbourhoodConstraint(
                (
                    TripleConstraint(FOAF + "name", XsdType(xsd("string")), CARD_11),
                    TripleConstraint(FOAF + "name", ANY, CARD_0N),
                )
            ),
        )
        with pytest.raises(NotUniform, match="repeated"):
            as_uniform(constraint)

    def test_non_uniform_cardinality_rejected(self):
        constraint = ShapeConstraint(
            (),
            NeighbourhoodConstraint(
                (TripleConstraint("http://e/p", ANY, Cardinality(2, 4)),)
            ),
        )
        with pytest.raises(NotUniform, match="not a uniform cardinality"):
            as_uniform(constraint)

    def test_value_part_rejected(self):
        with pytest.raises(NotUniform, match="value part"):
            as_uniform(ShapeConstraint((IRI,), NeighbourhoodConstraint(())))

    def test_reference_order_person_schema(self, person_schema):
        order = person_schema.reference_order()
        assert order.index("Date") < order.index("Person")
