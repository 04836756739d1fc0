"""Pattern parsing, matching, and pattern-driven schema construction."""

from __future__ import annotations

import pytest

from shapekit.infer import InferenceConfig, build_from_pattern, msc, pattern_from_ontology
from shapekit.lattice import ValueLattice
from shapekit.model import (
    CARD_01,
    CARD_11,
    CARD_1N,
    ShapeRef,
    ValueSet,
    XsdType,
)
from shapekit.pattern import (
    ExactPred,
    IRI_FILTER,
    LabelRef,
    LIST_HOLE,
    PatternError,
    PrefixFilter,
    VALUE_HOLE,
    VarRef,
    match,
    parse_pattern,
    pattern_props,
    print_pattern,
)
from shapekit.targets import TargetSpec
from shapekit.terms import Iri, xsd
from shapekit.turtle import RdfSyntaxError, load_graph
from shapekit.validate import validate

from .conftest import FIXTURES

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
WDE = "http://wd.example/entity/"
WDT = "http://wd.example/direct/"
P = "http://wd.example/statement-of/"
PS = "http://wd.example/statement-value/"
PQ = "http://wd.example/qualifier/"
PROV = "http://www.w3.org/ns/prov#"
WIKIBASE = "http://wikiba.se/ontology#"
EDU = "http://edu.example/"


@pytest.fixture(scope="module")
def city_graph():
    return load_graph(str(FIXTURES / "mini_city.ttl"))


@pytest.fixture(scope="module")
def city_pattern():
    return parse_pattern((FIXTURES / "city_pattern.sclp").read_text())


@pytest.fixture(scope="module")
def city_lattice(city_graph):
    return ValueLattice(city_graph.prefixes.prefixes.values())


class TestParsePattern:
    def test_city_pattern_structure(self, city_pattern):
        assert set(city_pattern.labels) == {"City"}
        assert set(city_pattern.variables) == {"Y"}
        entries = city_pattern.labels["City"].entries
        assert entries[0].holder == ExactPred(RDF_TYPE)
        assert entries[0].object == LIST_HOLE
        assert entries[1].holder == PrefixFilter(P)
        assert entries[1].object == VarRef("Y")
        assert entries[2].holder == IRI_FILTER
        assert entries[2].object == VALUE_HOLE

    def test_minimal_pattern(self):
        pattern = parse_pattern("<S> { iri __ }")
        assert set(pattern.labels) == {"S"}
        assert pattern.labels["S"].entries[0].holder == IRI_FILTER

    def test_duplicate_filter_rejected(self):
        text = "PREFIX ps: <http://wd.example/statement-value/>\n<S> { ps: __ ; ps: [ __ ] }"
        with pytest.raises(RdfSyntaxError, match="duplicate predicate holder"):
            parse_pattern(text)

    def test_variable_used_twice_rejected(self):
        text = (
            "PREFIX p: <http://wd.example/statement-of/>\n"
            "PREFIX q: <http://wd.example/qualifier/>\n"
            "<S> { p: @Y ; q: @Y }\nY { iri __ }"
        )
        with pytest.raises(PatternError, match="exactly once"):
            parse_pattern(text)

    def test_unused_variable_rejected(self):
        with pytest.raises(PatternError, match="exactly once"):
            parse_pattern("<S> { iri __ }\nY { iri __ }")

    def test_undefined_variable_rejected(self):
        with pytest.raises(PatternError, match="undefined variable"):
            parse_pattern("<S> { iri @Y }")

    def test_empty_body_rejected(self):
        with pytest.raises(RdfSyntaxError, match="empty pattern body"):
            parse_pattern("<S> { }")

    def test_target_clause(self):
        pattern = parse_pattern("<S> TARGET class: <http://e/C> { iri __ }")
        assert pattern.samples["S"] == TargetSpec(selector="class", iri="http://e/C")

    def test_print_round_trip(self, city_pattern):
        text = print_pattern(city_pattern)
        again = parse_pattern(text)
        assert again.labels == city_pattern.labels
        assert again.variables == city_pattern.variables
        assert print_pattern(again) == text


class TestMatch:
    def test_statement_value_filter(self, city_pattern):
        entry = match(city_pattern.variables["Y"], PS + "P17")
        assert entry is not None and entry.holder == PrefixFilter(PS)

    def test_most_precise_filter_wins(self, city_pattern):
        entry = match(city_pattern.labels["City"], P + "P17")
        assert entry is not None and entry.holder == PrefixFilter(P)

    def test_exact_predicate_beats_filters(self, city_pattern):
        entry = match(city_pattern.labels["City"], RDF_TYPE)
        assert entry is not None and entry.holder == ExactPred(RDF_TYPE)

    def test_unmatched_predicate(self, city_pattern):
        assert match(city_pattern.variables["Y"], PROV + "wasDerivedFrom") is None

    def test_pattern_props_on_statement_nodes(self, city_pattern, city_graph):
        sample = [Iri(WDE + "Q37100-S1")]
        props = pattern_props(city_pattern.variables["Y"], sample, city_graph)
        assert props == sorted([RDF_TYPE, PS + "P17", PQ + "P580"])

    def test_pattern_props_city_catches_all(self, city_pattern, city_graph):
        sample = [Iri(WDE + "Q37100")]
        props = pattern_props(city_pattern.labels["City"], sample, city_graph)
        assert set(props) == set(city_graph.props(sample))

    def test_pattern_props_empty_pattern_sample(self, city_pattern, city_graph):
        assert pattern_props(city_pattern.variables["Y"], [], city_graph) == [RDF_TYPE]


@pytest.fixture(scope="module")
def built(city_pattern, city_graph, city_lattice):
    pattern = parse_pattern(print_pattern(city_pattern))  # fresh copy
    pattern.samples["City"] = TargetSpec(include=(Iri(WDE + "Q37100"),))
    return build_from_pattern(city_graph, pattern, city_lattice, InferenceConfig())


class TestBuildFromPattern:
    def test_created_labels(self, built):
        schema, targets, report = built
        assert list(schema.defs) == ["City", "Y_P17", "Y_P6"]

    def test_statement_shapes_pin_their_type(self, built):
        schema, _, _ = built
        for label in ("Y_P17", "Y_P6"):
            entry = [
                tc for tc in schema.defs[label].neighbourhood.conjuncts
                if tc.predicate == RDF_TYPE
            ]
            assert entry[0].object == ValueSet((Iri(WIKIBASE + "Statement"),))
            assert entry[0].card == CARD_11

    def test_provenance_dropped_and_reported(self, built):
        schema, _, report = built
        for label in ("Y_P17", "Y_P6"):
            assert all(
                tc.predicate != PROV + "wasDerivedFrom"
                for tc in schema.defs[label].neighbourhood.conjuncts
            )
        dropped = dict(report.dropped_predicates)
        assert PROV + "wasDerivedFrom" in dropped.values() or any(
            pred == PROV + "wasDerivedFrom" for _, pred in report.dropped_predicates
        )

    def test_city_references_fresh_shapes(self, built):
        schema, _, _ = built
        by_pred = {tc.predicate: tc for tc in schema.defs["City"].neighbourhood.conjuncts}
        assert by_pred[P + "P17"].object == ShapeRef("Y_P17")
        assert by_pred[P + "P6"].object == ShapeRef("Y_P6")
        assert by_pred[P + "P6"].card == CARD_1N
        assert by_pred[P + "P17"].card == CARD_11

    def test_fresh_targets_record_samples(self, built):
        _, targets, _ = built
        assert targets["Y_P6"].include == (
            Iri(WDE + "Q37100-S2"),
            Iri(WDE + "Q37100-S3"),
        )

    def test_qualifier_values_join_to_date(self, built):
        schema, _, _ = built
        by_pred = {tc.predicate: tc for tc in schema.defs["Y_P6"].neighbourhood.conjuncts}
        assert by_pred[PQ + "P580"].object == XsdType(xsd("date"))
        assert by_pred[PQ + "P580"].card == CARD_01

    def test_schema_validates_its_samples(self, built, city_graph):
        schema, targets, _ = built
        resolved = {label: spec.resolve(city_graph) for label, spec in targets.items()}
        assert validate(city_graph, schema, resolved).conforms

    def test_shrinking_sample_warning(self, city_pattern, city_graph, city_lattice):
        pattern = parse_pattern(print_pattern(city_pattern))
        pattern.samples["City"] = TargetSpec(include=(Iri(WDE + "Q37100"),))
        config = InferenceConfig(shrink_warning_threshold=5)
        _, _, report = build_from_pattern(city_graph, pattern, city_lattice, config)
        shrink = [w for w in report.warnings if w.kind == "shrinking-sample"]
        assert shrink, "expected a shrinking-sample warning"
        assert any(w.label == "Y_P17" and w.predicate == P + "P17" for w in shrink)

    def test_no_shrink_warning_when_threshold_low(self, city_pattern, city_graph, city_lattice):
        pattern = parse_pattern(print_pattern(city_pattern))
        pattern.samples["City"] = TargetSpec(include=(Iri(WDE + "Q37100"),))
        config = InferenceConfig(shrink_warning_threshold=1)
        _, _, report = build_from_pattern(city_graph, pattern, city_lattice, config)
        assert not [w for w in report.warnings if w.kind == "shrinking-sample"]

    def test_catch_all_pattern_mirrors_msc(self, people_graph, people_lattice):
        from .conftest import EX

        pattern = parse_pattern("<S> { iri __ }")
        pattern.samples["S"] = TargetSpec(
            include=(Iri(EX + "virginia"), Iri(EX + "william"))
        )
        schema, _, _ = build_from_pattern(people_graph, pattern, people_lattice)
        uniform = msc(
            people_graph, [Iri(EX + "virginia"), Iri(EX + "william")], people_lattice
        )
        assert schema.defs["S"] == uniform.to_shape_constraint()

    def test_label_without_sample_rejected(self, city_pattern, city_graph, city_lattice):
        pattern = parse_pattern(print_pattern(city_pattern))
        pattern.samples.clear()
        with pytest.raises(Exception, match="no sample"):
            build_from_pattern(city_graph, pattern, city_lattice)


@pytest.fixture(scope="module")
def ontology():
    return load_graph(str(FIXTURES / "teaching_ontology.ttl"))


class TestOntologyExtraction:
    def test_three_shapes(self, ontology):
        pattern = pattern_from_ontology(ontology)
        assert set(pattern.labels) == {"Human", "Teacher", "Subject"}
        assert pattern.samples["Human"] == TargetSpec(selector="class", iri=EDU + "Human")

    def test_entries(self, ontology):
        pattern = pattern_from_ontology(ontology)
        human = pattern.labels["Human"].entries
        assert len(human) == 1
        assert human[0].holder == ExactPred(EDU + "name")
        assert human[0].object == VALUE_HOLE  # :name has no range axiom
        teacher = pattern.labels["Teacher"].entries
        assert teacher[0].holder == ExactPred(EDU + "teaches")
        assert teacher[0].object == LabelRef("Subject")
        subject = pattern.labels["Subject"].entries
        assert subject[0].holder == ExactPred(EDU + "description")
        assert subject[0].object == VALUE_HOLE

    def test_empty_ontology(self):
        from shapekit.graph import RdfGraph

        pattern = pattern_from_ontology(RdfGraph())
        assert not pattern.labels

    def test_inheritance_flag(self, ontology):
        pattern = pattern_from_ontology(ontology, inherit=True)
        teacher_preds = {e.holder.predicate for e in pattern.labels["Teacher"].entries}
        assert teacher_preds == {EDU + "teaches", EDU + "name"}

    def test_instance_run_references_subject(self, ontology):
        instances = load_graph(str(FIXTURES / "teaching_instances.ttl"))
        pattern = pattern_from_ontology(ontology)
        lattice = ValueLattice(instances.prefixes.prefixes.values())
        schema, targets, _ = build_from_pattern(instances, pattern, lattice)
        teacher = {tc.predicate: tc for tc in schema.defs["Teacher"].neighbourhood.conjuncts}
        assert teacher[EDU + "teaches"].object == ShapeRef("Subject")
        assert teacher[EDU + "teaches"].card == CARD_11
        resolved = {label: spec.resolve(instances) for label, spec in targets.items()}
        assert validate(instances, schema, resolved).conforms
