"""Most specific and consensus uniform constraint construction."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from shapekit.graph import RdfGraph
from shapekit.infer import InferenceConfig, InferenceError, lac, msc
from shapekit.lattice import ValueLattice
from shapekit.model import (
    ANY,
    CARD_01,
    CARD_0N,
    CARD_11,
    CARD_1N,
    IRI,
    IriPrefix,
    NONLIT,
    Schema,
    UniformConstraint,
    ValueSet,
    XsdType,
)
from shapekit.terms import Blank, Iri, Literal, PrefixMap, Triple, xsd
from shapekit.validate import validate
from .conftest import BIO, BNF, EX, FOAF, OWL, RDGR2, SCHEMA, TIME, WD
from .randgen import generator_namespaces, random_graph, random_sample

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"

ORG = "http://ex.org/"
COM = "http://ex.com/"
VAL_P = "http://vote.example/p"
CARD_Q = "http://vote.example/q"


class TestMsc:
    def test_people_sample(self, people_graph, people_lattice):
        sample = [Iri(EX + "virginia"), Iri(EX + "william")]
        constraint = msc(people_graph, sample, people_lattice)
        expect = {
            RDF_TYPE: (ValueSet((Iri(FOAF + "Person"),)), CARD_11),
            FOAF + "name": (XsdType(xsd("string")), CARD_01),
            FOAF + "familyName": (XsdType(xsd("string")), CARD_01),
            BIO + "birth": (XsdType(xsd("gYear")), CARD_11),
            OWL + "sameAs": (ValueSet((Iri(WD + "Q692"),)), CARD_01),
            SCHEMA + "name": (XsdType(xsd("string")), CARD_01),
            RDGR2 + "dateOfBirth": (ValueSet((Iri(BNF + "1564"),)), CARD_01),
            RDGR2 + "placeOfBirth": (XsdType(xsd("string")), CARD_01),
        }
        assert set(constraint.predicates()) == set(expect)
        for predicate, (value, card) in expect.items():
            entry = constraint.entry(predicate)
            assert entry.value == value, predicate
            assert entry.card == card, predicate

    def test_empty_sample(self, people_graph, people_lattice):
        assert msc(people_graph, [], people_lattice) == UniformConstraint(())

    def test_date_entity_sample(self, people_graph, people_lattice):
        constraint = msc(people_graph, [Iri(BNF + "1564")], people_lattice)
        assert constraint.entry(RDF_TYPE).value == ValueSet((Iri(TIME + "Instant"),))
        assert constraint.entry(RDF_TYPE).card == CARD_11
        # The bare 1564 in the data is an xsd:integer literal.
        assert constraint.entry(RDFS_LABEL).value == XsdType(xsd("integer"))
        assert constraint.entry(RDFS_LABEL).card == CARD_11

    def test_output_is_uniform(self, people_graph, people_lattice):
        from shapekit.model import as_uniform

        sample = [Iri(EX + "virginia"), Iri(EX + "william")]
        constraint = msc(people_graph, sample, people_lattice)
        assert as_uniform(constraint.to_shape_constraint()) == constraint

    def test_all_blank_neighbours(self, people_lattice):
        g = RdfGraph([Triple(Iri("http://e/n"), "http://e/p", Blank("b"))])
        constraint = msc(g, [Iri("http://e/n")], people_lattice)
        assert constraint.entry("http://e/p").value.name == "blank"


def consensus_fixture() -> tuple[RdfGraph, list[Iri]]:
    """20 sample nodes engineered to cast the worked-example vote tallies.

    For the value predicate: 2 nodes prefer `lit`, 1 prefers `blank`,
    2 prefer `iri`, 10 the ex.org namespace and 5 the ex.com namespace.
    For the cardinality predicate: 2 nodes have no occurrence, 16 exactly
    one, 2 more than one.
    """
    triples: list[Triple] = []
    nodes = [Iri(f"http://vote.example/n{i:02d}") for i in range(1, 21)]

    def p(i: int, obj) -> None:
        triples.append(Triple(nodes[i - 1], VAL_P, obj))

    for i in (1, 2):  # join of two incomparable datatypes -> lit
        p(i, Literal(f"s{i}"))
        p(i, Literal(str(i), datatype=xsd("integer")))
    p(3, Blank("b3"))  # blank
    for i in (4, 5):  # two namespaces without a configured common prefix -> iri
        p(i, Iri(f"http://one.example/x{i}"))
        p(i, Iri(f"http://two.example/y{i}"))
    for i in range(6, 16):  # ex.org namespace
        p(i, Iri(f"{ORG}a{i}"))
        p(i, Iri(f"{ORG}b{i}"))
    for i in range(16, 21):  # ex.com namespace
        p(i, Iri(f"{COM}a{i}"))
        p(i, Iri(f"{COM}b{i}"))

    for i, node in enumerate(nodes, start=1):
        count = 0 if i <= 2 else (2 if i >= 19 else 1)
        for k in range(count):
            triples.append(Triple(node, CARD_Q, Literal(f"v{i}-{k}")))
    return RdfGraph(triples, PrefixMap({"org": ORG, "com": COM})), nodes


@pytest.fixture(scope="module")
def fixture():
    return consensus_fixture()


@pytest.fixture(scope="module")
def lattice():
    return ValueLattice([ORG, COM])


class TestLac:

    def test_value_votes_reproduce_worked_example(self, fixture, lattice):
        g, nodes = fixture
        for error, expected in [
            (Fraction(3, 20), IRI),
            (Fraction(2, 20), NONLIT),
            (Fraction(1, 20), ANY),
        ]:
            constraint = lac(g, nodes, lattice, InferenceConfig(error_rate=error))
            assert constraint.entry(VAL_P).value == expected, error

    def test_cardinality_votes_reproduce_worked_example(self, fixture, lattice):
        g, nodes = fixture
        constraint = lac(g, nodes, lattice, InferenceConfig(error_rate=Fraction(3, 20)))
        assert constraint.entry(CARD_Q).card == CARD_0N

    def test_zero_error_rate_equals_msc(self, fixture, lattice):
        g, nodes = fixture
        assert lac(g, nodes, lattice, InferenceConfig()) == msc(g, nodes, lattice)

    def test_lac0_equals_msc_on_random_graphs(self):
        rng = random.Random(11)
        lattice = ValueLattice(generator_namespaces())
        config = InferenceConfig()
        for _ in range(40):
            g = random_graph(rng, max_nodes=14, max_predicates=5)
            sample = random_sample(rng, g)
            assert lac(g, sample, lattice, config) == msc(g, sample, lattice)

    def test_noise_recovery(self):
        # 28 clean namespace values, 2 flipped to literals; an error rate
        # covering the flips recovers the clean value constraint.
        ns = "http://clean.example/"
        clean: list[Triple] = []
        for i in range(30):
            clean.append(Triple(Iri(f"http://s.example/n{i}"), VAL_P, Iri(f"{ns}v{i}")))
        nodes = [Iri(f"http://s.example/n{i}") for i in range(30)]
        lattice = ValueLattice([ns])
        clean_value = msc(RdfGraph(clean), nodes, lattice).entry(VAL_P).value
        assert clean_value == IriPrefix(ns)

        noisy = [
            t if int(t.subject.value.rsplit("n", 1)[1]) >= 2 else
            Triple(t.subject, VAL_P, Literal("oops"))
            for t in clean
        ]
        g_noisy = RdfGraph(noisy)
        noisy_msc = msc(g_noisy, nodes, lattice).entry(VAL_P).value
        assert noisy_msc == ANY
        recovered = lac(g_noisy, nodes, lattice, InferenceConfig(error_rate=Fraction(1, 10)))
        assert recovered.entry(VAL_P).value == clean_value

    def test_growing_error_rate_descends_the_value_order(self, fixture, lattice):
        g, nodes = fixture
        results = [
            lac(g, nodes, lattice, InferenceConfig(error_rate=Fraction(e, 20)))
            .entry(VAL_P).value
            for e in (1, 2, 3)
        ]
        assert results == [ANY, NONLIT, IRI]
        for higher, lower in zip(results, results[1:]):
            assert lattice.leq(lower, higher)

    def test_error_rate_bounds(self):
        with pytest.raises(InferenceError):
            InferenceConfig(error_rate=Fraction(1, 2))
        with pytest.raises(InferenceError):
            InferenceConfig(error_rate=Fraction(-1, 10))


class TestMinimality:
    def test_msc_is_minimal_over_carrier(self):
        from shapekit.validate import satisfies_value
        from .randgen import NS_A, NS_B

        rng = random.Random(13)
        # Only the two object namespaces: the carrier below must contain every
        # constraint reachable from the configured universe.
        lattice = ValueLattice([NS_A, NS_B])
        from shapekit.model import BLANK, LIT
        from .randgen import IRI_OBJECTS

        test_carrier = [
            ANY, LIT, NONLIT, BLANK, IRI,
            XsdType(xsd("string")), XsdType(xsd("integer")),
            IriPrefix(NS_A), IriPrefix(NS_B),
            *(ValueSet((o,)) for o in IRI_OBJECTS),
        ]
        assert len(test_carrier) <= 12
        for _ in range(30):
            g = random_graph(rng, max_nodes=10, max_predicates=4)
            sample = random_sample(rng, g)
            constraint = msc(g, sample, lattice)
            for entry in constraint.entries:
                neighbours = g.p_neighbour_set(sample, entry.predicate)
                satisfied = [
                    v for v in test_carrier
                    if all(satisfies_value(n, v) for n in neighbours)
                ]
                assert entry.value in satisfied
                for candidate in satisfied:
                    # Nothing satisfied by every neighbour sits strictly below.
                    assert not (
                        candidate != entry.value and lattice.leq(candidate, entry.value)
                    ), (entry.predicate, candidate, entry.value)

    def test_msc_schema_validates_sample(self):
        rng = random.Random(17)
        lattice = ValueLattice(generator_namespaces())
        for _ in range(50):
            g = random_graph(rng, max_nodes=20, max_predicates=6)
            sample = random_sample(rng, g)
            schema = Schema({"S": msc(g, sample, lattice).to_shape_constraint()})
            assert validate(g, schema, {"S": sample}).conforms
