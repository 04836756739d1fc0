"""Predicate statistics and co-occurrence counts."""

from __future__ import annotations

from fractions import Fraction

import pytest

from shapekit.lattice import ValueLattice
from shapekit.model import ANY, IRI, NONLIT, IriPrefix
from shapekit.stats import all_predicate_stats, cooccurrence, predicate_stats, value_text
from shapekit.terms import Iri

from .conftest import BIO, EX, FOAF, RDGR2, SCHEMA
from .test_infer import consensus_fixture, ORG, COM, VAL_P


@pytest.fixture(scope="module")
def sample():
    return [Iri(EX + "virginia"), Iri(EX + "william")]


class TestPredicateStats:
    def test_name_occurrences(self, people_graph, people_lattice, sample):
        stats = predicate_stats(people_graph, sample, FOAF + "name", people_lattice)
        assert stats.nodes_with_predicate == 1
        assert stats.min_occurs == 0
        assert stats.max_occurs == 1
        assert stats.mean_occurs == Fraction(1, 2)

    def test_absent_predicate(self, people_graph, people_lattice):
        stats = predicate_stats(
            people_graph, [Iri(EX + "virginia")], SCHEMA + "name", people_lattice
        )
        assert stats.nodes_with_predicate == 0
        assert stats.min_occurs == stats.max_occurs == 0
        assert stats.mean_occurs == 0
        assert stats.annotations == []

    def test_mean_is_exact_rational(self, people_graph, people_lattice, sample):
        stats = predicate_stats(people_graph, sample, FOAF + "name", people_lattice)
        assert str(stats.mean_occurs) == "1/2"
        assert stats.to_dict()["mean_occurs_decimal"] == 0.5

    def test_annotated_lattice_from_engineered_votes(self):
        g, nodes = consensus_fixture()
        lattice = ValueLattice([ORG, COM])
        stats = predicate_stats(g, nodes, VAL_P, lattice)
        by_option = {a.option: a for a in stats.annotations}
        assert (by_option[IRI].direct, by_option[IRI].accumulated) == (2, 17)
        assert (by_option[NONLIT].direct, by_option[NONLIT].accumulated) == (0, 18)
        assert (by_option[ANY].direct, by_option[ANY].accumulated) == (0, 20)
        assert (by_option[IriPrefix(ORG)].direct, by_option[IriPrefix(ORG)].accumulated) == (10, 10)

    def test_accumulated_monotone_along_edges(self):
        g, nodes = consensus_fixture()
        lattice = ValueLattice([ORG, COM])
        stats = predicate_stats(g, nodes, VAL_P, lattice)
        acc = {value_text(a.option): a.accumulated for a in stats.annotations}
        for child, parent in stats.edges:
            assert acc[child] <= acc[parent]

    def test_all_predicate_stats_cover_props(self, people_graph, people_lattice, sample):
        rows = all_predicate_stats(people_graph, sample, people_lattice)
        assert [r.predicate for r in rows] == sorted(people_graph.props(sample))


class TestCooccurrence:
    def test_birth_and_date_of_birth(self, people_graph, sample):
        matrix = cooccurrence(people_graph, sample)
        assert matrix.get(BIO + "birth", RDGR2 + "dateOfBirth") == 1

    def test_choice_signal_zero_overlap(self, people_graph, sample):
        matrix = cooccurrence(people_graph, sample)
        assert matrix.get(FOAF + "name", SCHEMA + "name") == 0

    def test_diagonal_equals_carrier_count(self, people_graph, people_lattice, sample):
        matrix = cooccurrence(people_graph, sample)
        for p in matrix.predicates:
            stats = predicate_stats(people_graph, sample, p, people_lattice)
            assert matrix.get(p, p) == stats.nodes_with_predicate

    def test_symmetry_and_bounds(self, people_graph, sample):
        matrix = cooccurrence(people_graph, sample)
        for p in matrix.predicates:
            for q in matrix.predicates:
                assert matrix.get(p, q) == matrix.get(q, p)
                assert matrix.get(p, q) <= len(sample)

    def test_single_node_sample(self, people_graph):
        matrix = cooccurrence(people_graph, [Iri(EX + "virginia")])
        for p in matrix.predicates:
            for q in matrix.predicates:
                assert matrix.get(p, q) == 1
