"""Value/cardinality lattice laws, joins, and consensus voting."""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapekit.lattice import (
    ValueLattice,
    accumulate_votes,
    card_consensus,
    card_join,
    card_join_counts,
    card_leq,
)
from shapekit.model import (
    ANY,
    BLANK,
    CARD_01,
    CARD_0N,
    CARD_11,
    CARD_1N,
    IRI,
    IriPrefix,
    LIT,
    NONLIT,
    ValueSet,
    XsdType,
)
from shapekit.terms import Iri, Literal, xsd

ORG = "http://ex.org/"
COM = "http://ex.com/"
ORG_SUB = "http://ex.org/sub/"


@pytest.fixture(scope="module")
def lattice() -> ValueLattice:
    return ValueLattice([ORG, COM, ORG_SUB])


def carrier(lattice: ValueLattice) -> list:
    return [
        ANY,
        LIT,
        NONLIT,
        BLANK,
        IRI,
        XsdType(xsd("string")),
        XsdType(xsd("int")),
        XsdType(xsd("integer")),
        XsdType(xsd("decimal")),
        IriPrefix(ORG),
        IriPrefix(ORG_SUB),
        IriPrefix(COM),
        ValueSet((Iri(ORG_SUB + "x"),)),
        ValueSet((Iri(ORG + "y"),)),
        ValueSet((Iri(COM + "z"),)),
        ValueSet((Literal("5", datatype=xsd("int")),)),
        ValueSet((Literal("a", datatype=xsd("string")),)),
    ]


class TestOrder:
    def test_prefix_below_iri(self, lattice):
        assert lattice.leq(IriPrefix(ORG), IRI)

    def test_reflexive_any(self, lattice):
        assert lattice.leq(ANY, ANY)

    def test_value_below_configured_prefix(self, lattice):
        wd = "http://www.wikidata.org/entity/"
        lat = ValueLattice([wd])
        assert lat.leq(ValueSet((Iri(wd + "Q692"),)), IriPrefix(wd))

    def test_chain_pr_iri_nonlit_any(self, lattice):
        chain = [IriPrefix(ORG_SUB), IriPrefix(ORG), IRI, NONLIT, ANY]
        for i, lo in enumerate(chain):
            for hi in chain[i:]:
                assert lattice.leq(lo, hi)

    def test_xsd_numeric_chain(self, lattice):
        assert lattice.leq(XsdType(xsd("int")), XsdType(xsd("decimal")))
        assert not lattice.leq(XsdType(xsd("decimal")), XsdType(xsd("int")))

    def test_incomparable_datatypes(self, lattice):
        assert not lattice.leq(XsdType(xsd("gYear")), XsdType(xsd("string")))
        assert lattice.leq(XsdType(xsd("gYear")), LIT)

    def test_blank_below_nonlit_only(self, lattice):
        assert lattice.leq(BLANK, NONLIT)
        assert not lattice.leq(BLANK, IRI)
        assert not lattice.leq(BLANK, LIT)

    def test_partial_order_laws(self, lattice):
        elems = carrier(lattice)
        for a in elems:
            assert lattice.leq(a, a)
        for a, b in product(elems, repeat=2):
            if lattice.leq(a, b) and lattice.leq(b, a):
                assert a == b
        for a, b, c in product(elems, repeat=3):
            if lattice.leq(a, b) and lattice.leq(b, c):
                assert lattice.leq(a, c)


class TestJoin:
    def test_singleton_join(self, lattice):
        v = ValueSet((Iri("http://xmlns.com/foaf/0.1/Person"),))
        assert lattice.join([v]) == v

    def test_incomparable_datatypes_join_to_lit(self, lattice):
        assert lattice.join([XsdType(xsd("gYear")), XsdType(xsd("string"))]) == LIT

    def test_values_without_shared_namespace_join_to_iri(self, lattice):
        a = ValueSet((Iri(ORG + "a"),))
        b = ValueSet((Iri(COM + "b"),))
        # Independent check: least upper bound by exhaustive search.
        elems = carrier(lattice)
        uppers = [u for u in elems if lattice.leq(a, u) and lattice.leq(b, u)]
        least = [u for u in uppers if all(lattice.leq(u, v) for v in uppers)]
        assert least == [IRI]
        assert lattice.join([a, b]) == IRI

    def test_values_under_shared_namespace(self, lattice):
        a = ValueSet((Iri(ORG_SUB + "a"),))
        b = ValueSet((Iri(ORG_SUB + "b"),))
        assert lattice.join([a, b]) == IriPrefix(ORG_SUB)

    def test_unconfigured_namespace_falls_back_to_iri(self):
        lat = ValueLattice([])
        a = ValueSet((Iri(ORG + "a"),))
        b = ValueSet((Iri(ORG + "b"),))
        assert lat.join([a, b]) == IRI

    def test_join_laws_exhaustive(self, lattice):
        elems = carrier(lattice)
        for a in elems:
            assert lattice.join2(a, a) == a
        for a, b in product(elems, repeat=2):
            assert lattice.join2(a, b) == lattice.join2(b, a)
        for a, b, c in product(elems, repeat=3):
            assert lattice.join2(lattice.join2(a, b), c) == lattice.join2(a, lattice.join2(b, c))

    def test_join_is_least_upper_bound(self, lattice):
        elems = carrier(lattice)
        for a, b in product(elems, repeat=2):
            j = lattice.join2(a, b)
            assert lattice.leq(a, j) and lattice.leq(b, j)
            for u in elems:
                if lattice.leq(a, u) and lattice.leq(b, u):
                    assert lattice.leq(j, u)


class TestCardinality:
    def test_count_joins(self):
        assert card_join_counts([1, 1]) == CARD_11
        assert card_join_counts([0, 1]) == CARD_01
        assert card_join_counts([1, 2]) == CARD_1N
        assert card_join_counts([0, 3]) == CARD_0N

    def test_lattice_join_of_incomparable_pair(self):
        assert card_join([CARD_01, CARD_1N]) == CARD_0N

    def test_complete_lattice_bounds(self):
        for c in (CARD_0N, CARD_01, CARD_11, CARD_1N):
            assert card_leq(c, CARD_0N)
            assert card_leq(CARD_11, c)

    def test_join_laws(self):
        cards = [CARD_0N, CARD_01, CARD_11, CARD_1N]
        for a, b in product(cards, repeat=2):
            assert card_join([a, b]) == card_join([b, a])
            assert card_leq(a, card_join([a, b]))
        for a, b, c in product(cards, repeat=3):
            assert card_join([card_join([a, b]), c]) == card_join([a, card_join([b, c])])


class TestConsensus:
    VALUE_VOTES = {
        LIT: 2,
        BLANK: 1,
        IRI: 2,
        IriPrefix(ORG): 10,
        IriPrefix(COM): 5,
    }

    @pytest.mark.parametrize(
        "threshold,expected",
        [
            (Fraction(17, 20), IRI),
            (Fraction(18, 20), NONLIT),
            (Fraction(19, 20), ANY),
        ],
    )
    def test_twenty_voter_value_tally(self, lattice, threshold, expected):
        assert lattice.consensus(self.VALUE_VOTES, threshold) == expected

    def test_accumulated_votes_match_tally(self, lattice):
        acc = accumulate_votes(self.VALUE_VOTES, lattice.ancestors)
        assert acc[IriPrefix(ORG)] == (10, 10)
        assert acc[IRI] == (2, 17)
        assert acc[NONLIT] == (0, 18)
        assert acc[ANY] == (0, 20)

    def test_twenty_voter_cardinality_tally(self):
        votes = {CARD_1N: 2, CARD_01: 2, CARD_11: 16}
        assert card_consensus(votes, Fraction(17, 20)) == CARD_0N

    def test_single_unanimous_voter(self, lattice):
        assert lattice.consensus({LIT: 1}, Fraction(1)) == LIT

    def test_invalid_threshold(self, lattice):
        with pytest.raises(ValueError):
            lattice.consensus({LIT: 1}, Fraction(1, 2))
        with pytest.raises(ValueError):
            lattice.consensus({}, Fraction(1))

    def test_accvotes_monotone_along_order(self, lattice):
        acc = accumulate_votes(self.VALUE_VOTES, lattice.ancestors)
        options = list(acc)
        for a, b in product(options, repeat=2):
            if lattice.leq(a, b):
                assert acc[a][1] <= acc[b][1]


def _vote_strategy():
    lat = ValueLattice([ORG, COM, ORG_SUB])
    elems = carrier(lat)
    return st.dictionaries(
        st.sampled_from(elems), st.integers(min_value=1, max_value=9), min_size=1, max_size=6
    )


class TestCardConsensusProperties:
    CARDS = [CARD_0N, CARD_01, CARD_11, CARD_1N]

    @given(
        votes=st.dictionaries(
            st.sampled_from([CARD_0N, CARD_01, CARD_11, CARD_1N]),
            st.integers(min_value=1, max_value=9),
            min_size=1,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_threshold_one_equals_join(self, votes):
        assert card_consensus(votes, Fraction(1)) == card_join(votes)

    @given(
        votes=st.dictionaries(
            st.sampled_from([CARD_0N, CARD_01, CARD_11, CARD_1N]),
            st.integers(min_value=1, max_value=9),
            min_size=1,
        ),
        t=st.fractions(min_value=Fraction(51, 100), max_value=1),
    )
    @settings(max_examples=200, deadline=None)
    def test_result_is_acceptable(self, votes, t):
        result = card_consensus(votes, t)
        total = sum(votes.values())
        covered = sum(count for c, count in votes.items() if card_leq(c, result))
        assert Fraction(covered, total) >= t


class TestConsensusProperties:
    @given(votes=_vote_strategy())
    @settings(max_examples=200, deadline=None)
    def test_threshold_one_equals_join(self, votes):
        lat = ValueLattice([ORG, COM, ORG_SUB])
        assert lat.consensus(votes, Fraction(1)) == lat.join(votes)

    @given(
        votes=_vote_strategy(),
        t1=st.fractions(min_value=Fraction(51, 100), max_value=1),
        t2=st.fractions(min_value=Fraction(51, 100), max_value=1),
    )
    @settings(max_examples=200, deadline=None)
    def test_threshold_monotone_for_values(self, votes, t1, t2):
        # Raising the acceptance threshold can only move the result upward.
        lat = ValueLattice([ORG, COM, ORG_SUB])
        lo, hi = sorted((t1, t2))
        assert lat.leq(lat.consensus(votes, lo), lat.consensus(votes, hi))

    @given(votes=_vote_strategy(), t=st.fractions(min_value=Fraction(51, 100), max_value=1))
    @settings(max_examples=200, deadline=None)
    def test_consensus_is_acceptable_for_threshold(self, votes, t):
        # Brute-force accumulated-vote scan: result covers >= t of the votes.
        lat = ValueLattice([ORG, COM, ORG_SUB])
        result = lat.consensus(votes, t)
        total = sum(votes.values())
        covered = sum(count for v, count in votes.items() if lat.leq(v, result))
        assert Fraction(covered, total) >= t
