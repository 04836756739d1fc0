"""Parsers under adversarial input: documented errors only, never crashes."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapekit.model import SchemaError
from shapekit.pattern import PatternError, parse_pattern
from shapekit.scl_text import parse_scl
from shapekit.turtle import RdfSyntaxError, parse_graph

ACCEPTED_ERRORS = (RdfSyntaxError, SchemaError, PatternError)

_fragments = st.sampled_from(
    [
        "<Person>", "{", "}", "(", ")", "[", "]", ";", "|", "@", "PREFIX",
        "ex:", "ex:p", "<http://e/p>", "iri", "lit", "any", "AND", "TARGET",
        "{1;1}", "{0;*}", "__", "[ __ ]", '"text"', '"x"@en', '"1"^^xsd:int',
        "1564", "a", ".", ",", "~", "#c", "\n", " ",
    ]
)

_soup = st.lists(_fragments, max_size=30).map(" ".join)
_noise = st.text(max_size=60)


class TestParserRobustness:
    @given(text=st.one_of(_soup, _noise))
    @settings(max_examples=400, deadline=None)
    def test_scl_parser_fails_cleanly(self, text):
        try:
            parse_scl(text)
        except ACCEPTED_ERRORS:
            pass

    @given(text=st.one_of(_soup, _noise))
    @settings(max_examples=400, deadline=None)
    def test_pattern_parser_fails_cleanly(self, text):
        try:
            parse_pattern(text)
        except ACCEPTED_ERRORS:
            pass

    @given(text=st.one_of(_soup, _noise), format=st.sampled_from(["turtle", "ntriples"]))
    @settings(max_examples=400, deadline=None)
    def test_graph_parser_fails_cleanly(self, text, format):
        try:
            parse_graph(text, format=format)
        except ACCEPTED_ERRORS:
            pass

    @pytest.mark.parametrize("text", ["", " ", "\n\n", "# only a comment\n"])
    def test_blank_inputs_parse_to_empty(self, text):
        assert len(parse_graph(text)) == 0
        assert parse_scl(text).defs == {}
