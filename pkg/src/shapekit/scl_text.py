"""Compact text syntax for shape-constraint schemas (`.scl` files).

The syntax is ShExC-like with explicit `{min;max}` cardinalities::

    PREFIX foaf: <http://xmlns.com/foaf/0.1/>

    <Person> {
      rdf:type [foaf:Person] {1;1} ;
      owl:sameAs iri {0;*} ;
      ( bio:birth xsd:gYear {1;1} | rdgr2:dateOfBirth @<Date> {1;1} )
    }

Node kinds are `lit`, `nonlit`, `blank`, `iri`, `any` (case-insensitive);
`ex:` (empty local part) is a namespace-prefix constraint, `<ns>~` the same
for an undeclared namespace; any other prefixed name or IRI in value
position is a datatype constraint; `[ ... ]` encloses a value set.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .model import (
    Cardinality,
    Choice,
    Conjunct,
    IriPrefix,
    Kind,
    KIND_NAMES,
    NeighbourhoodConstraint,
    ObjectConstraint,
    Schema,
    SchemaError,
    ShapeConstraint,
    ShapeRef,
    TripleConstraint,
    ValueConstraint,
    ValueSet,
    XsdType,
)
from .terms import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_STRING,
    Iri,
    Literal,
    PrefixMap,
    Term,
    escape_string,
)
from .turtle import RdfSyntaxError, _unescape, number_literal


@dataclass
class Token:
    typ: str
    value: str
    line: int
    column: int


_PUNCT = {
    "{": "lbrace",
    "}": "rbrace",
    "(": "lparen",
    ")": "rparen",
    "[": "lbracket",
    "]": "rbracket",
    ";": "semi",
    "|": "pipe",
    "@": "at",
    "*": "star",
    ",": "comma",
    "~": "tilde",
}


def _is_name_char(c: str) -> bool:
    return c.isalnum() or c in "_-."


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(text)
    line_starts = [0] + [k + 1 for k, c in enumerate(text) if c == "\n"]

    def position(idx: int) -> tuple[int, int]:
        row = bisect.bisect_right(line_starts, idx) - 1
        return row + 1, idx - line_starts[row] + 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start = i
        ln, col = position(start)
        if c in _PUNCT:
            tokens.append(Token(_PUNCT[c], c, ln, col))
            i += 1
            continue
        if c == "<":
            i += 1
            j = i
            while j < n and text[j] not in ">\n":
                j += 1
            if j >= n or text[j] != ">":
                raise RdfSyntaxError("unterminated IRI", ln, col)
            tokens.append(Token("iriref", _unescape(text[i:j], ln, col), ln, col))
            i = j + 1
            continue
        if c == '"':
            i += 1
            buf = []
            while i < n:
                ch = text[i]
                if ch == '"':
                    break
                if ch == "\n":
                    raise RdfSyntaxError("newline in string literal", ln, col)
                if ch == "\\":
                    buf.append(text[i : i + 2])
                    i += 2
                    continue
                buf.append(ch)
                i += 1
            if i >= n:
                raise RdfSyntaxError("unterminated string literal", ln, col)
            i += 1
            tokens.append(Token("string", _unescape("".join(buf), ln, col), ln, col))
            continue
        if text.startswith("^^", i):
            tokens.append(Token("hathat", "^^", ln, col))
            i += 2
            continue
        if c.isdigit() or (c in "+-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and (text[j].isdigit() or text[j] == "."):
                if text[j] == "." and not (j + 1 < n and text[j + 1].isdigit()):
                    break
                j += 1
            tokens.append(Token("number", text[i:j], ln, col))
            i = j
            continue
        if c.isalpha() or c == "_" or c == ":":
            j = i
            while j < n and _is_name_char(text[j]):
                j += 1
            word = text[i:j]
            while word.endswith("."):
                word = word[:-1]
                j -= 1
            if j < n and text[j] == ":":
                j += 1
                k = j
                while k < n and _is_name_char(text[k]):
                    k += 1
                local = text[j:k]
                while local.endswith("."):
                    local = local[:-1]
                    k -= 1
                tokens.append(Token("pname", f"{word}:{local}", ln, col))
                i = k
            else:
                tokens.append(Token("name", word, ln, col))
                i = j
            continue
        raise RdfSyntaxError(f"unexpected character {c!r}", ln, col)
    ln, col = position(i)
    tokens.append(Token("eof", "", ln, col))
    return tokens


class _SclParser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.prefixes = PrefixMap()

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, typ: str) -> Token:
        tok = self.next()
        if tok.typ != typ:
            raise self.error(f"expected {typ}, found {tok.value!r}", tok)
        return tok

    def error(self, msg: str, tok: Token) -> RdfSyntaxError:
        return RdfSyntaxError(msg, tok.line, tok.column)

    # -- directives ---------------------------------------------------------

    def parse_directives(self) -> None:
        while self.peek().typ == "name" and self.peek().value.upper() == "PREFIX":
            self.next()
            tok = self.expect("pname")
            name, _, local = tok.value.partition(":")
            if local:
                raise self.error("prefix declaration must end with ':'", tok)
            self.prefixes.declare(name, self.expect("iriref").value)

    # -- names --------------------------------------------------------------

    def expand(self, tok: Token) -> str:
        name, _, local = tok.value.partition(":")
        if name not in self.prefixes.prefixes:
            raise self.error(f"undeclared prefix '{name}:'", tok)
        return self.prefixes.expand(name, local)

    def parse_label(self) -> str:
        tok = self.next()
        if tok.typ == "iriref":
            return tok.value
        if tok.typ == "pname":
            return self.expand(tok)
        raise self.error(f"expected shape label, found {tok.value!r}", tok)

    def parse_predicate(self) -> str:
        tok = self.next()
        if tok.typ == "iriref":
            return tok.value
        if tok.typ == "pname":
            return self.expand(tok)
        if tok.typ == "name" and tok.value == "a":
            return RDF_TYPE
        raise self.error(f"expected predicate, found {tok.value!r}", tok)

    # -- values -------------------------------------------------------------

    def parse_value_constraint(self) -> ValueConstraint:
        tok = self.next()
        if tok.typ == "name":
            kind = KIND_NAMES.get(tok.value.lower())
            if kind is None:
                raise self.error(f"unknown value keyword {tok.value!r}", tok)
            return kind
        if tok.typ == "pname":
            name, _, local = tok.value.partition(":")
            if local == "":
                return IriPrefix(self.expand(tok))
            return XsdType(self.expand(tok))
        if tok.typ == "iriref":
            if self.peek().typ == "tilde":
                self.next()
                return IriPrefix(tok.value)
            return XsdType(tok.value)
        if tok.typ == "lbracket":
            return self.parse_value_set(tok)
        raise self.error(f"expected value constraint, found {tok.value!r}", tok)

    def parse_value_set(self, opener: Token) -> ValueSet:
        values: list[Term] = []
        while True:
            tok = self.peek()
            if tok.typ == "rbracket":
                self.next()
                break
            if tok.typ == "comma":
                self.next()
                continue
            values.append(self.parse_term())
        if not values:
            raise self.error("empty value set", opener)
        return ValueSet(tuple(values))

    def parse_term(self) -> Term:
        tok = self.next()
        if tok.typ == "iriref":
            return Iri(tok.value)
        if tok.typ == "pname":
            return Iri(self.expand(tok))
        if tok.typ == "string":
            nxt = self.peek()
            if nxt.typ == "at":
                self.next()
                lang = self.expect("name")
                return Literal(tok.value, language=lang.value)
            if nxt.typ == "hathat":
                self.next()
                dt = self.next()
                if dt.typ == "iriref":
                    return Literal(tok.value, datatype=dt.value)
                if dt.typ == "pname":
                    return Literal(tok.value, datatype=self.expand(dt))
                raise self.error("expected datatype IRI", dt)
            return Literal(tok.value)
        if tok.typ == "number":
            return number_literal(tok.value, tok.line, tok.column)
        if tok.typ == "name" and tok.value in ("true", "false"):
            return Literal(tok.value, datatype=XSD_BOOLEAN)
        raise self.error(f"expected IRI or literal, found {tok.value!r}", tok)

    # -- constraints --------------------------------------------------------

    def parse_cardinality(self) -> Cardinality:
        opener = self.expect("lbrace")
        low = self.expect("number")
        self.expect("semi")
        tok = self.next()
        if tok.typ == "star":
            high: int | None = None
        elif tok.typ == "number":
            high = int(tok.value)
        else:
            raise self.error("expected max cardinality", tok)
        self.expect("rbrace")
        try:
            return Cardinality(int(low.value), high)
        except SchemaError as err:
            raise self.error(str(err), opener) from None

    def parse_object_constraint(self) -> ObjectConstraint:
        tok = self.peek()
        if tok.typ == "at":
            self.next()
            return ShapeRef(self.parse_label())
        if tok.typ == "lbrace":
            if self.peek(1).typ == "number":
                raise self.error("missing object constraint before cardinality", tok)
            self.next()
            return self.parse_neighbourhood()
        return self.parse_value_constraint()

    def parse_triple_constraint(self) -> TripleConstraint:
        predicate = self.parse_predicate()
        obj = self.parse_object_constraint()
        card = self.parse_cardinality()
        return TripleConstraint(predicate, obj, card)

    def parse_conjunct(self) -> Conjunct:
        if self.peek().typ == "lparen":
            opener = self.next()
            branches = [self.parse_triple_constraint()]
            while self.peek().typ == "pipe":
                self.next()
                branches.append(self.parse_triple_constraint())
            self.expect("rparen")
            if len(branches) == 1:
                return branches[0]
            try:
                return Choice(tuple(branches))
            except SchemaError as err:
                raise self.error(str(err), opener) from None
        return self.parse_triple_constraint()

    def parse_neighbourhood(self) -> NeighbourhoodConstraint:
        """Parse conjuncts up to and including the closing brace."""
        conjuncts: list[Conjunct] = []
        while True:
            if self.peek().typ == "rbrace":
                self.next()
                break
            conjuncts.append(self.parse_conjunct())
            if self.peek().typ == "semi":
                self.next()
                continue
            self.expect("rbrace")
            break
        return NeighbourhoodConstraint(tuple(conjuncts))

    def parse_shape_constraint(self) -> ShapeConstraint:
        values: list[ValueConstraint] = []
        if self.peek().typ != "lbrace":
            values.append(self.parse_value_constraint())
            while self.peek().typ == "name" and self.peek().value.upper() == "AND":
                self.next()
                values.append(self.parse_value_constraint())
        self.expect("lbrace")
        neighbourhood = self.parse_neighbourhood()
        return ShapeConstraint(tuple(values), neighbourhood)

    def parse_schema(self) -> Schema:
        self.parse_directives()
        defs: dict[str, ShapeConstraint] = {}
        while self.peek().typ != "eof":
            tok = self.peek()
            label = self.parse_label()
            if label in defs:
                raise self.error(f"shape <{label}> defined twice", tok)
            defs[label] = self.parse_shape_constraint()
        schema = Schema(defs, dict(self.prefixes.prefixes))
        schema.check()
        return schema


def parse_scl(text: str) -> Schema:
    """Parse SCL compact syntax; checks references and acyclicity."""
    return _SclParser(text).parse_schema()


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def _rendering_prefixes(schema: Schema) -> PrefixMap:
    pm = PrefixMap(dict(schema.prefixes))
    auto: set[str] = set()

    def walk_value(vc: ValueConstraint) -> None:
        if isinstance(vc, IriPrefix) and pm.shrink(vc.namespace) is None:
            auto.add(vc.namespace)

    def walk_nc(nc: NeighbourhoodConstraint) -> None:
        for conjunct in nc.conjuncts:
            branches = conjunct.branches if isinstance(conjunct, Choice) else (conjunct,)
            for tc in branches:
                if isinstance(tc.object, ValueConstraint):
                    walk_value(tc.object)
                elif isinstance(tc.object, NeighbourhoodConstraint):
                    walk_nc(tc.object)

    for constraint in schema.defs.values():
        for vc in constraint.values:
            walk_value(vc)
        walk_nc(constraint.neighbourhood)

    counter = 1
    for ns in sorted(auto):
        if pm.shrink(ns) is not None:
            continue
        while f"ns{counter}" in pm.prefixes:
            counter += 1
        pm.declare(f"ns{counter}", ns)
    return pm


class _SclPrinter:
    def __init__(self, prefixes: PrefixMap):
        self.pm = prefixes

    def iri(self, iri: str) -> str:
        short = self.pm.shrink(iri)
        return short if short is not None else f"<{iri}>"

    def label(self, label: str) -> str:
        short = self.pm.shrink(label)
        return short if short is not None else f"<{label}>"

    def term(self, term: Term) -> str:
        if isinstance(term, Iri):
            return self.iri(term.value)
        if isinstance(term, Literal):
            quoted = f'"{escape_string(term.lexical)}"'
            if term.language is not None:
                return f"{quoted}@{term.language}"
            if term.datatype == XSD_STRING:
                return quoted
            return f"{quoted}^^{self.iri(term.datatype)}"
        raise SchemaError("blank nodes cannot appear in value sets")

    def value(self, vc: ValueConstraint) -> str:
        if isinstance(vc, Kind):
            return vc.name
        if isinstance(vc, XsdType):
            short = self.pm.shrink(vc.datatype)
            if short is not None and not short.endswith(":"):
                return short
            return f"<{vc.datatype}>"
        if isinstance(vc, IriPrefix):
            short = self.pm.shrink(vc.namespace)
            if short is not None and short.endswith(":"):
                return short
            return f"<{vc.namespace}>~"
        if isinstance(vc, ValueSet):
            return "[" + ", ".join(self.term(v) for v in vc.values) + "]"
        raise SchemaError(f"cannot print value constraint {vc!r}")

    def object(self, obj: ObjectConstraint) -> str:
        if isinstance(obj, ShapeRef):
            return "@" + self.label(obj.label)
        if isinstance(obj, NeighbourhoodConstraint):
            if obj.empty:
                return "{ }"
            return "{ " + " ; ".join(self.conjunct(c) for c in obj.conjuncts) + " }"
        return self.value(obj)

    def triple_constraint(self, tc: TripleConstraint) -> str:
        return f"{self.iri(tc.predicate)} {self.object(tc.object)} {tc.card}"

    def conjunct(self, conjunct: Conjunct) -> str:
        if isinstance(conjunct, Choice):
            return "( " + " | ".join(self.triple_constraint(b) for b in conjunct.branches) + " )"
        return self.triple_constraint(conjunct)

    def shape(self, label: str, constraint: ShapeConstraint) -> str:
        head = self.label(label)
        if constraint.values:
            head += " " + " AND ".join(self.value(v) for v in constraint.values)
        if constraint.neighbourhood.empty:
            return head + " { }"
        lines = [head + " {"]
        conjuncts = constraint.neighbourhood.conjuncts
        for idx, conjunct in enumerate(conjuncts):
            sep = " ;" if idx < len(conjuncts) - 1 else ""
            lines.append(f"  {self.conjunct(conjunct)}{sep}")
        lines.append("}")
        return "\n".join(lines)


def print_scl(schema: Schema) -> str:
    """Canonical text: one conjunct per line, explicit cardinalities."""
    if not schema.defs:
        return ""
    pm = _rendering_prefixes(schema)
    printer = _SclPrinter(pm)
    blocks = [f"PREFIX {name}: <{pm.prefixes[name]}>" for name in sorted(pm.prefixes)]
    body = [printer.shape(label, constraint) for label, constraint in schema.defs.items()]
    text = "\n".join(blocks)
    if blocks:
        text += "\n\n"
    return text + "\n\n".join(body) + "\n"


# ---------------------------------------------------------------------------
# Snippet helpers (edit-operation payloads)
# ---------------------------------------------------------------------------


def _snippet_parser(text: str, prefixes: dict[str, str]) -> _SclParser:
    parser = _SclParser(text)
    parser.prefixes = PrefixMap(dict(prefixes))
    return parser


def parse_conjunct_text(text: str, prefixes: dict[str, str]) -> Conjunct:
    parser = _snippet_parser(text, prefixes)
    conjunct = parser.parse_conjunct()
    parser.expect("eof")
    return conjunct


def parse_object_text(text: str, prefixes: dict[str, str]) -> ObjectConstraint:
    parser = _snippet_parser(text, prefixes)
    obj = parser.parse_object_constraint()
    parser.expect("eof")
    return obj


def parse_value_text(text: str, prefixes: dict[str, str]) -> ValueConstraint:
    parser = _snippet_parser(text, prefixes)
    value = parser.parse_value_constraint()
    parser.expect("eof")
    return value


def parse_cardinality_text(text: str) -> Cardinality:
    parser = _SclParser(text)
    card = parser.parse_cardinality()
    parser.expect("eof")
    return card


def conjunct_text(conjunct: Conjunct, prefixes: dict[str, str]) -> str:
    return _SclPrinter(PrefixMap(dict(prefixes))).conjunct(conjunct)


def object_text(obj: ObjectConstraint, prefixes: dict[str, str]) -> str:
    return _SclPrinter(PrefixMap(dict(prefixes))).object(obj)


def value_constraint_text(vc: ValueConstraint, prefixes: dict[str, str]) -> str:
    return _SclPrinter(PrefixMap(dict(prefixes))).value(vc)
