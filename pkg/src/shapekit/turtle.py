"""Hand-written parser and serializer for a Turtle subset and N-Triples.

Supported Turtle: prefix directives (`@prefix` and SPARQL-style `PREFIX`),
the `a` keyword, predicate-object lists (`;`), object lists (`,`), typed /
plain / language-tagged literals, numeric and boolean shorthands, and blank
node labels. Collections, anonymous blank nodes, quoted triples and `@base`
are not supported.

N-Triples is parsed by the same machinery in a strict mode: absolute IRIs,
no prefixed names, no shorthands.
"""

from __future__ import annotations

import bisect
import warnings
from dataclasses import dataclass

from .graph import RdfGraph
from .terms import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    Blank,
    Iri,
    Literal,
    PrefixMap,
    Term,
    Triple,
    escape_string,
    n3,
    term_key,
    triple_key,
)


class RdfSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class PrefixRedefinedWarning(UserWarning):
    pass


@dataclass
class Token:
    typ: str
    value: str
    line: int
    column: int


_PUNCT = {".": "dot", ";": "semi", ",": "comma"}


def _is_name_char(c: str) -> bool:
    return c.isalnum() or c in "_-."


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.n = len(text)
        self.i = 0
        self.line_starts = [0]
        for idx, c in enumerate(text):
            if c == "\n":
                self.line_starts.append(idx + 1)

    def position(self, idx: int) -> tuple[int, int]:
        row = bisect.bisect_right(self.line_starts, idx) - 1
        return row + 1, idx - self.line_starts[row] + 1

    def error(self, msg: str, idx: int | None = None) -> RdfSyntaxError:
        line, col = self.position(self.i if idx is None else idx)
        return RdfSyntaxError(msg, line, col)

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        text, n = self.text, self.n
        while self.i < n:
            c = text[self.i]
            if c in " \t\r\n":
                self.i += 1
                continue
            if c == "#":
                while self.i < n and text[self.i] != "\n":
                    self.i += 1
                continue
            start = self.i
            line, col = self.position(start)

            def tok(typ: str, value: str) -> None:
                out.append(Token(typ, value, line, col))

            if c in _PUNCT:
                self.i += 1
                tok(_PUNCT[c], c)
            elif c == "<":
                tok("iriref", self.scan_iri())
            elif c == '"':
                tok("string", self.scan_string())
            elif c == "^":
                if text.startswith("^^", self.i):
                    self.i += 2
                    tok("hathat", "^^")
                else:
                    raise self.error("unexpected '^'")
            elif c == "@":
                self.i += 1
                word = self.scan_while(lambda ch: ch.isalnum() or ch == "-")
                if word == "prefix":
                    tok("at_prefix", "@prefix")
                elif word:
                    tok("langtag", word)
                else:
                    raise self.error("dangling '@'", start)
            elif c.isdigit() or (c in "+-" and self.i + 1 < n and text[self.i + 1].isdigit()):
                tok("number", self.scan_number())
            elif text.startswith("_:", self.i):
                self.i += 2
                label = self.scan_local()
                if not label:
                    raise self.error("empty blank node label", start)
                tok("blank", label)
            elif c.isalpha() or c == "_" or c == ":":
                name = "" if c == ":" else self.scan_local()
                if self.i < n and text[self.i] == ":":
                    self.i += 1
                    tok("pname", f"{name}:{self.scan_local()}")
                else:
                    tok("name", name)
            else:
                raise self.error(f"unexpected character {c!r}", start)
        line, col = self.position(self.i)
        out.append(Token("eof", "", line, col))
        return out

    def scan_while(self, pred) -> str:
        start = self.i
        while self.i < self.n and pred(self.text[self.i]):
            self.i += 1
        return self.text[start : self.i]

    def scan_local(self) -> str:
        # Name characters, but a trailing run of dots belongs to the statement.
        word = self.scan_while(_is_name_char)
        while word.endswith("."):
            word = word[:-1]
            self.i -= 1
        return word

    def scan_number(self) -> str:
        start = self.i
        if self.text[self.i] in "+-":
            self.i += 1
        while self.i < self.n:
            c = self.text[self.i]
            if c.isdigit() or c in "eE":
                self.i += 1
            elif c in "+-" and self.text[self.i - 1] in "eE":
                self.i += 1
            elif c == "." and self.i + 1 < self.n and self.text[self.i + 1].isdigit():
                self.i += 1
            else:
                break
        return self.text[start : self.i]

    def scan_iri(self) -> str:
        start = self.i
        self.i += 1
        buf = []
        while self.i < self.n and self.text[self.i] not in ">\n":
            buf.append(self.text[self.i])
            self.i += 1
        if self.i >= self.n or self.text[self.i] != ">":
            raise self.error("unterminated IRI", start)
        self.i += 1
        return _unescape("".join(buf), *self.position(start))

    def scan_string(self) -> str:
        start = self.i
        self.i += 1
        buf = []
        while self.i < self.n:
            c = self.text[self.i]
            if c == '"':
                self.i += 1
                return _unescape("".join(buf), *self.position(start))
            if c == "\n":
                raise self.error("newline in string literal", start)
            if c == "\\":
                if self.i + 1 >= self.n:
                    raise self.error("dangling escape")
                buf.append(self.text[self.i : self.i + 2])
                self.i += 2
                continue
            buf.append(c)
            self.i += 1
        raise self.error("unterminated string literal", start)


_STRING_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "\\": "\\", "'": "'", "b": "\b", "f": "\f"}


def _unescape(raw: str, line: int, col: int) -> str:
    if "\\" not in raw:
        return raw
    out = []
    i, n = 0, len(raw)
    while i < n:
        c = raw[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        if i + 1 >= n:
            raise RdfSyntaxError("dangling escape", line, col)
        e = raw[i + 1]
        if e in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[e])
            i += 2
        elif e in ("u", "U"):
            width = 4 if e == "u" else 8
            hexpart = raw[i + 2 : i + 2 + width]
            if len(hexpart) != width:
                raise RdfSyntaxError("truncated unicode escape", line, col)
            try:
                out.append(chr(int(hexpart, 16)))
            except ValueError:
                raise RdfSyntaxError("invalid unicode escape", line, col) from None
            i += 2 + width
        else:
            raise RdfSyntaxError(f"unknown escape '\\{e}'", line, col)
    return "".join(out)


class _Parser:
    def __init__(self, text: str, strict_ntriples: bool = False):
        self.tokens = _Lexer(text).tokens()
        self.pos = 0
        self.strict = strict_ntriples
        self.prefixes = PrefixMap()
        self.triples: list[Triple] = []

    def peek(self) -> Token:
        return self.tokens[self.pos]

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

    def parse(self) -> None:
        while self.peek().typ != "eof":
            tok = self.peek()
            if tok.typ == "at_prefix" or (tok.typ == "name" and tok.value.upper() == "PREFIX"):
                if self.strict:
                    raise self.error("prefix directives are not allowed in N-Triples", tok)
                self.parse_prefix(sparql_style=tok.typ == "name")
                continue
            self.parse_statement()

    def parse_prefix(self, sparql_style: bool) -> None:
        self.next()
        tok = self.expect("pname")
        name, _, local = tok.value.partition(":")
        if local:
            raise self.error("prefix declaration must end with ':'", tok)
        iri = self.expect("iriref").value
        if not sparql_style:
            self.expect("dot")
        if not self.prefixes.declare(name, iri):
            warnings.warn(
                f"prefix '{name}:' redefined, last declaration wins",
                PrefixRedefinedWarning,
                stacklevel=4,
            )

    def parse_statement(self) -> None:
        subject = self.parse_subject()
        while True:
            predicate = self.parse_predicate()
            while True:
                obj = self.parse_object()
                self.triples.append(Triple(subject, predicate, obj))
                if self.peek().typ == "comma":
                    if self.strict:
                        raise self.error("object lists are not allowed in N-Triples", self.peek())
                    self.next()
                    continue
                break
            if self.peek().typ == "semi":
                if self.strict:
                    raise self.error("predicate lists are not allowed in N-Triples", self.peek())
                self.next()
                if self.peek().typ == "dot":  # tolerate trailing ';'
                    break
                continue
            break
        self.expect("dot")

    def parse_subject(self) -> Iri | Blank:
        tok = self.next()
        if tok.typ == "iriref":
            return Iri(self.resolve_iri(tok))
        if tok.typ == "pname":
            return Iri(self.expand(tok))
        if tok.typ == "blank":
            return Blank(tok.value)
        raise self.error(f"expected subject, found {tok.value!r}", tok)

    def parse_predicate(self) -> str:
        tok = self.next()
        if tok.typ == "iriref":
            return self.resolve_iri(tok)
        if tok.typ == "name" and tok.value == "a":
            if self.strict:
                raise self.error("'a' keyword is not allowed in N-Triples", tok)
            return RDF_TYPE
        if tok.typ == "pname":
            return self.expand(tok)
        raise self.error(f"expected predicate, found {tok.value!r}", tok)

    def parse_object(self) -> Term:
        tok = self.next()
        if tok.typ == "iriref":
            return Iri(self.resolve_iri(tok))
        if tok.typ == "pname":
            return Iri(self.expand(tok))
        if tok.typ == "blank":
            return Blank(tok.value)
        if tok.typ == "string":
            nxt = self.peek()
            if nxt.typ == "langtag":
                self.next()
                return Literal(tok.value, language=nxt.value)
            if nxt.typ == "hathat":
                self.next()
                dt_tok = self.next()
                if dt_tok.typ == "iriref":
                    return Literal(tok.value, datatype=self.resolve_iri(dt_tok))
                if dt_tok.typ == "pname" and not self.strict:
                    return Literal(tok.value, datatype=self.expand(dt_tok))
                raise self.error("expected datatype IRI", dt_tok)
            return Literal(tok.value)
        if tok.typ == "number" and not self.strict:
            return number_literal(tok.value, tok.line, tok.column)
        if tok.typ == "name" and tok.value in ("true", "false") and not self.strict:
            return Literal(tok.value, datatype=XSD_BOOLEAN)
        raise self.error(f"expected object, found {tok.value!r}", tok)

    def resolve_iri(self, tok: Token) -> str:
        if self.strict and not _looks_absolute(tok.value):
            raise self.error(f"relative IRI {tok.value!r} in N-Triples", tok)
        return tok.value

    def expand(self, tok: Token) -> str:
        if self.strict:
            raise self.error("prefixed names are not allowed in N-Triples", tok)
        name, _, local = tok.value.partition(":")
        if name not in self.prefixes.prefixes:
            raise self.error(f"undeclared prefix '{name}:'", tok)
        return self.prefixes.expand(name, local)


def _looks_absolute(iri: str) -> bool:
    head = iri.split(":", 1)
    return len(head) == 2 and head[0] != "" and all(c.isalnum() or c in "+-." for c in head[0])


def number_literal(text: str, line: int = 0, column: int = 0) -> Literal:
    if any(c in text for c in "eE"):
        datatype = XSD_DOUBLE
    elif "." in text:
        datatype = XSD_DECIMAL
    else:
        datatype = XSD_INTEGER
    try:
        float(text)
    except ValueError:
        raise RdfSyntaxError(f"malformed number {text!r}", line, column) from None
    return Literal(text, datatype=datatype)


def parse_term_text(text: str) -> Term:
    """Parse one term written in N-Triples-style syntax."""
    parser = _Parser(text)
    term = parser.parse_object()
    parser.expect("eof")
    return term


def parse_graph(data: str | bytes, format: str = "turtle") -> RdfGraph:
    """Parse Turtle or N-Triples into an :class:`RdfGraph`.

    Syntax errors raise :class:`RdfSyntaxError` with line and column; a
    redefined prefix emits :class:`PrefixRedefinedWarning` (last wins).
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if format not in ("turtle", "ntriples"):
        raise ValueError(f"unknown RDF format {format!r}")
    parser = _Parser(data, strict_ntriples=format == "ntriples")
    parser.parse()
    return RdfGraph(parser.triples, parser.prefixes)


def load_graph(path: str, format: str | None = None) -> RdfGraph:
    if format is None:
        format = "ntriples" if str(path).endswith((".nt", ".ntriples")) else "turtle"
    with open(path, "rb") as fh:
        return parse_graph(fh.read(), format=format)


def serialize_ntriples(graph: RdfGraph) -> str:
    lines = [
        f"{n3(t.subject)} <{t.predicate}> {n3(t.object)} ."
        for t in sorted(graph.triples, key=triple_key)
    ]
    return "".join(line + "\n" for line in lines)


def serialize_turtle(graph: RdfGraph) -> str:
    """Serialize grouped by subject, prefixed names where declared."""
    pm = graph.prefixes
    out: list[str] = []
    for name in sorted(pm.prefixes):
        out.append(f"@prefix {name}: <{pm.prefixes[name]}> .")
    if out:
        out.append("")

    def render(term: Term) -> str:
        if isinstance(term, Iri):
            short = pm.shrink(term.value)
            return short if short else f"<{term.value}>"
        if isinstance(term, Literal) and term.language is None and term.datatype != XSD_STRING:
            short = pm.shrink(term.datatype)
            if short:
                return f'"{escape_string(term.lexical)}"^^{short}'
        return n3(term)

    by_subject: dict[Term, list[Triple]] = {}
    for t in graph.triples:
        by_subject.setdefault(t.subject, []).append(t)
    for subject in sorted(by_subject, key=term_key):
        grouped: dict[str, list[Term]] = {}
        for t in sorted(by_subject[subject], key=triple_key):
            grouped.setdefault(t.predicate, []).append(t.object)
        parts = []
        for pred in sorted(grouped):
            pred_text = "a" if pred == RDF_TYPE else render(Iri(pred))
            objs = ", ".join(render(o) for o in grouped[pred])
            parts.append(f"{pred_text} {objs}")
        body = " ;\n    ".join(parts)
        out.append(f"{render(subject)} {body} .")
    return "".join(line + "\n" for line in out)
