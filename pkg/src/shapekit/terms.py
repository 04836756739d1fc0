"""RDF term model: IRIs, literals, blank nodes, triples.

Terms are immutable values; graphs and constraint ASTs share them freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
SHACL_NS = "http://www.w3.org/ns/shacl#"

RDF_TYPE = RDF_NS + "type"
RDF_FIRST = RDF_NS + "first"
RDF_REST = RDF_NS + "rest"
RDF_NIL = RDF_NS + "nil"
RDF_LANGSTRING = RDF_NS + "langString"

RDFS_CLASS = RDFS_NS + "Class"
RDFS_DOMAIN = RDFS_NS + "domain"
RDFS_RANGE = RDFS_NS + "range"
RDFS_SUBCLASSOF = RDFS_NS + "subClassOf"

OWL_CLASS = OWL_NS + "Class"


def xsd(local: str) -> str:
    return XSD_NS + local


XSD_STRING = xsd("string")
XSD_BOOLEAN = xsd("boolean")
XSD_INTEGER = xsd("integer")
XSD_DECIMAL = xsd("decimal")
XSD_DOUBLE = xsd("double")


@dataclass(frozen=True)
class Iri:
    value: str

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Literal:
    """A literal with a mandatory datatype.

    Plain string literals carry xsd:string; language-tagged literals carry
    rdf:langString (the language tag forces the datatype).
    """

    lexical: str
    datatype: str = XSD_STRING
    language: str | None = None

    def __post_init__(self) -> None:
        if self.language is not None:
            object.__setattr__(self, "datatype", RDF_LANGSTRING)

    def __str__(self) -> str:
        return self.lexical


@dataclass(frozen=True)
class Blank:
    id: str

    def __str__(self) -> str:
        return "_:" + self.id


Term = Iri | Literal | Blank


@dataclass(frozen=True)
class Triple:
    subject: Iri | Blank
    predicate: str
    object: Term


def term_key(term: Term) -> tuple:
    """Total order over terms, used everywhere a deterministic order is needed."""
    if isinstance(term, Iri):
        return (0, term.value)
    if isinstance(term, Literal):
        return (1, term.lexical, term.datatype, term.language or "")
    return (2, term.id)


def triple_key(t: Triple) -> tuple:
    return (term_key(t.subject), t.predicate, term_key(t.object))


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_string(text: str) -> str:
    return "".join(_ESCAPES.get(c, c) for c in text)


def n3(term: Term) -> str:
    """Render a term in N-Triples syntax."""
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, Blank):
        return f"_:{term.id}"
    quoted = f'"{escape_string(term.lexical)}"'
    if term.language is not None:
        return f"{quoted}@{term.language}"
    if term.datatype == XSD_STRING:
        return quoted
    return f"{quoted}^^<{term.datatype}>"


def parse_term(text: str) -> Term:
    """Parse a single term in N-Triples syntax (inverse of :func:`n3`)."""
    from .turtle import parse_term_text

    return parse_term_text(text)


def local_name(iri: str) -> str:
    """Heuristic local part of an IRI: everything after the last #, / or :."""
    for sep in ("#", "/", ":"):
        idx = iri.rfind(sep)
        if 0 <= idx < len(iri) - 1:
            return iri[idx + 1 :]
    return iri


@dataclass
class PrefixMap:
    """Declared namespace prefixes, with helpers for rendering prefixed names."""

    prefixes: dict[str, str] = field(default_factory=dict)

    def declare(self, name: str, namespace: str) -> bool:
        """Declare a prefix; returns False when an existing binding was replaced."""
        fresh = self.prefixes.get(name) in (None, namespace)
        self.prefixes[name] = namespace
        return fresh

    def expand(self, name: str, local: str) -> str:
        return self.prefixes[name] + local

    def shrink(self, iri: str) -> str | None:
        """Longest-namespace prefixed form of `iri`, or None."""
        best: tuple[int, str, str] | None = None
        for name, ns in self.prefixes.items():
            if iri.startswith(ns) and (best is None or len(ns) > best[0]):
                best = (len(ns), name, iri[len(ns) :])
        if best is None:
            return None
        name, local = best[1], best[2]
        if not _valid_local(local):
            return None
        return f"{name}:{local}"

    def copy(self) -> "PrefixMap":
        return PrefixMap(dict(self.prefixes))


def _valid_local(local: str) -> bool:
    # Conservative: only locals that round-trip through our tokenizers.
    if local == "":
        return True
    if local[0].isdigit():
        return all(c.isalnum() or c in "_-." for c in local) and not local.endswith(".")
    return (local[0].isalpha() or local[0] == "_") and all(
        c.isalnum() or c in "_-." for c in local
    ) and not local.endswith(".")
