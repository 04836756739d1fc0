"""Translation of schemas to ShEx compact syntax and SHACL shape graphs.

ShEx keeps the compact-syntax structure: conjunction becomes `;`, choices
become `|` groups, and the four uniform cardinalities use the shorthands
(`{1;1}` omitted, `*`, `+`, `?`). SHACL encodes each label as a node shape
with property shapes; choices become `sh:xone` or `sh:or` (caller's pick),
repeated predicates become qualified value shapes, and target declarations
come from the accompanying validation target.
"""

from __future__ import annotations

import re

from .graph import RdfGraph
from .model import (
    ANY,
    Choice,
    Conjunct,
    IriPrefix,
    Kind,
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
from .scl_text import _rendering_prefixes
from .targets import TargetSpec
from .terms import (
    RDF_FIRST,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    SHACL_NS,
    XSD_BOOLEAN,
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
)

# ---------------------------------------------------------------------------
# ShEx compact syntax
# ---------------------------------------------------------------------------

_SHEX_KINDS = {"lit": "LITERAL", "nonlit": "NONLITERAL", "blank": "BNODE", "iri": "IRI"}


class _ShexPrinter:
    def __init__(self, pm: PrefixMap):
        self.pm = pm

    def iri(self, iri: str) -> str:
        short = self.pm.shrink(iri)
        return short if short is not None and not short.endswith(":") else f"<{iri}>"

    def label(self, label: str) -> str:
        short = self.pm.shrink(label)
        return short if short is not None else f"<{label}>"

    def term(self, term: Term) -> str:
        if isinstance(term, Iri):
            return self.iri(term.value)
        assert isinstance(term, Literal)
        quoted = f'"{escape_string(term.lexical)}"'
        if term.language is not None:
            return f"{quoted}@{term.language}"
        if term.datatype == XSD_STRING:
            return quoted
        return f"{quoted}^^{self.iri(term.datatype)}"

    def value(self, vc: ValueConstraint) -> str:
        if isinstance(vc, Kind):
            return "." if vc == ANY else _SHEX_KINDS[vc.name]
        if isinstance(vc, XsdType):
            return self.iri(vc.datatype)
        if isinstance(vc, IriPrefix):
            short = self.pm.shrink(vc.namespace)
            stem = short if short is not None and short.endswith(":") else f"<{vc.namespace}>"
            return f"[{stem}~]"
        if isinstance(vc, ValueSet):
            return "[" + " ".join(self.term(v) for v in vc.values) + "]"
        raise SchemaError(f"cannot export value constraint {vc!r}")

    def cardinality(self, card) -> str:
        text = str(card)
        if text == "{1;1}":
            return ""
        shorthand = {"{0;*}": " *", "{1;*}": " +", "{0;1}": " ?"}.get(text)
        if shorthand:
            return shorthand
        upper = "*" if card.max is None else str(card.max)
        return f" {{{card.min},{upper}}}"

    def object(self, obj: ObjectConstraint) -> str:
        if isinstance(obj, ShapeRef):
            return "@" + self.label(obj.label)
        if isinstance(obj, NeighbourhoodConstraint):
            if obj.empty:
                return "{ }"
            return "{ " + " ; ".join(self.conjunct(c) for c in obj.conjuncts) + " }"
        return self.value(obj)

    def triple_constraint(self, tc: TripleConstraint) -> str:
        return f"{self.iri(tc.predicate)} {self.object(tc.object)}{self.cardinality(tc.card)}"

    def conjunct(self, conjunct: Conjunct) -> str:
        if isinstance(conjunct, Choice):
            return "( " + " | ".join(self.triple_constraint(b) for b in conjunct.branches) + " )"
        return self.triple_constraint(conjunct)

    def shape(self, label: str, constraint: ShapeConstraint) -> str:
        head = self.label(label)
        parts = [self.value(vc) for vc in constraint.values]
        nc = constraint.neighbourhood
        if nc.empty:
            parts.append("{ }")
        else:
            lines = ["{"]
            for idx, conjunct in enumerate(nc.conjuncts):
                sep = " ;" if idx < len(nc.conjuncts) - 1 else ""
                lines.append(f"  {self.conjunct(conjunct)}{sep}")
            lines.append("}")
            parts.append("\n".join(lines))
        return f"{head} " + " AND ".join(parts)


def to_shex(schema: Schema, targets: dict[str, TargetSpec] | None = None) -> str:
    """ShEx compact syntax text. Targets have no ShExC counterpart and are
    accepted only for interface symmetry."""
    del targets
    if not schema.defs:
        return ""
    pm = _rendering_prefixes(schema)
    printer = _ShexPrinter(pm)
    header = [f"PREFIX {name}: <{pm.prefixes[name]}>" for name in sorted(pm.prefixes)]
    body = [printer.shape(label, c) for label, c in schema.defs.items()]
    text = "\n".join(header)
    if header:
        text += "\n\n"
    return text + "\n\n".join(body) + "\n"


# ---------------------------------------------------------------------------
# SHACL shapes graph
# ---------------------------------------------------------------------------

SH = SHACL_NS

_SH_NODEKIND = {
    "lit": SH + "Literal",
    "nonlit": SH + "BlankNodeOrIRI",
    "blank": SH + "BlankNode",
    "iri": SH + "IRI",
}


def _integer(n: int) -> Literal:
    return Literal(str(n), datatype=XSD_INTEGER)


class _ShaclBuilder:
    def __init__(self, choice_op: str):
        if choice_op not in ("xone", "or"):
            raise ValueError(f"choice operator must be 'xone' or 'or', got {choice_op!r}")
        self.choice_op = SH + choice_op
        self.triples: list[Triple] = []
        self.counter = 0

    def bnode(self) -> Blank:
        node = Blank(f"b{self.counter:03d}")
        self.counter += 1
        return node

    def emit(self, s, p, o) -> None:
        self.triples.append(Triple(s, p, o))

    def rdf_list(self, items: list[Term]) -> Term:
        head: Term = Iri(RDF_NIL)
        for item in reversed(items):
            cell = self.bnode()
            self.emit(cell, RDF_FIRST, item)
            self.emit(cell, RDF_REST, head)
            head = cell
        return head

    def value_terms(self, subject, vc: ValueConstraint) -> None:
        if vc == ANY:
            return
        if isinstance(vc, Kind):
            self.emit(subject, SH + "nodeKind", Iri(_SH_NODEKIND[vc.name]))
        elif isinstance(vc, XsdType):
            self.emit(subject, SH + "datatype", Iri(vc.datatype))
        elif isinstance(vc, IriPrefix):
            pattern = "^" + re.escape(vc.namespace)
            self.emit(subject, SH + "pattern", Literal(pattern))
        elif isinstance(vc, ValueSet):
            if len(vc.values) == 1:
                self.emit(subject, SH + "hasValue", vc.values[0])
            else:
                self.emit(subject, SH + "in", self.rdf_list(list(vc.values)))
        else:
            raise SchemaError(f"cannot export value constraint {vc!r}")

    def object_terms(self, subject, obj: ObjectConstraint) -> None:
        if isinstance(obj, ShapeRef):
            self.emit(subject, SH + "node", Iri(obj.label))
        elif isinstance(obj, NeighbourhoodConstraint):
            nested = self.bnode()
            self.emit(subject, SH + "node", nested)
            self.neighbourhood_terms(nested, obj)
        else:
            self.value_terms(subject, obj)

    def property_shape(self, tc: TripleConstraint, qualified: bool) -> Blank:
        ps = self.bnode()
        self.emit(ps, SH + "path", Iri(tc.predicate))
        if qualified:
            inner = self.bnode()
            self.object_terms(inner, tc.object)
            self.emit(ps, SH + "qualifiedValueShape", inner)
            self.emit(ps, SH + "qualifiedMinCount", _integer(tc.card.min))
            if tc.card.max is not None:
                self.emit(ps, SH + "qualifiedMaxCount", _integer(tc.card.max))
        else:
            self.object_terms(ps, tc.object)
            self.emit(ps, SH + "minCount", _integer(tc.card.min))
            if tc.card.max is not None:
                self.emit(ps, SH + "maxCount", _integer(tc.card.max))
        return ps

    def neighbourhood_terms(self, subject, nc: NeighbourhoodConstraint) -> None:
        plain = [c for c in nc.conjuncts if isinstance(c, TripleConstraint)]
        repeated = {p for p in (tc.predicate for tc in plain)
                    if sum(1 for tc in plain if tc.predicate == p) > 1}
        for conjunct in nc.conjuncts:
            if isinstance(conjunct, Choice):
                wrappers: list[Term] = []
                for branch in conjunct.branches:
                    wrapper = self.bnode()
                    self.emit(wrapper, SH + "property", self.property_shape(branch, False))
                    wrappers.append(wrapper)
                self.emit(subject, self.choice_op, self.rdf_list(wrappers))
            else:
                ps = self.property_shape(conjunct, conjunct.predicate in repeated)
                self.emit(subject, SH + "property", ps)

    def node_shape(self, label: str, constraint: ShapeConstraint, target: TargetSpec | None) -> None:
        shape = Iri(label)
        self.emit(shape, RDF_TYPE, Iri(SH + "NodeShape"))
        for vc in constraint.values:
            self.value_terms(shape, vc)
        self.neighbourhood_terms(shape, constraint.neighbourhood)
        self.emit(shape, SH + "closed", Literal("false", datatype=XSD_BOOLEAN))
        if target is None:
            return
        if target.selector == "class":
            self.emit(shape, SH + "targetClass", Iri(target.iri))
        elif target.selector == "subjects-of":
            self.emit(shape, SH + "targetSubjectsOf", Iri(target.iri))
        for node in target.include:
            if not isinstance(node, Literal):
                self.emit(shape, SH + "targetNode", node)


def to_shacl(
    schema: Schema,
    targets: dict[str, TargetSpec] | None = None,
    choice_op: str = "xone",
) -> RdfGraph:
    """SHACL shapes graph; `choice_op` selects sh:xone or sh:or for choices.

    Every shape is emitted open (`sh:closed false`). `all` selectors and
    exclude sets have no SHACL counterpart and are omitted.
    """
    builder = _ShaclBuilder(choice_op)
    targets = targets or {}
    for label, constraint in schema.defs.items():
        builder.node_shape(label, constraint, targets.get(label))
    pm = PrefixMap(dict(schema.prefixes))
    pm.declare("sh", SH)
    pm.declare("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#")
    return RdfGraph(builder.triples, pm)


# ---------------------------------------------------------------------------
# Deterministic Turtle for shape graphs
# ---------------------------------------------------------------------------


def serialize_shapes_graph(g: RdfGraph) -> str:
    """Turtle with single-use blank nodes inlined and RDF lists folded.

    Emission order follows the graph's deterministic triple order, so equal
    graphs always serialize to identical bytes.
    """
    pm = g.prefixes
    ref_count: dict[Term, int] = {}
    for t in g.triples:
        if isinstance(t.object, Blank):
            ref_count[t.object] = ref_count.get(t.object, 0) + 1

    def render_iri(iri: str) -> str:
        short = pm.shrink(iri)
        return short if short is not None else f"<{iri}>"

    def render(term: Term) -> str:
        if isinstance(term, Iri):
            return render_iri(term.value)
        if isinstance(term, Blank):
            if ref_count.get(term, 0) == 1:
                return render_bnode(term)
            return n3(term)
        assert isinstance(term, Literal)
        if term.language is None:
            if term.datatype == XSD_INTEGER and re.fullmatch(r"[+-]?\d+", term.lexical):
                return term.lexical
            if term.datatype == XSD_BOOLEAN and term.lexical in ("true", "false"):
                return term.lexical
            if term.datatype != XSD_STRING:
                short = pm.shrink(term.datatype)
                if short is not None:
                    return f'"{escape_string(term.lexical)}"^^{short}'
        return n3(term)

    def as_list(term: Term) -> list[Term] | None:
        items: list[Term] = []
        seen: set[Term] = set()
        cursor = term
        while True:
            if isinstance(cursor, Iri) and cursor.value == RDF_NIL:
                return items
            if not isinstance(cursor, Blank) or cursor in seen:
                return None
            seen.add(cursor)
            preds = {t.predicate: t.object for t in g.neighbourhood(cursor)}
            if set(preds) != {RDF_FIRST, RDF_REST}:
                return None
            items.append(preds[RDF_FIRST])
            cursor = preds[RDF_REST]

    def render_bnode(node: Blank) -> str:
        items = as_list(node)
        if items is not None:
            return "( " + " ".join(render(i) for i in items) + " )"
        parts = []
        for t in g.neighbourhood(node):
            pred = "a" if t.predicate == RDF_TYPE else render_iri(t.predicate)
            parts.append(f"{pred} {render(t.object)}")
        return "[ " + " ; ".join(parts) + " ]"

    inlined: set[Term] = set()

    def collect_inlined(term: Term) -> None:
        if isinstance(term, Blank) and ref_count.get(term, 0) == 1:
            inlined.add(term)
            for t in g.neighbourhood(term):
                collect_inlined(t.object)

    for t in g.triples:
        if isinstance(t.object, Blank):
            collect_inlined(t.object)

    lines = [f"@prefix {name}: <{pm.prefixes[name]}> ." for name in sorted(pm.prefixes)]
    if lines:
        lines.append("")
    subjects = [s for s in g.subjects() if s not in inlined]
    for subject in subjects:
        rows = g.neighbourhood(subject)
        parts = []
        for t in rows:
            pred = "a" if t.predicate == RDF_TYPE else render_iri(t.predicate)
            parts.append(f"{pred} {render(t.object)}")
        body = " ;\n    ".join(parts)
        lines.append(f"{render(subject)} {body} .")
        lines.append("")
    while lines and lines[-1] == "":
        lines.pop()
    return "".join(line + "\n" for line in lines)
