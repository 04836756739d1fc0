"""Schema patterns: structural templates guiding automatic construction.

A pattern looks like a schema but replaces predicates by filters, object
constraints by holders, and some shape labels by variables::

    <City> TARGET class:<http://wd.example/class/City> {
      rdf:type [ __ ] ;
      p: @Y ;
      iri __
    }

    Y {
      rdf:type [ __ ] ;
      ps: __ ;
      pq: __
    }

Holders: `__` synthesizes a value constraint, `[ __ ]` an enumeration,
`@X` a reference to a freshly created shape per matched predicate, `@<L>` a
reference to a fixed label of the pattern, `{ ... }` a nested constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Iterable

from .graph import RdfGraph
from .scl_text import Token, tokenize
from .targets import TargetSpec, explicit_target
from .terms import RDF_TYPE, Iri, PrefixMap, Term
from .turtle import RdfSyntaxError


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class ExactPred:
    predicate: str


@dataclass(frozen=True)
class PrefixFilter:
    namespace: str


@dataclass(frozen=True)
class IriFilter:
    pass


IRI_FILTER = IriFilter()

PredicateHolder = ExactPred | PrefixFilter | IriFilter


@dataclass(frozen=True)
class ValueHole:
    pass


@dataclass(frozen=True)
class ListHole:
    pass


VALUE_HOLE = ValueHole()
LIST_HOLE = ListHole()


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class LabelRef:
    label: str


@dataclass(frozen=True)
class PatternEntry:
    holder: "PredicateHolder"
    object: "ObjectHolder"


@dataclass(frozen=True)
class ConstraintPattern:
    entries: tuple[PatternEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise PatternError("empty pattern body")
        seen: set = set()
        for entry in self.entries:
            if entry.holder in seen:
                raise PatternError(f"duplicate predicate holder {describe_holder(entry.holder)}")
            seen.add(entry.holder)

    def filters(self) -> list[PrefixFilter | IriFilter]:
        return [e.holder for e in self.entries if not isinstance(e.holder, ExactPred)]

    def predicates(self) -> list[str]:
        return [e.holder.predicate for e in self.entries if isinstance(e.holder, ExactPred)]


ObjectHolder = VarRef | LabelRef | ValueHole | ListHole | ConstraintPattern


def describe_holder(holder: PredicateHolder) -> str:
    if isinstance(holder, ExactPred):
        return holder.predicate
    if isinstance(holder, PrefixFilter):
        return f"<{holder.namespace}>~"
    return "iri"


@dataclass
class SchemaPattern:
    """Labelled pattern bodies, variable bodies, and per-label samples."""

    labels: dict[str, ConstraintPattern] = field(default_factory=dict)
    variables: dict[str, ConstraintPattern] = field(default_factory=dict)
    samples: dict[str, TargetSpec] = field(default_factory=dict)
    prefixes: dict[str, str] = field(default_factory=dict)

    def check(self, known_labels: Iterable[str] = ()) -> None:
        known = set(known_labels)
        uses: dict[str, int] = {name: 0 for name in self.variables}

        def walk(pattern: ConstraintPattern, origin: str) -> None:
            for entry in pattern.entries:
                obj = entry.object
                if isinstance(obj, VarRef):
                    if obj.name not in self.variables:
                        raise PatternError(f"{origin}: undefined variable {obj.name}")
                    uses[obj.name] += 1
                elif isinstance(obj, LabelRef):
                    if obj.label not in self.labels and obj.label not in known:
                        raise PatternError(f"{origin}: reference to unknown label <{obj.label}>")
                elif isinstance(obj, ConstraintPattern):
                    walk(obj, origin)

        for label, pattern in self.labels.items():
            walk(pattern, f"<{label}>")
        for name, pattern in self.variables.items():
            walk(pattern, name)
        for name, count in uses.items():
            if count != 1:
                raise PatternError(f"variable {name} must be used exactly once, found {count}")
        self.build_order()

    def _refs(self, pattern: ConstraintPattern) -> tuple[set[str], set[str]]:
        """(variables, labels) referenced from a body, including nesting."""
        variables: set[str] = set()
        labels: set[str] = set()
        for entry in pattern.entries:
            obj = entry.object
            if isinstance(obj, VarRef):
                variables.add(obj.name)
            elif isinstance(obj, LabelRef):
                labels.add(obj.label)
            elif isinstance(obj, ConstraintPattern):
                v, l = self._refs(obj)
                variables |= v
                labels |= l
        return variables, labels

    def label_dependencies(self, label: str) -> set[str]:
        """Labels whose samples grow when `label` is instantiated."""
        out: set[str] = set()
        seen_vars: set[str] = set()
        frontier = [self.labels[label]]
        while frontier:
            variables, labels = self._refs(frontier.pop())
            out |= labels
            for name in variables - seen_vars:
                seen_vars.add(name)
                frontier.append(self.variables[name])
        return out

    def build_order(self) -> list[str]:
        """Labels ordered so referencing labels are instantiated first."""
        ts: TopologicalSorter[str] = TopologicalSorter()
        for label in self.labels:
            ts.add(label)
            for dep in sorted(self.label_dependencies(label)):
                ts.add(dep, label)
        try:
            order = list(ts.static_order())
        except CycleError as err:
            cycle = " -> ".join(err.args[1]) if len(err.args) > 1 else ""
            raise PatternError(f"cyclic pattern references: {cycle}") from None
        return [label for label in order if label in self.labels]


def match(pattern: ConstraintPattern, predicate: str) -> PatternEntry | None:
    """Entry whose holder matches `predicate`, or None.

    A literally listed predicate always beats filters; among filters the most
    precise match wins (namespace filters are totally ordered by prefix, the
    bare `iri` filter is least precise).
    """
    best: PatternEntry | None = None
    best_rank: tuple[int, int] = (-1, -1)
    for entry in pattern.entries:
        holder = entry.holder
        if isinstance(holder, ExactPred):
            if holder.predicate == predicate:
                return entry
        elif isinstance(holder, PrefixFilter):
            if predicate.startswith(holder.namespace):
                rank = (1, len(holder.namespace))
                if rank > best_rank:
                    best, best_rank = entry, rank
        else:  # IriFilter matches every predicate
            rank = (0, 0)
            if rank > best_rank:
                best, best_rank = entry, rank
    return best


def pattern_props(pattern: ConstraintPattern, sample: list[Term], g: RdfGraph) -> list[str]:
    """Exact predicates plus sample predicates matching some filter, sorted."""
    out = set(pattern.predicates())
    for q in g.props(sample):
        if match(pattern, q) is not None:
            out.add(q)
    return sorted(out)


# ---------------------------------------------------------------------------
# Text syntax
# ---------------------------------------------------------------------------


class _PatternParser:
    def __init__(self, text: str, known_labels: Iterable[str] = ()):
        self.tokens = tokenize(text)
        self.pos = 0
        self.prefixes = PrefixMap()
        self.known_labels = tuple(known_labels)

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

    def expand(self, tok: Token) -> str:
        name, _, local = tok.value.partition(":")
        if name not in self.prefixes.prefixes:
            raise self.error(f"undeclared prefix '{name}:'", tok)
        return self.prefixes.expand(name, local)

    def parse(self) -> SchemaPattern:
        while self.peek().typ == "name" and self.peek().value.upper() == "PREFIX":
            self.next()
            tok = self.expect("pname")
            name, _, local = tok.value.partition(":")
            if local:
                raise self.error("prefix declaration must end with ':'", tok)
            self.prefixes.declare(name, self.expect("iriref").value)
        out = SchemaPattern(prefixes=dict(self.prefixes.prefixes))
        while self.peek().typ != "eof":
            self.parse_definition(out)
        out.check(known_labels=self.known_labels)
        return out

    def parse_definition(self, out: SchemaPattern) -> None:
        tok = self.next()
        if tok.typ == "iriref":
            label: str | None = tok.value
        elif tok.typ == "pname":
            label = self.expand(tok)
        elif tok.typ == "name":
            label = None
            var = tok.value
        else:
            raise self.error(f"expected label or variable, found {tok.value!r}", tok)
        target: TargetSpec | None = None
        if self.peek().typ == "name" and self.peek().value.upper() == "TARGET":
            if label is None:
                raise self.error("variables cannot carry targets", self.peek())
            self.next()
            target = self.parse_target()
        self.expect("lbrace")
        body = self.parse_body(tok)
        if label is not None:
            if label in out.labels:
                raise self.error(f"label <{label}> defined twice", tok)
            out.labels[label] = body
            if target is not None:
                out.samples[label] = target
        else:
            if var in out.variables:
                raise self.error(f"variable {var} defined twice", tok)
            out.variables[var] = body

    def parse_target(self) -> TargetSpec:
        tok = self.next()
        if tok.typ == "name" and tok.value == "all":
            return TargetSpec(selector="all")
        if tok.typ == "lbracket":
            nodes = []
            while self.peek().typ != "rbracket":
                if self.peek().typ == "comma":
                    self.next()
                    continue
                node = self.next()
                if node.typ == "iriref":
                    nodes.append(Iri(node.value))
                elif node.typ == "pname":
                    nodes.append(Iri(self.expand(node)))
                else:
                    raise self.error("expected IRI in target node list", node)
            self.next()
            return explicit_target(nodes)
        if tok.typ == "pname":
            kind, _, local = tok.value.partition(":")
            if local:
                raise self.error("expected selector like class: or subjects-of:", tok)
            iri_tok = self.next()
            if iri_tok.typ == "iriref":
                iri = iri_tok.value
            elif iri_tok.typ == "pname":
                iri = self.expand(iri_tok)
            else:
                raise self.error("expected IRI after selector", iri_tok)
            if kind not in ("class", "subjects-of"):
                raise self.error(f"unknown selector {kind!r}", tok)
            return TargetSpec(selector=kind, iri=iri)
        raise self.error(f"expected target selector, found {tok.value!r}", tok)

    def parse_body(self, opener: Token) -> ConstraintPattern:
        entries: list[PatternEntry] = []
        while True:
            if self.peek().typ == "rbrace":
                self.next()
                break
            entries.append(self.parse_entry())
            if self.peek().typ == "semi":
                self.next()
                continue
            self.expect("rbrace")
            break
        try:
            return ConstraintPattern(tuple(entries))
        except PatternError as err:
            raise self.error(str(err), opener) from None

    def parse_entry(self) -> PatternEntry:
        tok = self.next()
        holder: PredicateHolder
        if tok.typ == "iriref":
            if self.peek().typ == "tilde":
                self.next()
                holder = PrefixFilter(tok.value)
            else:
                holder = ExactPred(tok.value)
        elif tok.typ == "pname":
            name, _, local = tok.value.partition(":")
            holder = PrefixFilter(self.expand(tok)) if local == "" else ExactPred(self.expand(tok))
        elif tok.typ == "name" and tok.value.lower() == "iri":
            holder = IRI_FILTER
        elif tok.typ == "name" and tok.value == "a":
            holder = ExactPred(RDF_TYPE)
        else:
            raise self.error(f"expected predicate or filter, found {tok.value!r}", tok)
        return PatternEntry(holder, self.parse_object_holder())

    def parse_object_holder(self) -> ObjectHolder:
        tok = self.next()
        if tok.typ == "name" and tok.value == "__":
            return VALUE_HOLE
        if tok.typ == "lbracket":
            hole = self.expect("name")
            if hole.value != "__":
                raise self.error("expected '__' inside list holder", hole)
            self.expect("rbracket")
            return LIST_HOLE
        if tok.typ == "at":
            ref = self.next()
            if ref.typ == "iriref":
                return LabelRef(ref.value)
            if ref.typ == "pname":
                return LabelRef(self.expand(ref))
            if ref.typ == "name":
                return VarRef(ref.value)
            raise self.error("expected label or variable after '@'", ref)
        if tok.typ == "lbrace":
            return self.parse_body(tok)
        raise self.error(f"expected object holder, found {tok.value!r}", tok)


def parse_pattern(text: str, known_labels: Iterable[str] = ()) -> SchemaPattern:
    """Parse pattern text; verifies filter uniqueness, variable use, acyclicity.

    `known_labels` are shape labels defined outside the pattern that label
    references may point to.
    """
    return _PatternParser(text, known_labels).parse()


def print_pattern(pattern: SchemaPattern) -> str:
    pm = PrefixMap(dict(pattern.prefixes))

    def iri(value: str) -> str:
        short = pm.shrink(value)
        return short if short is not None and not short.endswith(":") else f"<{value}>"

    def holder_text(holder: PredicateHolder) -> str:
        if isinstance(holder, ExactPred):
            return iri(holder.predicate)
        if isinstance(holder, PrefixFilter):
            short = pm.shrink(holder.namespace)
            if short is not None and short.endswith(":"):
                return short
            return f"<{holder.namespace}>~"
        return "iri"

    def object_text(obj: ObjectHolder) -> str:
        if isinstance(obj, ValueHole):
            return "__"
        if isinstance(obj, ListHole):
            return "[ __ ]"
        if isinstance(obj, VarRef):
            return f"@{obj.name}"
        if isinstance(obj, LabelRef):
            short = pm.shrink(obj.label)
            ref = short if short is not None else f"<{obj.label}>"
            return f"@{ref}"
        return "{ " + " ; ".join(entry_text(e) for e in obj.entries) + " }"

    def entry_text(entry: PatternEntry) -> str:
        return f"{holder_text(entry.holder)} {object_text(entry.object)}"

    def block(name: str, body: ConstraintPattern, target: TargetSpec | None) -> str:
        head = name
        if target is not None and target.selector in ("class", "subjects-of"):
            head += f" TARGET {target.selector}: <{target.iri}>"
        elif target is not None and target.selector == "all":
            head += " TARGET all"
        lines = [head + " {"]
        for idx, entry in enumerate(body.entries):
            sep = " ;" if idx < len(body.entries) - 1 else ""
            lines.append(f"  {entry_text(entry)}{sep}")
        lines.append("}")
        return "\n".join(lines)

    parts = [f"PREFIX {name}: <{ns}>" for name, ns in sorted(pattern.prefixes.items())]
    head = "\n".join(parts) + ("\n\n" if parts else "")
    blocks = []
    for label, body in pattern.labels.items():
        short = pm.shrink(label)
        name = short if short is not None else f"<{label}>"
        blocks.append(block(name, body, pattern.samples.get(label)))
    for var, body in pattern.variables.items():
        blocks.append(block(var, body, None))
    return head + "\n\n".join(blocks) + "\n"
