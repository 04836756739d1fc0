"""Automatic constraint construction.

Two flavours per sample set: the most specific uniform constraint (`msc`),
satisfied by every sample node, and its noise-tolerant counterpart (`lac`),
chosen by threshold voting and satisfied by at least a `1 - error_rate`
share of the nodes. Schema patterns drive the construction of nested
constraints and referenced shapes; an ontology's domain/range axioms can be
turned into such a pattern.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .graph import RdfGraph
from .lattice import (
    ValueLattice,
    card_consensus,
    card_for_count,
    card_join_counts,
)
from .model import (
    ANY,
    Cardinality,
    NeighbourhoodConstraint,
    Schema,
    ShapeConstraint,
    ShapeRef,
    TripleConstraint,
    UniformConstraint,
    UniformEntry,
    ValueConstraint,
    ValueSet,
)
from .pattern import (
    ConstraintPattern,
    LabelRef,
    ListHole,
    SchemaPattern,
    ValueHole,
    VarRef,
    match,
    pattern_props,
)
from .targets import TargetSpec, explicit_target
from .terms import Blank, Iri, Term, local_name, term_key


class InferenceError(ValueError):
    pass


@dataclass(frozen=True)
class InferenceConfig:
    """Error rates for consensus voting and reporting thresholds.

    `error_rate` bounds the share of sample nodes allowed to disagree with a
    chosen constraint; `neighbour_error_rate` plays the same role among the
    neighbours of one node (defaults to `error_rate`). Both must stay below
    0.5 so the acceptance threshold stays above half the voters.
    """

    error_rate: Fraction = Fraction(0)
    neighbour_error_rate: Fraction | None = None
    shrink_warning_threshold: int = 5
    list_value_cap: int | None = None

    def __post_init__(self) -> None:
        e = _as_fraction(self.error_rate)
        object.__setattr__(self, "error_rate", e)
        e2 = self.neighbour_error_rate
        e2 = e if e2 is None else _as_fraction(e2)
        object.__setattr__(self, "neighbour_error_rate", e2)
        for rate in (e, e2):
            if not 0 <= rate < Fraction(1, 2):
                raise InferenceError(f"error rate must be in [0, 0.5), got {rate}")

    @property
    def node_threshold(self) -> Fraction:
        return 1 - self.error_rate

    @property
    def neighbour_threshold(self) -> Fraction:
        return 1 - self.neighbour_error_rate


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class InferenceWarning:
    kind: str  # shrinking-sample | dropped-predicate | empty-sample | list-hole
    label: str
    predicate: str | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "label": self.label,
            "predicate": self.predicate,
            "detail": self.detail,
        }


@dataclass
class InferenceReport:
    sample_sizes: dict[str, int] = field(default_factory=dict)
    warnings: list[InferenceWarning] = field(default_factory=list)
    #: Nodes appended to labels defined outside the pattern (label references
    #: resolved against an enclosing schema).
    external_additions: dict[str, list] = field(default_factory=dict)

    @property
    def dropped_predicates(self) -> list[tuple[str, str]]:
        return [
            (w.label, w.predicate)
            for w in self.warnings
            if w.kind == "dropped-predicate" and w.predicate
        ]

    def warn(self, kind: str, label: str, predicate: str | None = None, detail: str = "") -> None:
        self.warnings.append(InferenceWarning(kind, label, predicate, detail))

    def to_dict(self) -> dict:
        from .terms import n3

        return {
            "sample_sizes": self.sample_sizes,
            "warnings": [w.to_dict() for w in self.warnings],
            "external_additions": {
                label: [n3(t) for t in nodes]
                for label, nodes in self.external_additions.items()
            },
        }


# ---------------------------------------------------------------------------
# Uniform constraints from plain samples
# ---------------------------------------------------------------------------


def msc(g: RdfGraph, sample: Iterable[Term], lattice: ValueLattice) -> UniformConstraint:
    """Most specific uniform constraint satisfied by every sample node."""
    nodes = sorted(set(sample), key=term_key)
    entries = []
    for p in sorted(g.props(nodes)):
        value = lattice.join_terms(g.p_neighbour_set(nodes, p))
        card = card_join_counts([g.count(n, p) for n in nodes])
        entries.append(UniformEntry(p, value, card))
    return UniformConstraint(tuple(entries))


def node_preference(
    g: RdfGraph, node: Term, predicate: str, lattice: ValueLattice, threshold: Fraction
) -> ValueConstraint:
    """Preferred value constraint of one node: consensus of its neighbours."""
    votes = Counter(lattice.classify(o) for o in g.objects(node, predicate))
    return lattice.consensus(votes, threshold)


def lac(
    g: RdfGraph,
    sample: Iterable[Term],
    lattice: ValueLattice,
    config: InferenceConfig,
) -> UniformConstraint:
    """Consensus uniform constraint tolerating `config.error_rate` noise.

    With error rate 0 this equals :func:`msc`.
    """
    nodes = sorted(set(sample), key=term_key)
    entries = []
    for p in sorted(g.props(nodes)):
        voters = [n for n in nodes if g.count(n, p) > 0]
        value_votes = Counter(
            node_preference(g, n, p, lattice, config.neighbour_threshold) for n in voters
        )
        value = lattice.consensus(value_votes, config.node_threshold)
        card_votes = Counter(card_for_count(g.count(n, p)) for n in nodes)
        card = card_consensus(card_votes, config.node_threshold)
        entries.append(UniformEntry(p, value, card))
    return UniformConstraint(tuple(entries))


def infer_uniform(
    g: RdfGraph,
    sample: Iterable[Term],
    lattice: ValueLattice,
    config: InferenceConfig | None = None,
    mode: str = "msc",
) -> UniformConstraint:
    if mode == "msc":
        return msc(g, sample, lattice)
    if mode == "lac":
        return lac(g, sample, lattice, config or InferenceConfig())
    raise InferenceError(f"unknown inference mode {mode!r}")


# ---------------------------------------------------------------------------
# Pattern-driven construction
# ---------------------------------------------------------------------------


class _PatternRun:
    def __init__(
        self,
        g: RdfGraph,
        pattern: SchemaPattern,
        lattice: ValueLattice,
        config: InferenceConfig,
        mode: str,
        external_labels: Iterable[str] = (),
    ):
        if mode not in ("msc", "lac"):
            raise InferenceError(f"unknown inference mode {mode!r}")
        self.external = set(external_labels)
        pattern.check(known_labels=self.external)
        self.g = g
        self.pattern = pattern
        self.lattice = lattice
        self.config = config
        self.mode = mode
        self.report = InferenceReport()
        self.defs: dict[str, ShapeConstraint] = {}
        self.targets: dict[str, TargetSpec] = {}
        self.appended: dict[str, list[Term]] = {
            label: [] for label in (*pattern.labels, *sorted(self.external))
        }
        self.fresh_names: set[str] = set(pattern.labels) | self.external

    # -- helpers -------------------------------------------------------------

    def _value_of(self, neighbours: list[Term], nodes: list[Term], predicate: str) -> ValueConstraint:
        if self.mode == "msc":
            return self.lattice.join_terms(neighbours)
        voters = [n for n in nodes if self.g.count(n, predicate) > 0]
        votes = Counter(
            node_preference(self.g, n, predicate, self.lattice, self.config.neighbour_threshold)
            for n in voters
        )
        return self.lattice.consensus(votes, self.config.node_threshold)

    def _card_of(self, nodes: list[Term], predicate: str) -> Cardinality:
        counts = [self.g.count(n, predicate) for n in nodes]
        if self.mode == "msc":
            return card_join_counts(counts)
        votes = Counter(card_for_count(c) for c in counts)
        return card_consensus(votes, self.config.node_threshold)

    def _list_values(self, label: str, predicate: str, nodes: list[Term]) -> ValueConstraint:
        neighbours = self.g.p_neighbour_set(nodes, predicate)
        kept = [t for t in neighbours if not isinstance(t, Blank)]
        if len(kept) < len(neighbours):
            self.report.warn(
                "list-hole", label, predicate, "blank nodes omitted from enumerated values"
            )
        if self.mode == "lac" and self.config.error_rate > 0:
            # Drop values attributable to at most an error-rate share of nodes.
            limit = self.config.error_rate * len(nodes)
            kept = [
                t
                for t in kept
                if sum(1 for n in nodes if t in self.g.objects(n, predicate)) > limit
            ]
        cap = self.config.list_value_cap
        if cap is not None and len(kept) > cap:
            self.report.warn(
                "list-hole", label, predicate,
                f"{len(kept)} values exceed cap {cap}; falling back to a value join",
            )
            return self.lattice.join_terms(neighbours)
        if not kept:
            if neighbours:
                self.report.warn(
                    "list-hole", label, predicate, "no enumerable values; using a value join"
                )
                return self.lattice.join_terms(neighbours)
            self.report.warn("empty-sample", label, predicate, "no values to enumerate")
            return ANY
        return ValueSet(tuple(kept))

    def _fresh_label(self, variable: str, predicate: str) -> str:
        base = f"{variable}_{local_name(predicate)}"
        name = base
        counter = 2
        while name in self.fresh_names:
            name = f"{base}_{counter}"
            counter += 1
        self.fresh_names.add(name)
        return name

    def _check_shrinking(self, label: str, predicate: str, size: int) -> None:
        if 0 < size < self.config.shrink_warning_threshold:
            self.report.warn(
                "shrinking-sample",
                label,
                predicate,
                f"sample of {size} node(s) is below threshold "
                f"{self.config.shrink_warning_threshold}",
            )

    # -- core ----------------------------------------------------------------

    def build_body(self, label: str, body: ConstraintPattern, nodes: list[Term]) -> NeighbourhoodConstraint:
        if not nodes:
            self.report.warn("empty-sample", label, None, "no sample nodes")
            return NeighbourhoodConstraint(())
        conjuncts: list[TripleConstraint] = []
        matched = pattern_props(body, nodes, self.g)
        for q in sorted(self.g.props(nodes)):
            if q not in matched:
                self.report.warn(
                    "dropped-predicate", label, q, "predicate matches no pattern entry"
                )
        for q in matched:
            entry = match(body, q)
            assert entry is not None  # matched predicates always have an entry
            neighbours = self.g.p_neighbour_set(nodes, q)
            card = self._card_of(nodes, q)
            obj = self.build_object(label, q, entry.object, neighbours, nodes)
            conjuncts.append(TripleConstraint(q, obj, card))
        return NeighbourhoodConstraint(tuple(conjuncts))

    def build_object(
        self,
        label: str,
        predicate: str,
        holder,
        neighbours: list[Term],
        nodes: list[Term],
    ):
        if isinstance(holder, ValueHole):
            if not neighbours:
                self.report.warn("empty-sample", label, predicate, "no neighbours to classify")
                return ANY
            return self._value_of(neighbours, nodes, predicate)
        if isinstance(holder, ListHole):
            return self._list_values(label, predicate, nodes)
        if isinstance(holder, ConstraintPattern):
            self._check_shrinking(label, predicate, len(neighbours))
            return self.build_body(label, holder, neighbours)
        if isinstance(holder, VarRef):
            fresh = self._fresh_label(holder.name, predicate)
            self._check_shrinking(fresh, predicate, len(neighbours))
            self.report.sample_sizes[fresh] = len(neighbours)
            body = self.build_body(fresh, self.pattern.variables[holder.name], neighbours)
            self.defs[fresh] = ShapeConstraint((), body)
            self.targets[fresh] = explicit_target(neighbours)
            return ShapeRef(fresh)
        if isinstance(holder, LabelRef):
            added = [t for t in neighbours if isinstance(t, Iri)]
            self.appended[holder.label].extend(added)
            self._check_shrinking(holder.label, predicate, len(added))
            return ShapeRef(holder.label)
        raise InferenceError(f"unknown object holder {holder!r}")

    def run(self) -> tuple[Schema, dict[str, TargetSpec], InferenceReport]:
        order = self.pattern.build_order()
        for label in order:
            spec = self.pattern.samples.get(label)
            if spec is None and not self.appended[label]:
                raise InferenceError(f"label <{label}> has no sample")
            base = spec.resolve(self.g) if spec is not None else []
            nodes = sorted(set(base) | set(self.appended[label]), key=term_key)
            self.report.sample_sizes[label] = len(nodes)
            body = self.build_body(label, self.pattern.labels[label], nodes)
            self.defs[label] = ShapeConstraint((), body)
            base_spec = spec if spec is not None else explicit_target(())
            extra = [t for t in self.appended[label] if t not in base_spec.include]
            self.targets[label] = base_spec.with_added(extra) if extra else base_spec
        for label in sorted(self.external):
            if self.appended[label]:
                nodes = sorted(set(self.appended[label]), key=term_key)
                self.report.external_additions[label] = nodes
        # Deterministic schema order: pattern labels first, then fresh labels.
        ordered: dict[str, ShapeConstraint] = {}
        for label in self.pattern.labels:
            ordered[label] = self.defs[label]
        for label in self.defs:
            if label not in ordered:
                ordered[label] = self.defs[label]
        prefixes = dict(self.g.prefixes.prefixes)
        prefixes.update(self.pattern.prefixes)
        schema = Schema(ordered, prefixes)
        if not self.external:  # references to external labels resolve later
            schema.check()
        return schema, self.targets, self.report


def build_from_pattern(
    g: RdfGraph,
    pattern: SchemaPattern,
    lattice: ValueLattice,
    config: InferenceConfig | None = None,
    mode: str = "msc",
    external_labels: Iterable[str] = (),
) -> tuple[Schema, dict[str, TargetSpec], InferenceReport]:
    """Instantiate a schema pattern over its samples.

    Fresh labels are created for variable references (named after the
    variable and the matched predicate's local name), label references are
    wired as-is with matched neighbours appended to the referenced label's
    sample, and predicates matching no entry are dropped and reported.
    `external_labels` may be referenced without being built; nodes appended
    to them are reported in `external_additions`.
    """
    run = _PatternRun(g, pattern, lattice, config or InferenceConfig(), mode, external_labels)
    return run.run()


def uniform_schema(
    g: RdfGraph,
    label: str,
    target: TargetSpec,
    lattice: ValueLattice,
    config: InferenceConfig | None = None,
    mode: str = "msc",
) -> tuple[Schema, dict[str, TargetSpec], InferenceReport]:
    """Single-label schema from a plain sample (no pattern)."""
    nodes = target.resolve(g)
    report = InferenceReport(sample_sizes={label: len(nodes)})
    constraint = infer_uniform(g, nodes, lattice, config, mode)
    schema = Schema({label: constraint.to_shape_constraint()}, dict(g.prefixes.prefixes))
    return schema, {label: target}, report


# ---------------------------------------------------------------------------
# Ontology extraction
# ---------------------------------------------------------------------------


def pattern_from_ontology(ontology: RdfGraph, inherit: bool = False) -> SchemaPattern:
    """Derive a schema pattern from rdfs:domain / rdfs:range / rdfs:subClassOf.

    One label per class that is the domain of some property; a property's
    entry references the range class's label when that class has a shape,
    and is a plain value hole otherwise. With `inherit`, properties of
    superclasses are repeated on subclass shapes.
    """
    from .terms import RDFS_DOMAIN, RDFS_RANGE, RDFS_SUBCLASSOF

    domains: dict[str, list[str]] = {}
    ranges: dict[str, str] = {}
    superclasses: dict[str, set[str]] = {}
    for t in ontology.triples:
        if not isinstance(t.subject, Iri) or not isinstance(t.object, Iri):
            continue
        if t.predicate == RDFS_DOMAIN:
            domains.setdefault(t.subject.value, []).append(t.object.value)
        elif t.predicate == RDFS_RANGE:
            ranges[t.subject.value] = t.object.value
        elif t.predicate == RDFS_SUBCLASSOF:
            superclasses.setdefault(t.subject.value, set()).add(t.object.value)

    def ancestors(cls: str) -> set[str]:
        out: set[str] = set()
        frontier = [cls]
        while frontier:
            for up in superclasses.get(frontier.pop(), ()):
                if up not in out:
                    out.add(up)
                    frontier.append(up)
        return out

    props_by_class: dict[str, list[str]] = {}
    for prop, classes in domains.items():
        for cls in classes:
            props_by_class.setdefault(cls, []).append(prop)
    if inherit:
        all_classes = set(props_by_class) | set(superclasses) | {
            c for ups in superclasses.values() for c in ups
        }
        inherited: dict[str, list[str]] = {}
        for cls in all_classes:
            extra = [p for up in ancestors(cls) for p in props_by_class.get(up, ())]
            if extra:
                inherited.setdefault(cls, []).extend(extra)
        for cls, props in inherited.items():
            props_by_class.setdefault(cls, []).extend(props)

    # Only classes with at least one property yield a shape; a range class
    # without own properties would need an empty pattern body, so references
    # to it fall back to value holes.
    shaped = set(props_by_class)

    labels: dict[str, str] = {}
    used: set[str] = set()
    for cls in sorted(shaped):
        base = local_name(cls)
        name = base
        counter = 2
        while name in used:
            name = f"{base}_{counter}"
            counter += 1
        used.add(name)
        labels[cls] = name

    from .pattern import ExactPred, PatternEntry, VALUE_HOLE

    pattern = SchemaPattern(prefixes=dict(ontology.prefixes.prefixes))
    for cls in sorted(shaped):
        entries = []
        for prop in sorted(set(props_by_class.get(cls, ()))):
            rng = ranges.get(prop)
            if rng is not None and rng in labels:
                entries.append(PatternEntry(ExactPred(prop), LabelRef(labels[rng])))
            else:
                entries.append(PatternEntry(ExactPred(prop), VALUE_HOLE))
        pattern.labels[labels[cls]] = ConstraintPattern(tuple(entries))
        pattern.samples[labels[cls]] = TargetSpec(selector="class", iri=cls)
    pattern.check()
    return pattern
