"""Interactive session state: schema, targets, edits, and persistence.

A workspace pairs a graph with the schema under construction, per-label
targets, an optional schema pattern, and the log of applied edit
operations. Edits address constraints through paths (conjunct index, choice
branch, nested descent). Changing a triple constraint into a shape
reference automatically feeds the referenced label's target with the
matched neighbours; the same mechanism powers nested re-inference.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import RdfGraph
from .infer import InferenceConfig, InferenceReport, build_from_pattern, infer_uniform
from .lattice import ValueLattice
from .model import (
    Cardinality,
    Choice,
    Conjunct,
    NeighbourhoodConstraint,
    ObjectConstraint,
    Schema,
    SchemaError,
    ShapeConstraint,
    ShapeRef,
    TripleConstraint,
    ValueConstraint,
)
from .pattern import SchemaPattern, parse_pattern, print_pattern
from .scl_text import (
    parse_cardinality_text,
    parse_conjunct_text,
    parse_object_text,
    parse_scl,
    parse_value_text,
    print_scl,
)
from .targets import TargetSpec
from .terms import Iri, Term, n3
from .validate import ValidationReport, validate


class EditError(ValueError):
    """An edit operation names an invalid path or would corrupt the schema."""


Step = tuple[str, int]  # ("conjunct", i) | ("branch", i) | ("nested", 0)


def steps_to_json(steps: Sequence[Step]) -> list:
    return [list(s) for s in steps]


def steps_from_json(data: Iterable) -> tuple[Step, ...]:
    out = []
    for item in data:
        kind, index = item
        if kind not in ("conjunct", "branch", "nested"):
            raise EditError(f"unknown path step kind {kind!r}")
        if int(index) < 0:
            raise EditError(f"negative path index {index}")
        out.append((kind, int(index)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Immutable constraint surgery
# ---------------------------------------------------------------------------


def _descend(nc: NeighbourhoodConstraint, steps: Sequence[Step]) -> NeighbourhoodConstraint:
    """The neighbourhood constraint addressed by a (possibly empty) prefix."""
    if not steps:
        return nc
    kind, index = steps[0]
    if kind != "conjunct" or index >= len(nc.conjuncts):
        raise EditError(f"invalid path step {steps[0]}")
    conjunct = nc.conjuncts[index]
    rest = steps[1:]
    if not rest:
        raise EditError("path prefix must end at a neighbourhood constraint")
    kind2, index2 = rest[0]
    if kind2 == "branch":
        if not isinstance(conjunct, Choice) or index2 >= len(conjunct.branches):
            raise EditError(f"invalid branch step {rest[0]}")
        conjunct = conjunct.branches[index2]
        rest = rest[1:]
        if not rest:
            raise EditError("path prefix must end at a neighbourhood constraint")
        kind2, index2 = rest[0]
    if kind2 != "nested":
        raise EditError(f"expected nested descent, found {rest[0]}")
    if not isinstance(conjunct, TripleConstraint) or not isinstance(
        conjunct.object, NeighbourhoodConstraint
    ):
        raise EditError("path descends into a constraint without a nested object")
    return _descend(conjunct.object, rest[1:])


def _rebuild(nc: NeighbourhoodConstraint, steps: Sequence[Step], fn) -> NeighbourhoodConstraint:
    """Apply `fn` to the addressed conjunct or branch, rebuilding the tree.

    For a conjunct address, `fn` receives the conjunct and returns a list of
    replacements (empty list removes it). For a branch address it receives
    and returns a single triple constraint.
    """
    if not steps:
        raise EditError("empty path")
    kind, index = steps[0]
    if kind != "conjunct":
        raise EditError(f"path must start at a conjunct, found {steps[0]}")
    if index >= len(nc.conjuncts):
        raise EditError(f"no conjunct at index {index}")
    conjunct = nc.conjuncts[index]
    rest = steps[1:]
    if not rest:
        replacements = fn(conjunct)
        new = list(nc.conjuncts)
        new[index : index + 1] = replacements
        return NeighbourhoodConstraint(tuple(new))
    kind2, index2 = rest[0]
    if kind2 == "branch":
        if not isinstance(conjunct, Choice):
            raise EditError("branch step outside a choice")
        if index2 >= len(conjunct.branches):
            raise EditError(f"no branch at index {index2}")
        branch = conjunct.branches[index2]
        deeper = rest[1:]
        if not deeper:
            new_branch = fn(branch)
            if not isinstance(new_branch, TripleConstraint):
                raise EditError("a choice branch must remain a single triple constraint")
            branches = list(conjunct.branches)
            branches[index2] = new_branch
            replacement: Conjunct = Choice(tuple(branches))
        else:
            replacement = Choice(
                tuple(
                    _rebuild_tc(b, deeper, fn) if i == index2 else b
                    for i, b in enumerate(conjunct.branches)
                )
            )
        new = list(nc.conjuncts)
        new[index] = replacement
        return NeighbourhoodConstraint(tuple(new))
    if kind2 == "nested":
        if not isinstance(conjunct, TripleConstraint):
            raise EditError("nested step outside a triple constraint")
        new_tc = _rebuild_tc(conjunct, rest, fn)
        new = list(nc.conjuncts)
        new[index] = new_tc
        return NeighbourhoodConstraint(tuple(new))
    raise EditError(f"unknown path step {rest[0]}")


def _rebuild_tc(tc: TripleConstraint, steps: Sequence[Step], fn) -> TripleConstraint:
    kind, _ = steps[0]
    if kind != "nested":
        raise EditError(f"expected nested descent, found {steps[0]}")
    if not isinstance(tc.object, NeighbourhoodConstraint):
        raise EditError("constraint has no nested object to descend into")
    return TripleConstraint(tc.predicate, _rebuild(tc.object, steps[1:], fn), tc.card)


def _replace_level(
    nc: NeighbourhoodConstraint, prefix: Sequence[Step], new_level: NeighbourhoodConstraint
) -> NeighbourhoodConstraint:
    """Replace the neighbourhood constraint addressed by a nested prefix."""
    if not prefix:
        return new_level
    kind, index = prefix[0]
    if kind != "conjunct" or index >= len(nc.conjuncts):
        raise EditError(f"invalid path step {prefix[0]}")
    conjunct = nc.conjuncts[index]
    rest = list(prefix[1:])
    replacement: Conjunct
    if rest and rest[0][0] == "branch":
        if not isinstance(conjunct, Choice) or rest[0][1] >= len(conjunct.branches):
            raise EditError(f"invalid branch step {rest[0]}")
        j = rest[0][1]
        branches = list(conjunct.branches)
        branches[j] = _replace_level_tc(branches[j], rest[1:], new_level)
        replacement = Choice(tuple(branches))
    else:
        if not isinstance(conjunct, TripleConstraint):
            raise EditError("nested step outside a triple constraint")
        replacement = _replace_level_tc(conjunct, rest, new_level)
    out = list(nc.conjuncts)
    out[index] = replacement
    return NeighbourhoodConstraint(tuple(out))


def _replace_level_tc(
    tc: TripleConstraint, rest: Sequence[Step], new_level: NeighbourhoodConstraint
) -> TripleConstraint:
    if not rest or rest[0][0] != "nested":
        raise EditError("path prefix must descend through nested constraints")
    if not isinstance(tc.object, NeighbourhoodConstraint):
        raise EditError("constraint has no nested object to descend into")
    return TripleConstraint(tc.predicate, _replace_level(tc.object, rest[1:], new_level), tc.card)


# ---------------------------------------------------------------------------
# Edit operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EditOp:
    kind: str
    label: str
    steps: tuple[Step, ...] = ()
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "label": self.label,
            "steps": steps_to_json(self.steps),
            **self.payload,
        }

    @staticmethod
    def from_dict(data: dict) -> "EditOp":
        payload = {k: v for k, v in data.items() if k not in ("kind", "label", "steps")}
        return EditOp(
            kind=data["kind"],
            label=data["label"],
            steps=steps_from_json(data.get("steps", ())),
            payload=payload,
        )


EDIT_KINDS = (
    "add-conjunct",
    "remove-conjunct",
    "add-value-constraint",
    "remove-value-constraint",
    "group-into-choice",
    "split-choice",
    "split-triple-constraint",
    "regroup-triple-constraints",
    "set-cardinality",
    "set-object",
    "infer-nested",
    "add-shape",
    "set-target",
)


def add_conjunct(label: str, conjunct_txt: str, at: Sequence[Step] = (), position: int | None = None) -> EditOp:
    payload = {"conjunct": conjunct_txt, "at": steps_to_json(at)}
    if position is not None:
        payload["position"] = position
    return EditOp("add-conjunct", label, (), payload)


def remove_conjunct(label: str, steps: Sequence[Step]) -> EditOp:
    return EditOp("remove-conjunct", label, tuple(steps))


def add_value_constraint(label: str, value_txt: str) -> EditOp:
    return EditOp("add-value-constraint", label, (), {"value": value_txt})


def remove_value_constraint(label: str, index: int) -> EditOp:
    return EditOp("remove-value-constraint", label, (), {"index": index})


def group_into_choice(label: str, indices: Sequence[int], at: Sequence[Step] = ()) -> EditOp:
    return EditOp("group-into-choice", label, (), {"indices": list(indices), "at": steps_to_json(at)})


def split_choice(label: str, steps: Sequence[Step]) -> EditOp:
    return EditOp("split-choice", label, tuple(steps))


def split_triple_constraint(label: str, steps: Sequence[Step], first_txt: str, second_txt: str) -> EditOp:
    return EditOp(
        "split-triple-constraint", label, tuple(steps), {"first": first_txt, "second": second_txt}
    )


def regroup_triple_constraints(label: str, steps: Sequence[Step], other_index: int) -> EditOp:
    return EditOp("regroup-triple-constraints", label, tuple(steps), {"other": other_index})


def set_cardinality(label: str, steps: Sequence[Step], card_txt: str) -> EditOp:
    return EditOp("set-cardinality", label, tuple(steps), {"cardinality": card_txt})


def set_object(label: str, steps: Sequence[Step], object_txt: str) -> EditOp:
    return EditOp("set-object", label, tuple(steps), {"object": object_txt})


def infer_nested(label: str, steps: Sequence[Step], mode: str = "msc") -> EditOp:
    return EditOp("infer-nested", label, tuple(steps), {"mode": mode})


def add_shape(
    label: str,
    target: TargetSpec,
    pattern_txt: str | None = None,
    mode: str = "msc",
    config: InferenceConfig | None = None,
) -> EditOp:
    payload: dict = {"target": target.to_dict(), "mode": mode}
    if pattern_txt is not None:
        payload["pattern"] = pattern_txt
    if config is not None:
        payload["config"] = {
            "error_rate": str(config.error_rate),
            "neighbour_error_rate": str(config.neighbour_error_rate),
            "shrink_warning_threshold": config.shrink_warning_threshold,
        }
    return EditOp("add-shape", label, (), payload)


def set_target(label: str, target: TargetSpec) -> EditOp:
    return EditOp("set-target", label, (), {"target": target.to_dict()})


@dataclass
class EditResult:
    op: EditOp
    triggered: dict[str, list[Term]] = field(default_factory=dict)
    created_labels: list[str] = field(default_factory=list)
    report: InferenceReport | None = None

    def to_dict(self) -> dict:
        return {
            "op": self.op.to_dict(),
            "triggered": {k: [n3(t) for t in v] for k, v in self.triggered.items()},
            "created_labels": self.created_labels,
            "report": self.report.to_dict() if self.report else None,
        }


# ---------------------------------------------------------------------------
# Workspace
# ---------------------------------------------------------------------------


@dataclass
class GraphSource:
    path: str | None = None
    sha256: str | None = None

    @staticmethod
    def of(path: str) -> "GraphSource":
        with open(path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        return GraphSource(path, digest)


class Workspace:
    """Single-writer session state around an immutable graph."""

    def __init__(
        self,
        graph: RdfGraph,
        schema: Schema | None = None,
        targets: dict[str, TargetSpec] | None = None,
        pattern: SchemaPattern | None = None,
        config: InferenceConfig | None = None,
        namespaces: Iterable[str] = (),
        datatype_order: Iterable[tuple[str, str]] = (),
        source: GraphSource | None = None,
    ):
        self.graph = graph
        self.schema = schema.copy() if schema else Schema(prefixes=dict(graph.prefixes.prefixes))
        self.targets: dict[str, TargetSpec] = dict(targets or {})
        self.pattern = pattern
        self.config = config or InferenceConfig()
        self.namespaces = tuple(namespaces)
        self.datatype_order = tuple((below, above) for below, above in datatype_order)
        self.source = source
        self.edit_log: list[EditOp] = []
        self.load_warnings: list[str] = []
        self._initial = (self.schema.copy(), dict(self.targets))
        self._validation: ValidationReport | None = None
        self._dirty = True

    # -- configuration ------------------------------------------------------

    @property
    def lattice(self) -> ValueLattice:
        return ValueLattice(
            [*self.graph.prefixes.prefixes.values(), *self.namespaces],
            extra_datatype_order=self.datatype_order,
        )

    # -- targets --------------------------------------------------------------

    def resolve_target(self, label: str) -> list[Term]:
        if label not in self.schema.defs:
            raise EditError(f"unknown shape label <{label}>")
        spec = self.targets.get(label)
        return spec.resolve(self.graph) if spec else []

    # -- validation -----------------------------------------------------------

    def validation(self) -> ValidationReport:
        if self._dirty or self._validation is None:
            resolved = {label: self.resolve_target(label) for label in self.schema.defs}
            self._validation = validate(self.graph, self.schema, resolved)
            self._dirty = False
        return self._validation

    def mark_dirty(self) -> None:
        self._dirty = True

    # -- edits ------------------------------------------------------------------

    def apply_edit(self, op: EditOp) -> EditResult:
        if op.kind not in EDIT_KINDS:
            raise EditError(f"unknown edit kind {op.kind!r}")
        handler = getattr(self, "_edit_" + op.kind.replace("-", "_"))
        before = self.schema.copy()
        result: EditResult = handler(op)
        try:
            self.schema.check()
        except SchemaError as err:
            self.schema = before
            raise EditError(str(err)) from None
        self.edit_log.append(op)
        self._dirty = True
        return result

    def undo(self, count: int = 1) -> None:
        """Truncate the edit log and replay from the initial snapshot."""
        if count < 0 or count > len(self.edit_log):
            raise EditError(f"cannot undo {count} of {len(self.edit_log)} edits")
        remaining = self.edit_log[: len(self.edit_log) - count]
        self.schema = self._initial[0].copy()
        self.targets = dict(self._initial[1])
        self.edit_log = []
        self._dirty = True
        for op in remaining:
            self.apply_edit(op)

    def _require_label(self, label: str) -> ShapeConstraint:
        if label not in self.schema.defs:
            raise EditError(f"unknown shape label <{label}>")
        return self.schema.defs[label]

    def _set_neighbourhood(self, label: str, nc: NeighbourhoodConstraint) -> None:
        constraint = self.schema.defs[label]
        self.schema.defs[label] = ShapeConstraint(constraint.values, nc)

    def _parse_conjunct(self, text: str) -> Conjunct:
        return parse_conjunct_text(text, self.schema.prefixes)

    # Individual edit handlers. Each returns an EditResult.

    def _edit_add_conjunct(self, op: EditOp) -> EditResult:
        constraint = self._require_label(op.label)
        conjunct = self._parse_conjunct(op.payload["conjunct"])
        at = steps_from_json(op.payload.get("at", ()))
        level = _descend(constraint.neighbourhood, at)
        position = op.payload.get("position")
        conjuncts = list(level.conjuncts)
        index = len(conjuncts) if position is None else int(position)
        if not 0 <= index <= len(conjuncts):
            raise EditError(f"insert position {index} out of range")
        conjuncts.insert(index, conjunct)
        new_level = NeighbourhoodConstraint(tuple(conjuncts))
        nc = _replace_level(constraint.neighbourhood, at, new_level)
        self._set_neighbourhood(op.label, nc)
        return EditResult(op, triggered=self._propagate_new_refs(op.label, at, [conjunct]))

    def _edit_remove_conjunct(self, op: EditOp) -> EditResult:
        constraint = self._require_label(op.label)
        nc = _rebuild(constraint.neighbourhood, op.steps, lambda item: [])
        self._set_neighbourhood(op.label, nc)
        return EditResult(op)

    def _edit_add_value_constraint(self, op: EditOp) -> EditResult:
        constraint = self._require_label(op.label)
        value = parse_value_text(op.payload["value"], self.schema.prefixes)
        self.schema.defs[op.label] = ShapeConstraint(
            constraint.values + (value,), constraint.neighbourhood
        )
        return EditResult(op)

    def _edit_remove_value_constraint(self, op: EditOp) -> EditResult:
        constraint = self._require_label(op.label)
        index = int(op.payload["index"])
        if not 0 <= index < len(constraint.values):
            raise EditError(f"no value constraint at index {index}")
        values = constraint.values[:index] + constraint.values[index + 1 :]
        self.schema.defs[op.label] = ShapeConstraint(values, constraint.neighbourhood)
        return EditResult(op)

    def _edit_group_into_choice(self, op: EditOp) -> EditResult:
        constraint = self._require_label(op.label)
        at = steps_from_json(op.payload.get("at", ()))
        indices = sorted(set(int(i) for i in op.payload["indices"]))
        if len(indices) < 2:
            raise EditError("grouping needs at least two conjuncts")
        level = _descend(constraint.neighbourhood, at)
        branches = []
        for i in indices:
            if i >= len(level.conjuncts):
                raise EditError(f"no conjunct at index {i}")
            conjunct = level.conjuncts[i]
            if not isinstance(conjunct, TripleConstraint):
                raise EditError("only plain triple constraints can be grouped into a choice")
            branches.append(conjunct)
        try:
            choice = Choice(tuple(branches))
        except SchemaError as err:
            raise EditError(str(err)) from None
        conjuncts = [c for i, c in enumerate(level.conjuncts) if i not in indices]
        conjuncts.insert(indices[0], choice)
        new_level = NeighbourhoodConstraint(tuple(conjuncts))
        nc = _replace_level(constraint.neighbourhood, at, new_level)
        self._set_neighbourhood(op.label, nc)
        return EditResult(op)

    def _edit_split_choice(self, op: EditOp) -> EditResult:
        constraint = self._require_label(op.label)

        def splice(item):
            if not isinstance(item, Choice):
                raise EditError("path does not address a choice")
            return list(item.branches)

        nc = _rebuild(constraint.neighbourhood, op.steps, splice)
        self._set_neighbourhood(op.label, nc)
        return EditResult(op)

    def _edit_split_triple_constraint(self, op: EditOp) -> EditResult:
        constraint = self._require_label(op.label)
        first = self._parse_conjunct(op.payload["first"])
        second = self._parse_conjunct(op.payload["second"])
        if not isinstance(first, TripleConstraint) or not isinstance(second, TripleConstraint):
            raise EditError("split replacements must be triple constraints")

        def splice(item):
            if not isinstance(item, TripleConstraint):
                raise EditError("path does not address a triple constraint")
            if {first.predicate, second.predicate} != {item.predicate}:
                raise EditError("split replacements must keep the original predicate")
            return [first, second]

        nc = _rebuild(constraint.neighbourhood, op.steps, splice)
        self._set_neighbourhood(op.label, nc)
        prefix = tuple(op.steps[:-1])
        return EditResult(
            op, triggered=self._propagate_new_refs(op.label, prefix, [first, second])
        )

    def _edit_regroup_triple_constraints(self, op: EditOp) -> EditResult:
        constraint = self._require_label(op.label)
        at = tuple(op.steps[:-1])
        level = _descend(constraint.neighbourhood, at) if at else constraint.neighbourhood
        kind, index = op.steps[-1]
        other = int(op.payload["other"])
        if kind != "conjunct":
            raise EditError("regrouping addresses plain conjuncts")
        for i in (index, other):
            if i >= len(level.conjuncts) or not isinstance(level.conjuncts[i], TripleConstraint):
                raise EditError(f"no plain triple constraint at index {i}")
        if index == other:
            raise EditError("cannot regroup a constraint with itself")
        a: TripleConstraint = level.conjuncts[index]
        b: TripleConstraint = level.conjuncts[other]
        if a.predicate != b.predicate:
            raise EditError("regrouped constraints must share their predicate")
        merged = TripleConstraint(
            a.predicate, self._merge_objects(a.object, b.object), _card_sum(a.card, b.card)
        )
        conjuncts = list(level.conjuncts)
        first_pos = index if index < other else index - 1
        conjuncts.pop(other)
        conjuncts[first_pos] = merged
        new_level = NeighbourhoodConstraint(tuple(conjuncts))
        nc = _replace_level(constraint.neighbourhood, at, new_level)
        self._set_neighbourhood(op.label, nc)
        return EditResult(op)

    def _merge_objects(self, a: ObjectConstraint, b: ObjectConstraint) -> ObjectConstraint:
        if a == b:
            return a
        if isinstance(a, ValueConstraint) and isinstance(b, ValueConstraint):
            return self.lattice.join([a, b])
        raise EditError("cannot merge object constraints of different kinds")

    def _edit_set_cardinality(self, op: EditOp) -> EditResult:
        constraint = self._require_label(op.label)
        card = parse_cardinality_text(op.payload["cardinality"])

        def swap(item):
            if not isinstance(item, TripleConstraint):
                raise EditError("path does not address a triple constraint")
            new = TripleConstraint(item.predicate, item.object, card)
            return new if _is_branch(op.steps) else [new]

        nc = _rebuild(constraint.neighbourhood, op.steps, swap)
        self._set_neighbourhood(op.label, nc)
        return EditResult(op)

    def _edit_set_object(self, op: EditOp) -> EditResult:
        constraint = self._require_label(op.label)
        obj = parse_object_text(op.payload["object"], self.schema.prefixes)
        changed: list[TripleConstraint] = []

        def swap(item):
            if not isinstance(item, TripleConstraint):
                raise EditError("path does not address a triple constraint")
            new = TripleConstraint(item.predicate, obj, item.card)
            changed.append(new)
            return new if _is_branch(op.steps) else [new]

        nc = _rebuild(constraint.neighbourhood, op.steps, swap)
        self._set_neighbourhood(op.label, nc)
        return EditResult(
            op, triggered=self._propagate_new_refs(op.label, _nested_prefix(op.steps), changed)
        )

    def _edit_infer_nested(self, op: EditOp) -> EditResult:
        constraint = self._require_label(op.label)
        mode = op.payload.get("mode", "msc")
        nodes = self._nodes_at(op.label, _nested_prefix(op.steps))

        def swap(item):
            if not isinstance(item, TripleConstraint):
                raise EditError("path does not address a triple constraint")
            neighbours = self.graph.p_neighbour_set(nodes, item.predicate)
            uniform = infer_uniform(self.graph, neighbours, self.lattice, self.config, mode)
            new = TripleConstraint(
                item.predicate, uniform.to_shape_constraint().neighbourhood, item.card
            )
            return new if _is_branch(op.steps) else [new]

        nc = _rebuild(constraint.neighbourhood, op.steps, swap)
        self._set_neighbourhood(op.label, nc)
        return EditResult(op)

    def _edit_add_shape(self, op: EditOp) -> EditResult:
        if op.label in self.schema.defs:
            raise EditError(f"shape <{op.label}> already exists")
        target = TargetSpec.from_dict(op.payload["target"])
        mode = op.payload.get("mode", "msc")
        pattern_txt = op.payload.get("pattern")
        config = self.config
        if "config" in op.payload:
            raw = op.payload["config"]
            config = InferenceConfig(
                error_rate=Fraction(raw["error_rate"]),
                neighbour_error_rate=Fraction(raw["neighbour_error_rate"]),
                shrink_warning_threshold=int(raw.get("shrink_warning_threshold", 5)),
            )
        result = EditResult(op)
        if pattern_txt is None and self.pattern and op.label in self.pattern.labels:
            # The workspace pattern supplies the body; its samples mirror the
            # targets, so the op's target becomes the label's sample.
            parsed = self._subpattern(op.label)
        elif pattern_txt is None:
            nodes = target.resolve(self.graph)
            uniform = infer_uniform(self.graph, nodes, self.lattice, config, mode)
            self.schema.defs[op.label] = uniform.to_shape_constraint()
            self.targets[op.label] = target
            result.created_labels = [op.label]
            result.report = InferenceReport(sample_sizes={op.label: len(nodes)})
            return result
        else:
            parsed = parse_pattern(pattern_txt, known_labels=set(self.schema.defs))
        if set(parsed.labels) != {op.label}:
            raise EditError("the pattern must define exactly the new label")
        parsed.samples[op.label] = target
        parsed.prefixes.update(self.schema.prefixes)
        schema, targets, report = build_from_pattern(
            self.graph,
            parsed,
            self.lattice,
            config,
            mode,
            external_labels=set(self.schema.defs),
        )
        for label, constraint in schema.defs.items():
            if label in self.schema.defs:
                raise EditError(f"pattern-created shape <{label}> collides with an existing one")
            self.schema.defs[label] = constraint
            self.targets[label] = targets[label]
        for label, nodes in report.external_additions.items():
            spec = self.targets.get(label, TargetSpec())
            self.targets[label] = spec.with_added(nodes)
            result.triggered.setdefault(label, []).extend(nodes)
        result.created_labels = list(schema.defs)
        result.report = report
        return result

    def _edit_set_target(self, op: EditOp) -> EditResult:
        self._require_label(op.label)
        self.targets[op.label] = TargetSpec.from_dict(op.payload["target"])
        return EditResult(op)

    def _subpattern(self, label: str) -> SchemaPattern:
        """One label of the workspace pattern plus the variables it reaches."""
        assert self.pattern is not None
        from .pattern import ConstraintPattern, VarRef

        needed: dict[str, ConstraintPattern] = {}

        def collect(body: ConstraintPattern) -> None:
            for entry in body.entries:
                obj = entry.object
                if isinstance(obj, VarRef) and obj.name not in needed:
                    needed[obj.name] = self.pattern.variables[obj.name]
                    collect(needed[obj.name])
                elif isinstance(obj, ConstraintPattern):
                    collect(obj)

        body = self.pattern.labels[label]
        collect(body)
        sub = SchemaPattern(
            labels={label: body},
            variables=needed,
            samples={},
            prefixes={**self.schema.prefixes, **self.pattern.prefixes},
        )
        return sub

    # -- triggered target propagation -------------------------------------------

    def _nodes_at(self, label: str, prefix: Sequence[Step]) -> list[Term]:
        """Resolve the focus node set of the neighbourhood level addressed by
        `prefix` (descending through nested constraints)."""
        constraint = self._require_label(label)
        nodes = self.resolve_target(label)
        nc = constraint.neighbourhood
        steps = list(prefix)
        while steps:
            kind, index = steps.pop(0)
            if kind != "conjunct" or index >= len(nc.conjuncts):
                raise EditError("invalid path prefix")
            conjunct = nc.conjuncts[index]
            if steps and steps[0][0] == "branch":
                if not isinstance(conjunct, Choice):
                    raise EditError("branch step outside a choice")
                conjunct = conjunct.branches[steps.pop(0)[1]]
            if not steps or steps.pop(0)[0] != "nested":
                raise EditError("path prefix must descend through nested constraints")
            if not isinstance(conjunct, TripleConstraint) or not isinstance(
                conjunct.object, NeighbourhoodConstraint
            ):
                raise EditError("path descends into a constraint without a nested object")
            nodes = [
                t for t in self.graph.p_neighbour_set(nodes, conjunct.predicate)
            ]
            nc = conjunct.object
        return nodes

    def _propagate_new_refs(
        self, label: str, prefix: Sequence[Step], changed: Iterable[Conjunct]
    ) -> dict[str, list[Term]]:
        """Feed referenced labels with the IRI neighbours of the focus nodes."""
        refs: list[tuple[str, str]] = []  # (predicate, referenced label)
        for conjunct in changed:
            branches = conjunct.branches if isinstance(conjunct, Choice) else (conjunct,)
            for tc in branches:
                if isinstance(tc.object, ShapeRef):
                    refs.append((tc.predicate, tc.object.label))
        if not refs:
            return {}
        nodes = self._nodes_at(label, prefix)
        triggered: dict[str, list[Term]] = {}
        for predicate, ref_label in refs:
            if ref_label not in self.schema.defs:
                raise EditError(f"reference to unknown shape <{ref_label}>")
            neighbours = [
                t
                for t in self.graph.p_neighbour_set(nodes, predicate)
                if isinstance(t, Iri)
            ]
            if not neighbours:
                continue
            spec = self.targets.get(ref_label, TargetSpec())
            fresh = [t for t in neighbours if t not in spec.include and t not in spec.exclude]
            if not fresh:
                continue
            self.targets[ref_label] = spec.with_added(fresh)
            triggered.setdefault(ref_label, []).extend(fresh)
        return triggered

    def propagate_targets(self) -> dict[str, list[Term]]:
        """Close target propagation transitively over all shape references."""
        triggered: dict[str, list[Term]] = {}
        changed = True
        while changed:
            changed = False
            for label in list(self.schema.defs):
                constraint = self.schema.defs[label]
                nodes = self.resolve_target(label)
                for tc, prefix in _walk_ref_constraints(constraint.neighbourhood):
                    focus = self._nodes_at(label, prefix) if prefix else nodes
                    neighbours = [
                        t
                        for t in self.graph.p_neighbour_set(focus, tc.predicate)
                        if isinstance(t, Iri)
                    ]
                    ref_label = tc.object.label
                    spec = self.targets.get(ref_label, TargetSpec())
                    fresh = [
                        t for t in neighbours if t not in spec.include and t not in spec.exclude
                    ]
                    if fresh:
                        self.targets[ref_label] = spec.with_added(fresh)
                        triggered.setdefault(ref_label, []).extend(fresh)
                        changed = True
        if triggered:
            self._dirty = True
        return triggered

    # -- persistence ----------------------------------------------------------------

    def save(self) -> dict:
        initial_schema, initial_targets = self._initial
        doc = {
            "format_version": 1,
            "graph": {
                "path": self.source.path if self.source else None,
                "sha256": self.source.sha256 if self.source else None,
            },
            "schema": print_scl(self.schema),
            "targets": {label: spec.to_dict() for label, spec in self.targets.items()},
            "pattern": print_pattern(self.pattern) if self.pattern else None,
            "config": {
                "namespaces": list(self.namespaces),
                "datatype_order": [list(edge) for edge in self.datatype_order],
                "error_rate": str(self.config.error_rate),
                "neighbour_error_rate": str(self.config.neighbour_error_rate),
                "shrink_warning_threshold": self.config.shrink_warning_threshold,
                "list_value_cap": self.config.list_value_cap,
            },
            "initial": {
                "schema": print_scl(initial_schema),
                "targets": {label: spec.to_dict() for label, spec in initial_targets.items()},
            },
            "edit_log": [op.to_dict() for op in self.edit_log],
        }
        return doc

    @staticmethod
    def load(doc: dict, graph: RdfGraph, source: GraphSource | None = None) -> "Workspace":
        if doc.get("format_version") != 1:
            raise ValueError(f"unsupported workspace format {doc.get('format_version')!r}")
        cap = doc["config"].get("list_value_cap")
        config = InferenceConfig(
            error_rate=Fraction(doc["config"]["error_rate"]),
            neighbour_error_rate=Fraction(doc["config"]["neighbour_error_rate"]),
            shrink_warning_threshold=int(doc["config"]["shrink_warning_threshold"]),
            list_value_cap=int(cap) if cap is not None else None,
        )
        # An empty schema prints as empty text; seed the graph's prefixes the
        # same way a fresh workspace would.
        initial_schema = parse_scl(doc["initial"]["schema"]) if doc["initial"]["schema"] else None
        initial_targets = {
            label: TargetSpec.from_dict(spec)
            for label, spec in doc["initial"]["targets"].items()
        }
        pattern = parse_pattern(doc["pattern"]) if doc.get("pattern") else None
        w = Workspace(
            graph,
            schema=initial_schema,
            targets=initial_targets,
            pattern=pattern,
            config=config,
            namespaces=doc["config"].get("namespaces", ()),
            datatype_order=[tuple(edge) for edge in doc["config"].get("datatype_order", ())],
            source=source,
        )
        stored = doc.get("graph") or {}
        if source and stored.get("sha256") and stored["sha256"] != source.sha256:
            w.load_warnings.append(
                "graph content changed since the workspace was saved; caches invalidated"
            )
        for op_data in doc.get("edit_log", ()):
            w.apply_edit(EditOp.from_dict(op_data))
        saved_schema = doc.get("schema", "")
        if saved_schema and print_scl(w.schema) != saved_schema:
            w.load_warnings.append("replayed schema differs from the stored schema text")
        w._dirty = True
        return w


def _is_branch(steps: Sequence[Step]) -> bool:
    return bool(steps) and steps[-1][0] == "branch"


def _nested_prefix(steps: Sequence[Step]) -> tuple[Step, ...]:
    """Path prefix addressing the neighbourhood level that holds the leaf."""
    if _is_branch(steps):
        return tuple(steps[:-2])
    return tuple(steps[:-1])


def _card_sum(a: Cardinality, b: Cardinality) -> Cardinality:
    upper = None if a.max is None or b.max is None else a.max + b.max
    return Cardinality(a.min + b.min, upper)


def _walk_ref_constraints(
    nc: NeighbourhoodConstraint, prefix: tuple[Step, ...] = ()
) -> list[tuple[TripleConstraint, tuple[Step, ...]]]:
    out = []
    for i, conjunct in enumerate(nc.conjuncts):
        if isinstance(conjunct, Choice):
            for j, branch in enumerate(conjunct.branches):
                if isinstance(branch.object, ShapeRef):
                    out.append((branch, prefix))
                elif isinstance(branch.object, NeighbourhoodConstraint):
                    deeper = prefix + (("conjunct", i), ("branch", j), ("nested", 0))
                    out.extend(_walk_ref_constraints(branch.object, deeper))
        else:
            if isinstance(conjunct.object, ShapeRef):
                out.append((conjunct, prefix))
            elif isinstance(conjunct.object, NeighbourhoodConstraint):
                deeper = prefix + (("conjunct", i), ("nested", 0))
                out.extend(_walk_ref_constraints(conjunct.object, deeper))
    return out
