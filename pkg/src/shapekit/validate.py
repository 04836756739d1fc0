"""Evaluation of nodes and graphs against shape-constraint schemas.

Shapes are open: only triples whose predicate is mentioned in the constraint
are checked. A choice is satisfied when exactly one branch is satisfied.
Repeated predicates among plain triple constraints are resolved by searching
for an assignment of each triple to exactly one constraint.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby
from typing import Iterable, Mapping

from .graph import RdfGraph
from .lattice import NUMERIC_CHAIN
from .model import (
    ANY,
    Choice,
    IRI,
    IriPrefix,
    Kind,
    LIT,
    NeighbourhoodConstraint,
    NONLIT,
    ObjectConstraint,
    Schema,
    ShapeConstraint,
    ShapeRef,
    TripleConstraint,
    ValueConstraint,
    ValueSet,
    XsdType,
)
from .terms import Blank, Iri, Literal, Term, n3, term_key


class AssignmentSearchWarning(UserWarning):
    pass


#: Above this many candidate triple-to-constraint assignments a warning is
#: emitted; the search itself stays exhaustive.
ASSIGNMENT_WARN_LIMIT = 64

_INTEGER_RANGES = {
    "byte": (-(2**7), 2**7 - 1),
    "short": (-(2**15), 2**15 - 1),
    "int": (-(2**31), 2**31 - 1),
    "long": (-(2**63), 2**63 - 1),
    "integer": None,
}

_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")


def _numeric_value_valid(lexical: str, datatype: str) -> bool:
    local = datatype.rsplit("#", 1)[-1]
    if not _DECIMAL_RE.match(lexical):
        return False
    if local == "decimal":
        return True
    value = Fraction(lexical)
    if value.denominator != 1:
        return False
    bounds = _INTEGER_RANGES[local]
    return bounds is None or bounds[0] <= value <= bounds[1]


def satisfies_value(term: Term, vc: ValueConstraint) -> bool:
    """Does a single node satisfy a value constraint?

    Datatype constraints over the built-in numeric chain accept any numeric
    literal whose value is valid for the constrained type, so an
    `xsd:integer` literal like 1564 conforms to an `xsd:int` constraint.
    """
    if isinstance(vc, Kind):
        if vc == ANY:
            return True
        if vc == LIT:
            return isinstance(term, Literal)
        if vc == NONLIT:
            return not isinstance(term, Literal)
        if vc == IRI:
            return isinstance(term, Iri)
        return isinstance(term, Blank)
    if isinstance(vc, XsdType):
        if not isinstance(term, Literal):
            return False
        if term.datatype == vc.datatype:
            return True
        if vc.datatype in NUMERIC_CHAIN and term.datatype in NUMERIC_CHAIN:
            # Syntactically derived types always pass; otherwise check the value.
            chain = list(NUMERIC_CHAIN)
            if chain.index(term.datatype) < chain.index(vc.datatype):
                return True
            return _numeric_value_valid(term.lexical, vc.datatype)
        return False
    if isinstance(vc, IriPrefix):
        return isinstance(term, Iri) and term.value.startswith(vc.namespace)
    if isinstance(vc, ValueSet):
        return term in vc.values
    raise TypeError(f"not a value constraint: {vc!r}")


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # value | cardinality | choice-count | unassignable-triple | value-part
    path: tuple[str, ...]
    predicate: str | None
    observed: str
    expected: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "path": list(self.path),
            "predicate": self.predicate,
            "observed": self.observed,
            "expected": self.expected,
        }


@dataclass
class NodeReport:
    node: Term
    label: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def conforms(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "node": n3(self.node),
            "label": self.label,
            "conforms": self.conforms,
            "violations": [v.to_dict() for v in self.violations],
        }


@dataclass
class ValidationReport:
    reports: list[NodeReport] = field(default_factory=list)

    @property
    def conforms(self) -> bool:
        return all(r.conforms for r in self.reports)

    def for_node(self, node: Term, label: str) -> NodeReport:
        for r in self.reports:
            if r.node == node and r.label == label:
                return r
        raise KeyError((node, label))

    def to_dict(self) -> dict:
        return {"conforms": self.conforms, "reports": [r.to_dict() for r in self.reports]}

    def summary(self) -> str:
        lines = []
        status = "conformant" if self.conforms else "non-conformant"
        lines.append(f"validation: {status} ({len(self.reports)} node/label pairs)")
        for r in self.reports:
            if r.conforms:
                continue
            lines.append(f"  {n3(r.node)} !~ <{r.label}>")
            for v in r.violations:
                at = "/".join(v.path)
                pred = f" {v.predicate}" if v.predicate else ""
                lines.append(
                    f"    [{v.kind}]{pred} at {at}: observed {v.observed}, expected {v.expected}"
                )
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Node evaluation
# ---------------------------------------------------------------------------

Memo = dict | None


def _describe_object(obj: ObjectConstraint) -> str:
    if isinstance(obj, ShapeRef):
        return f"@<{obj.label}>"
    if isinstance(obj, NeighbourhoodConstraint):
        return "{ nested }" if not obj.empty else "{ }"
    if isinstance(obj, Kind):
        return obj.name
    if isinstance(obj, XsdType):
        return obj.datatype
    if isinstance(obj, IriPrefix):
        return f"<{obj.namespace}>~"
    if isinstance(obj, ValueSet):
        return "[" + " ".join(n3(v) for v in obj.values) + "]"
    return repr(obj)


def _object_ok(g: RdfGraph, term: Term, obj: ObjectConstraint, schema: Schema, memo: Memo) -> bool:
    if isinstance(obj, ShapeRef):
        return node_conforms(g, term, schema.defs[obj.label], schema, memo, key=(term, obj.label))
    if isinstance(obj, NeighbourhoodConstraint):
        return _neighbourhood_ok(g, term, obj, schema, memo)
    return satisfies_value(term, obj)


def node_conforms(
    g: RdfGraph,
    node: Term,
    constraint: ShapeConstraint,
    schema: Schema,
    memo: Memo = None,
    key: tuple | None = None,
) -> bool:
    if memo is not None and key is not None and key in memo:
        return memo[key]
    ok = all(satisfies_value(node, vc) for vc in constraint.values) and _neighbourhood_ok(
        g, node, constraint.neighbourhood, schema, memo
    )
    if memo is not None and key is not None:
        memo[key] = ok
    return ok


def _branch_satisfied(
    g: RdfGraph, node: Term, tc: TripleConstraint, schema: Schema, memo: Memo
) -> bool:
    objs = g.objects(node, tc.predicate)
    if not tc.card.contains(len(objs)):
        return False
    return all(_object_ok(g, o, tc.object, schema, memo) for o in objs)


def _grouped_plain(nc: NeighbourhoodConstraint) -> list[tuple[str, list[TripleConstraint]]]:
    plain = [c for c in nc.conjuncts if isinstance(c, TripleConstraint)]
    ordered = sorted(plain, key=lambda tc: tc.predicate)
    return [(p, list(tcs)) for p, tcs in groupby(ordered, key=lambda tc: tc.predicate)]


def _assignment_exists(ok: list[list[bool]], mins: list[int], maxs: list[int | None]) -> bool:
    """Backtracking search for an assignment of each row to one column."""
    n_obj, n_tc = len(ok), len(mins)
    candidates = 1
    for row in ok:
        candidates *= max(1, sum(row))
    if candidates > ASSIGNMENT_WARN_LIMIT:
        warnings.warn(
            f"searching {candidates} candidate triple assignments", AssignmentSearchWarning
        )
    counts = [0] * n_tc

    def place(i: int) -> bool:
        if i == n_obj:
            return all(
                counts[j] >= mins[j] and (maxs[j] is None or counts[j] <= maxs[j])
                for j in range(n_tc)
            )
        remaining = n_obj - i
        # Prune: even assigning everything left cannot reach the minima.
        deficit = sum(max(0, mins[j] - counts[j]) for j in range(n_tc))
        if deficit > remaining:
            return False
        for j in range(n_tc):
            if not ok[i][j]:
                continue
            if maxs[j] is not None and counts[j] >= maxs[j]:
                continue
            counts[j] += 1
            if place(i + 1):
                return True
            counts[j] -= 1
        return False

    return place(0)


def _neighbourhood_ok(
    g: RdfGraph, node: Term, nc: NeighbourhoodConstraint, schema: Schema, memo: Memo
) -> bool:
    if nc.empty:
        return True
    for predicate, tcs in _grouped_plain(nc):
        objs = g.objects(node, predicate)
        if len(tcs) == 1:
            tc = tcs[0]
            if not tc.card.contains(len(objs)):
                return False
            if not all(_object_ok(g, o, tc.object, schema, memo) for o in objs):
                return False
        else:
            ok = [[_object_ok(g, o, tc.object, schema, memo) for tc in tcs] for o in objs]
            if not _assignment_exists(ok, [tc.card.min for tc in tcs], [tc.card.max for tc in tcs]):
                return False
    for conjunct in nc.conjuncts:
        if isinstance(conjunct, Choice):
            satisfied = sum(
                1 for b in conjunct.branches if _branch_satisfied(g, node, b, schema, memo)
            )
            if satisfied != 1:
                return False
    return True


def validate_node(
    g: RdfGraph,
    node: Term,
    label: str,
    schema: Schema,
    memo: Memo = None,
) -> NodeReport:
    """Detailed evaluation of one node against one shape label."""
    constraint = schema.defs[label]
    report = NodeReport(node, label)
    for idx, vc in enumerate(constraint.values):
        if not satisfies_value(node, vc):
            report.violations.append(
                Violation("value-part", (f"value[{idx}]",), None, n3(node), _describe_object(vc))
            )
    nc = constraint.neighbourhood
    conjunct_paths = {id(c): (f"conjunct[{i}]",) for i, c in enumerate(nc.conjuncts)}

    for predicate, tcs in _grouped_plain(nc):
        objs = g.objects(node, predicate)
        if len(tcs) == 1:
            tc = tcs[0]
            path = conjunct_paths[id(tc)]
            if not tc.card.contains(len(objs)):
                report.violations.append(
                    Violation("cardinality", path, predicate, str(len(objs)), str(tc.card))
                )
            for o in objs:
                if not _object_ok(g, o, tc.object, schema, memo):
                    report.violations.append(
                        Violation("value", path, predicate, n3(o), _describe_object(tc.object))
                    )
        else:
            ok = [[_object_ok(g, o, tc.object, schema, memo) for tc in tcs] for o in objs]
            if not _assignment_exists(ok, [tc.card.min for tc in tcs], [tc.card.max for tc in tcs]):
                paths = sorted(conjunct_paths[id(tc)][0] for tc in tcs)
                report.violations.append(
                    Violation(
                        "unassignable-triple",
                        (paths[0],),
                        predicate,
                        f"{len(objs)} triple(s) cannot be assigned",
                        f"{len(tcs)} constraints over {predicate}",
                    )
                )
    for conjunct in nc.conjuncts:
        if isinstance(conjunct, Choice):
            path = conjunct_paths[id(conjunct)]
            satisfied = [
                i
                for i, b in enumerate(conjunct.branches)
                if _branch_satisfied(g, node, b, schema, memo)
            ]
            if len(satisfied) != 1:
                report.violations.append(
                    Violation(
                        "choice-count",
                        path,
                        None,
                        str(len(satisfied)),
                        "exactly 1 satisfied branch",
                    )
                )
    return report


def validate(
    g: RdfGraph, schema: Schema, targets: Mapping[str, Iterable[Term]]
) -> ValidationReport:
    """Validate every target node of every label; memoized across references."""
    memo: dict = {}
    report = ValidationReport()
    for label in schema.defs:
        nodes = sorted(set(targets.get(label, ())), key=term_key)
        for node in nodes:
            report.reports.append(validate_node(g, node, label, schema, memo))
    return report
