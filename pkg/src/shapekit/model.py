"""Abstract shape-constraint AST, schema container and the uniform subset.

A schema maps shape labels (IRIs, possibly relative like ``Person``) to
shape constraints. Constraints combine node-level value constraints with a
neighbourhood constraint made of triple constraints and choices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

from .terms import Blank, Iri, Literal, Term, term_key


class SchemaError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Value constraints
# ---------------------------------------------------------------------------


class ValueConstraint:
    """Base class; concrete constraints restrict a single node's value."""

    __slots__ = ()


@dataclass(frozen=True)
class Kind(ValueConstraint):
    name: str  # lit | nonlit | blank | iri | any

    def __repr__(self) -> str:
        return f"Kind({self.name})"


LIT = Kind("lit")
NONLIT = Kind("nonlit")
BLANK = Kind("blank")
IRI = Kind("iri")
ANY = Kind("any")

KIND_NAMES = {k.name: k for k in (LIT, NONLIT, BLANK, IRI, ANY)}


@dataclass(frozen=True)
class XsdType(ValueConstraint):
    datatype: str


@dataclass(frozen=True)
class IriPrefix(ValueConstraint):
    namespace: str

    def __post_init__(self) -> None:
        if not self.namespace:
            raise SchemaError("prefix constraint needs a non-empty namespace")


@dataclass(frozen=True)
class ValueSet(ValueConstraint):
    """Enumerated admissible values; IRIs and literals only, never blanks."""

    values: tuple[Term, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise SchemaError("value set must not be empty")
        if any(isinstance(v, Blank) for v in self.values):
            raise SchemaError("value sets cannot contain blank nodes")
        deduped = tuple(sorted(set(self.values), key=term_key))
        object.__setattr__(self, "values", deduped)


def value_set(*values: Term) -> ValueSet:
    return ValueSet(tuple(values))


# ---------------------------------------------------------------------------
# Cardinalities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cardinality:
    """Inclusive occurrence interval; ``max=None`` means unbounded."""

    min: int
    max: int | None

    def __post_init__(self) -> None:
        if self.min < 0 or (self.max is not None and self.max < self.min):
            raise SchemaError(f"invalid cardinality {{{self.min};{self.max}}}")

    def contains(self, n: int) -> bool:
        return n >= self.min and (self.max is None or n <= self.max)

    def __str__(self) -> str:
        upper = "*" if self.max is None else str(self.max)
        return f"{{{self.min};{upper}}}"


CARD_01 = Cardinality(0, 1)
CARD_11 = Cardinality(1, 1)
CARD_0N = Cardinality(0, None)
CARD_1N = Cardinality(1, None)

UNIFORM_CARDS = (CARD_0N, CARD_01, CARD_11, CARD_1N)


# ---------------------------------------------------------------------------
# Neighbourhood constraints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShapeRef:
    label: str


@dataclass(frozen=True)
class TripleConstraint:
    predicate: str
    object: "ObjectConstraint"
    card: Cardinality


@dataclass(frozen=True)
class Choice:
    branches: tuple[TripleConstraint, ...]

    def __post_init__(self) -> None:
        if len(self.branches) < 2:
            raise SchemaError("a choice needs at least two branches")
        preds = [b.predicate for b in self.branches]
        if len(preds) != len(set(preds)):
            raise SchemaError("a predicate may appear at most once inside a choice")


Conjunct = TripleConstraint | Choice


@dataclass(frozen=True)
class NeighbourhoodConstraint:
    conjuncts: tuple[Conjunct, ...] = ()

    @property
    def empty(self) -> bool:
        return not self.conjuncts


EMPTY_NEIGHBOURHOOD = NeighbourhoodConstraint()

ObjectConstraint = ShapeRef | ValueConstraint | NeighbourhoodConstraint


@dataclass(frozen=True)
class ShapeConstraint:
    values: tuple[ValueConstraint, ...] = ()
    neighbourhood: NeighbourhoodConstraint = EMPTY_NEIGHBOURHOOD


EMPTY_SHAPE = ShapeConstraint()


# ---------------------------------------------------------------------------
# Schema
# ---------------------------------------------------------------------------


@dataclass
class Schema:
    """Ordered label → constraint map plus the prefixes used for rendering."""

    defs: dict[str, ShapeConstraint] = field(default_factory=dict)
    prefixes: dict[str, str] = field(default_factory=dict)

    @property
    def labels(self) -> list[str]:
        return list(self.defs)

    def check(self) -> None:
        """Raise :class:`SchemaError` on dangling references, cycles, or
        predicates shared between a choice and a sibling constraint."""
        for label, constraint in self.defs.items():
            for ref in _references(constraint):
                if ref not in self.defs:
                    raise SchemaError(f"shape <{label}> references undefined shape <{ref}>")
            _check_predicate_sharing(label, constraint.neighbourhood)
        self.reference_order()

    def reference_order(self) -> list[str]:
        """Labels sorted so that referenced shapes come first; raises on cycles."""
        ts: TopologicalSorter[str] = TopologicalSorter()
        for label, constraint in self.defs.items():
            ts.add(label, *sorted(_references(constraint)))
        try:
            return [label for label in ts.static_order() if label in self.defs]
        except CycleError as err:
            cycle = " -> ".join(err.args[1]) if len(err.args) > 1 else ""
            raise SchemaError(f"recursive shape references are not allowed: {cycle}") from None

    def copy(self) -> "Schema":
        return Schema(dict(self.defs), dict(self.prefixes))


def _references(constraint: ShapeConstraint) -> set[str]:
    out: set[str] = set()

    def walk(nc: NeighbourhoodConstraint) -> None:
        for conjunct in nc.conjuncts:
            branches = conjunct.branches if isinstance(conjunct, Choice) else (conjunct,)
            for tc in branches:
                if isinstance(tc.object, ShapeRef):
                    out.add(tc.object.label)
                elif isinstance(tc.object, NeighbourhoodConstraint):
                    walk(tc.object)

    walk(constraint.neighbourhood)
    return out


def _check_predicate_sharing(label: str, nc: NeighbourhoodConstraint) -> None:
    choice_preds: set[str] = set()
    plain_preds: set[str] = set()
    for conjunct in nc.conjuncts:
        if isinstance(conjunct, Choice):
            for tc in conjunct.branches:
                choice_preds.add(tc.predicate)
                if isinstance(tc.object, NeighbourhoodConstraint):
                    _check_predicate_sharing(label, tc.object)
        else:
            plain_preds.add(conjunct.predicate)
            if isinstance(conjunct.object, NeighbourhoodConstraint):
                _check_predicate_sharing(label, conjunct.object)
    shared = choice_preds & plain_preds
    if shared:
        pred = sorted(shared)[0]
        raise SchemaError(
            f"shape <{label}>: predicate {pred} appears both inside a choice and "
            "as a plain triple constraint"
        )


# ---------------------------------------------------------------------------
# Uniform constraints
# ---------------------------------------------------------------------------


class NotUniform(ValueError):
    pass


@dataclass(frozen=True)
class UniformEntry:
    predicate: str
    value: ValueConstraint
    card: Cardinality


@dataclass(frozen=True)
class UniformConstraint:
    """Choice-free, nesting-free constraint: per-predicate value + one of the
    four uniform cardinalities, predicates pairwise distinct."""

    entries: tuple[UniformEntry, ...] = ()

    def __post_init__(self) -> None:
        preds = [e.predicate for e in self.entries]
        if len(preds) != len(set(preds)):
            raise NotUniform("repeated predicate in uniform constraint")
        for e in self.entries:
            if e.card not in UNIFORM_CARDS:
                raise NotUniform(f"{e.card} is not a uniform cardinality")
            _check_uniform_value(e.value)

    def to_shape_constraint(self) -> ShapeConstraint:
        conjuncts = tuple(TripleConstraint(e.predicate, e.value, e.card) for e in self.entries)
        return ShapeConstraint((), NeighbourhoodConstraint(conjuncts))

    def entry(self, predicate: str) -> UniformEntry:
        for e in self.entries:
            if e.predicate == predicate:
                return e
        raise KeyError(predicate)

    def predicates(self) -> list[str]:
        return [e.predicate for e in self.entries]


def _check_uniform_value(value: ValueConstraint) -> None:
    if isinstance(value, ValueSet) and len(value.values) != 1:
        raise NotUniform("uniform value sets hold a single value")
    if not isinstance(value, (Kind, XsdType, IriPrefix, ValueSet)):
        raise NotUniform(f"{value!r} is not a uniform value constraint")


def as_uniform(constraint: ShapeConstraint) -> UniformConstraint:
    """Project a shape constraint back onto the uniform subset.

    Raises :class:`NotUniform` naming the first offending feature.
    """
    if constraint.values:
        raise NotUniform("uniform constraints have no node-level value part")
    entries = []
    for conjunct in constraint.neighbourhood.conjuncts:
        if isinstance(conjunct, Choice):
            raise NotUniform("uniform constraints cannot contain a choice")
        obj = conjunct.object
        if isinstance(obj, ShapeRef):
            raise NotUniform(f"shape reference @<{obj.label}> is not uniform")
        if isinstance(obj, NeighbourhoodConstraint):
            raise NotUniform("nested neighbourhood constraints are not uniform")
        entries.append(UniformEntry(conjunct.predicate, obj, conjunct.card))
    return UniformConstraint(tuple(entries))


def classify_term_kind(term: Term) -> Kind:
    if isinstance(term, Literal):
        return LIT
    if isinstance(term, Iri):
        return IRI
    return BLANK
