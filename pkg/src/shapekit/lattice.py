"""Ordered option spaces for value constraints and cardinalities.

The value-constraint space is an upper semilattice: enumerated values sit
below namespace prefixes and datatypes, which sit below the node kinds, with
`any` on top. Joins are least upper bounds; the consensus operation picks
the most specific option acceptable to a given proportion of voters.

The carrier is kept finite by configuration: prefix constraints range over a
configured namespace set, datatype ordering over a configured derivation
chain. Namespace sets always form a forest (prefixes of one string are
totally ordered), which makes least upper bounds unique.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from typing import Callable, Hashable, Iterable, Mapping, TypeVar

from .model import (
    ANY,
    BLANK,
    CARD_01,
    CARD_0N,
    CARD_11,
    CARD_1N,
    Cardinality,
    IRI,
    IriPrefix,
    Kind,
    LIT,
    NONLIT,
    ValueConstraint,
    ValueSet,
    XsdType,
)
from .terms import Blank, Iri, Literal, Term, xsd

#: Datatype derivation chain, most specific first.
NUMERIC_CHAIN = (
    xsd("byte"),
    xsd("short"),
    xsd("int"),
    xsd("long"),
    xsd("integer"),
    xsd("decimal"),
)


class LatticeConfigError(ValueError):
    pass


T = TypeVar("T", bound=Hashable)


def consensus(
    votes: Mapping[T, int],
    *,
    ancestors: Callable[[T], Iterable[T]],
    leq: Callable[[T, T], bool],
    join: Callable[[Iterable[T]], T],
    threshold: Fraction,
) -> T:
    """Most specific option acceptable to at least `threshold` of the voters.

    Accumulated votes of an option count every vote cast at or below it.  The
    options with the least accumulated count meeting the threshold are
    reduced to their minimal elements and joined; with threshold 1 this is
    exactly the join of all cast votes.
    """
    total = sum(votes.values())
    if total <= 0:
        raise ValueError("consensus needs at least one voter")
    if not Fraction(1, 2) < threshold <= 1:
        raise ValueError(f"threshold must be in (1/2, 1], got {threshold}")
    acc: dict[T, int] = {}
    for vote, count in votes.items():
        if count < 0:
            raise ValueError("negative vote count")
        for option in ancestors(vote):
            acc[option] = acc.get(option, 0) + count
    qualifying = {o: a for o, a in acc.items() if Fraction(a, total) >= threshold}
    least = min(qualifying.values())
    tied = [o for o, a in qualifying.items() if a == least]
    minimal = [o for o in tied if not any(x is not o and x != o and leq(x, o) for x in tied)]
    return join(minimal)


def accumulate_votes(
    votes: Mapping[T, int], ancestors: Callable[[T], Iterable[T]]
) -> dict[T, tuple[int, int]]:
    """Per option: (direct votes, accumulated votes over all options below)."""
    out: dict[T, tuple[int, int]] = {}
    for vote, count in votes.items():
        for option in ancestors(vote):
            direct, acc = out.get(option, (0, 0))
            out[option] = (direct + count * (option == vote), acc + count)
    return out


# ---------------------------------------------------------------------------
# Value-constraint lattice
# ---------------------------------------------------------------------------


class ValueLattice:
    """Value-constraint order with a configured namespace and datatype universe.

    `namespaces` bounds the prefix constraints that joins may produce.
    `extra_datatype_order` adds (more specific, less specific) datatype pairs
    on top of the built-in numeric chain; the resulting ancestor sets must
    stay totally ordered per datatype.  By default literals classify to their
    datatype constraint; set `literal_values_in_joins` to classify them to
    single-value enumerations instead.
    """

    def __init__(
        self,
        namespaces: Iterable[str] = (),
        extra_datatype_order: Iterable[tuple[str, str]] = (),
        literal_values_in_joins: bool = False,
    ):
        self.namespaces: tuple[str, ...] = tuple(sorted(set(namespaces)))
        self.literal_values_in_joins = literal_values_in_joins
        parents: dict[str, set[str]] = {}
        for below, above in zip(NUMERIC_CHAIN, NUMERIC_CHAIN[1:]):
            parents.setdefault(below, set()).add(above)
        for below, above in extra_datatype_order:
            parents.setdefault(below, set()).add(above)
        self._dt_up: dict[str, tuple[str, ...]] = {}
        for dt in parents:
            chain: list[str] = []
            frontier = [dt]
            seen = {dt}
            while frontier:
                nxt: list[str] = []
                for d in frontier:
                    for up in sorted(parents.get(d, ())):
                        if up in seen:
                            continue
                        seen.add(up)
                        chain.append(up)
                        nxt.append(up)
                frontier = nxt
            self._dt_up[dt] = tuple(chain)
        for dt, ups in self._dt_up.items():
            for i, a in enumerate(ups):
                for b in ups[i + 1 :]:
                    if not (self._dt_leq(a, b) or self._dt_leq(b, a)):
                        raise LatticeConfigError(
                            f"datatype order above {dt} is not a chain: {a} vs {b}"
                        )

    # -- datatype order -----------------------------------------------------

    def datatype_ancestors(self, datatype: str) -> tuple[str, ...]:
        """Datatypes strictly above `datatype` in the configured order."""
        return self._dt_up.get(datatype, ())

    def _dt_leq(self, d1: str, d2: str) -> bool:
        return d1 == d2 or d2 in self._dt_up.get(d1, ())

    # -- namespace universe --------------------------------------------------

    def namespaces_of(self, iri: str) -> list[str]:
        """Configured namespaces that prefix `iri`, longest first."""
        return sorted((ns for ns in self.namespaces if iri.startswith(ns)), key=len, reverse=True)

    def extended(self, namespaces: Iterable[str]) -> "ValueLattice":
        merged = set(self.namespaces) | set(namespaces)
        lat = ValueLattice(merged, (), self.literal_values_in_joins)
        lat._dt_up = self._dt_up
        return lat

    # -- classification ------------------------------------------------------

    def classify(self, term: Term) -> ValueConstraint:
        """Most specific carrier constraint satisfied by a single node."""
        if isinstance(term, Blank):
            return BLANK
        if isinstance(term, Iri):
            return ValueSet((term,))
        if self.literal_values_in_joins:
            return ValueSet((term,))
        return XsdType(term.datatype)

    # -- order ----------------------------------------------------------------

    def leq(self, a: ValueConstraint, b: ValueConstraint) -> bool:
        if a == b:
            return True
        if b == ANY:
            return True
        if a == ANY:
            return False
        if isinstance(b, Kind):
            if b == NONLIT:
                return (
                    a in (IRI, BLANK)
                    or isinstance(a, IriPrefix)
                    or (isinstance(a, ValueSet) and all(isinstance(v, Iri) for v in a.values))
                )
            if b == LIT:
                return isinstance(a, XsdType) or (
                    isinstance(a, ValueSet) and all(isinstance(v, Literal) for v in a.values)
                )
            if b == IRI:
                return isinstance(a, IriPrefix) or (
                    isinstance(a, ValueSet) and all(isinstance(v, Iri) for v in a.values)
                )
            return False  # nothing sits strictly below blank
        if isinstance(b, IriPrefix):
            if isinstance(a, IriPrefix):
                return a.namespace.startswith(b.namespace)
            return isinstance(a, ValueSet) and all(
                isinstance(v, Iri) and v.value.startswith(b.namespace) for v in a.values
            )
        if isinstance(b, XsdType):
            if isinstance(a, XsdType):
                return self._dt_leq(a.datatype, b.datatype)
            return isinstance(a, ValueSet) and all(
                isinstance(v, Literal) and self._dt_leq(v.datatype, b.datatype) for v in a.values
            )
        if isinstance(b, ValueSet):
            return isinstance(a, ValueSet) and set(a.values) <= set(b.values)
        return False

    # -- carrier ancestors -----------------------------------------------------

    def ancestors(self, vc: ValueConstraint) -> list[ValueConstraint]:
        """Carrier elements at or above `vc`, most specific first."""
        if isinstance(vc, Kind):
            chain = {
                "any": [ANY],
                "lit": [LIT, ANY],
                "nonlit": [NONLIT, ANY],
                "iri": [IRI, NONLIT, ANY],
                "blank": [BLANK, NONLIT, ANY],
            }
            return list(chain[vc.name])
        if isinstance(vc, IriPrefix):
            ups = [
                IriPrefix(ns)
                for ns in self.namespaces_of(vc.namespace)
                if ns != vc.namespace
            ]
            return [vc, *ups, IRI, NONLIT, ANY]
        if isinstance(vc, XsdType):
            ups = [XsdType(d) for d in self.datatype_ancestors(vc.datatype)]
            return [vc, *ups, LIT, ANY]
        if isinstance(vc, ValueSet):
            if all(isinstance(v, Iri) for v in vc.values):
                common = [
                    ns
                    for ns in self.namespaces_of(vc.values[0].value)
                    if all(v.value.startswith(ns) for v in vc.values)
                ]
                return [vc, *(IriPrefix(ns) for ns in common), IRI, NONLIT, ANY]
            if all(isinstance(v, Literal) for v in vc.values):
                first = vc.values[0].datatype
                candidates = [first, *self.datatype_ancestors(first)]
                common = [
                    d for d in candidates if all(self._dt_leq(v.datatype, d) for v in vc.values)
                ]
                return [vc, *(XsdType(d) for d in common), LIT, ANY]
            return [vc, ANY]
        raise TypeError(f"not a value constraint: {vc!r}")

    # -- joins -------------------------------------------------------------------

    def join2(self, a: ValueConstraint, b: ValueConstraint) -> ValueConstraint:
        if self.leq(a, b):
            return b
        if self.leq(b, a):
            return a
        common = [x for x in self.ancestors(a) if self.leq(b, x)]
        best = common[0]
        for x in common[1:]:
            if self.leq(x, best):
                best = x
        for x in common:
            if not self.leq(best, x):
                raise LatticeConfigError(
                    f"least upper bound of {a!r} and {b!r} is not unique"
                )
        return best

    def join(self, constraints: Iterable[ValueConstraint]) -> ValueConstraint:
        items = list(constraints)
        if not items:
            raise ValueError("join of an empty set")
        return reduce(self.join2, items)

    def join_terms(self, terms: Iterable[Term]) -> ValueConstraint:
        return self.join(self.classify(t) for t in terms)

    # -- consensus ------------------------------------------------------------------

    def consensus(
        self, votes: Mapping[ValueConstraint, int], threshold: Fraction
    ) -> ValueConstraint:
        return consensus(
            votes, ancestors=self.ancestors, leq=self.leq, join=self.join, threshold=threshold
        )


# ---------------------------------------------------------------------------
# Cardinality lattice
# ---------------------------------------------------------------------------

_CARD_ANCESTORS: dict[Cardinality, tuple[Cardinality, ...]] = {
    CARD_11: (CARD_11, CARD_01, CARD_1N, CARD_0N),
    CARD_01: (CARD_01, CARD_0N),
    CARD_1N: (CARD_1N, CARD_0N),
    CARD_0N: (CARD_0N,),
}


def card_leq(a: Cardinality, b: Cardinality) -> bool:
    """Interval inclusion."""
    upper_ok = b.max is None or (a.max is not None and a.max <= b.max)
    return b.min <= a.min and upper_ok


def card_ancestors(card: Cardinality) -> tuple[Cardinality, ...]:
    try:
        return _CARD_ANCESTORS[card]
    except KeyError:
        raise ValueError(f"{card} is not a uniform cardinality") from None


def card_join2(a: Cardinality, b: Cardinality) -> Cardinality:
    if card_leq(a, b):
        return b
    if card_leq(b, a):
        return a
    return CARD_0N  # only reachable for the incomparable pair {0;1}, {1;*}


def card_join(cards: Iterable[Cardinality]) -> Cardinality:
    items = list(cards)
    if not items:
        raise ValueError("join of an empty set")
    return reduce(card_join2, items)


def card_for_count(count: int) -> Cardinality:
    """Preferred uniform cardinality of a node with `count` occurrences."""
    if count == 0:
        return CARD_01
    if count == 1:
        return CARD_11
    return CARD_1N


def card_join_counts(counts: Iterable[int]) -> Cardinality:
    """Most specific uniform cardinality containing every count."""
    items = list(counts)
    if not items:
        raise ValueError("no occurrence counts")
    low = 0 if min(items) == 0 else 1
    unbounded = max(items) > 1
    if low == 0:
        return CARD_0N if unbounded else CARD_01
    return CARD_1N if unbounded else CARD_11


def card_consensus(votes: Mapping[Cardinality, int], threshold: Fraction) -> Cardinality:
    return consensus(
        votes, ancestors=card_ancestors, leq=card_leq, join=card_join, threshold=threshold
    )
