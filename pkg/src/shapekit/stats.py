"""Data-insight computations backing the interactive workflow.

Per predicate: how many sample nodes carry it, occurrence extremes and mean,
and the value-constraint lattice annotated with (direct, accumulated) vote
counts of the nodes' preferred constraints. Per predicate pair: in how many
sample nodes both occur, a signal for candidate choices.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .graph import RdfGraph
from .infer import InferenceConfig, node_preference
from .lattice import ValueLattice, accumulate_votes
from .model import IriPrefix, Kind, ValueConstraint, ValueSet, XsdType
from .terms import Term, n3, term_key


def value_text(vc: ValueConstraint) -> str:
    if isinstance(vc, Kind):
        return vc.name
    if isinstance(vc, XsdType):
        return vc.datatype
    if isinstance(vc, IriPrefix):
        return f"<{vc.namespace}>~"
    if isinstance(vc, ValueSet):
        return "[" + " ".join(n3(v) for v in vc.values) + "]"
    return repr(vc)


@dataclass(frozen=True)
class LatticeAnnotation:
    option: ValueConstraint
    direct: int
    accumulated: int

    def to_dict(self) -> dict:
        return {
            "option": value_text(self.option),
            "direct": self.direct,
            "accumulated": self.accumulated,
        }


@dataclass
class PredicateStats:
    predicate: str
    sample_size: int
    nodes_with_predicate: int
    min_occurs: int
    max_occurs: int
    mean_occurs: Fraction
    annotations: list[LatticeAnnotation] = field(default_factory=list)
    edges: list[tuple[str, str]] = field(default_factory=list)  # option -> parent

    def to_dict(self) -> dict:
        return {
            "predicate": self.predicate,
            "sample_size": self.sample_size,
            "nodes_with_predicate": self.nodes_with_predicate,
            "min_occurs": self.min_occurs,
            "max_occurs": self.max_occurs,
            "mean_occurs": str(self.mean_occurs),
            "mean_occurs_decimal": float(self.mean_occurs),
            "lattice": [a.to_dict() for a in self.annotations],
            "lattice_edges": [list(e) for e in self.edges],
        }


def predicate_stats(
    g: RdfGraph,
    sample: Iterable[Term],
    predicate: str,
    lattice: ValueLattice,
    config: InferenceConfig | None = None,
) -> PredicateStats:
    """Occurrence statistics and the annotated value lattice for one predicate.

    Nodes lacking the predicate count into the minimum and the mean; the
    lattice is annotated from each carrying node's preferred constraint.
    """
    config = config or InferenceConfig()
    nodes = sorted(set(sample), key=term_key)
    counts = [g.count(n, predicate) for n in nodes]
    carrying = [n for n, c in zip(nodes, counts) if c > 0]
    total = sum(counts)
    mean = Fraction(total, len(nodes)) if nodes else Fraction(0)
    votes = Counter(
        node_preference(g, n, predicate, lattice, config.neighbour_threshold) for n in carrying
    )
    annotations: list[LatticeAnnotation] = []
    edges: list[tuple[str, str]] = []
    if votes:
        tally = accumulate_votes(votes, lattice.ancestors)
        options = sorted(tally, key=lambda o: (-tally[o][1], value_text(o)))
        for option in options:
            direct, acc = tally[option]
            annotations.append(LatticeAnnotation(option, direct, acc))
        for option in options:
            parents = [
                other
                for other in options
                if other != option and lattice.leq(option, other)
            ]
            if parents:
                immediate = min(
                    parents,
                    key=lambda p: sum(1 for q in parents if lattice.leq(q, p)),
                )
                edges.append((value_text(option), value_text(immediate)))
    return PredicateStats(
        predicate=predicate,
        sample_size=len(nodes),
        nodes_with_predicate=len(carrying),
        min_occurs=min(counts) if counts else 0,
        max_occurs=max(counts) if counts else 0,
        mean_occurs=mean,
        annotations=annotations,
        edges=edges,
    )


def all_predicate_stats(
    g: RdfGraph,
    sample: Iterable[Term],
    lattice: ValueLattice,
    config: InferenceConfig | None = None,
) -> list[PredicateStats]:
    nodes = sorted(set(sample), key=term_key)
    return [predicate_stats(g, nodes, p, lattice, config) for p in sorted(g.props(nodes))]


@dataclass
class CooccurrenceMatrix:
    predicates: tuple[str, ...]
    counts: dict[tuple[str, str], int]

    def get(self, p: str, q: str) -> int:
        key = (p, q) if (p, q) in self.counts else (q, p)
        return self.counts.get(key, 0)

    def to_dict(self) -> dict:
        return {
            "predicates": list(self.predicates),
            "counts": [
                {"a": p, "b": q, "count": self.get(p, q)}
                for i, p in enumerate(self.predicates)
                for q in self.predicates[i:]
            ],
        }


def cooccurrence(g: RdfGraph, sample: Iterable[Term]) -> CooccurrenceMatrix:
    """Symmetric matrix over the sample's predicates; the diagonal counts the
    nodes carrying the predicate."""
    nodes = sorted(set(sample), key=term_key)
    predicates = tuple(sorted(g.props(nodes)))
    counts: dict[tuple[str, str], int] = {}
    per_node = [{p for p in predicates if g.count(n, p) > 0} for n in nodes]
    for i, p in enumerate(predicates):
        for q in predicates[i:]:
            counts[(p, q)] = sum(1 for preds in per_node if p in preds and q in preds)
    return CooccurrenceMatrix(predicates, counts)
