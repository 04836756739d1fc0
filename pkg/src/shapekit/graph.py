"""Indexed, immutable RDF graph with neighbourhood accessors."""

from __future__ import annotations

from typing import Iterable, Iterator

from .terms import RDF_TYPE, Blank, Iri, PrefixMap, Term, Triple, term_key, triple_key


class RdfGraph:
    """A set of triples with a subject index.

    The graph is frozen after construction: duplicate triples collapse, the
    index always mirrors the triple set, and every accessor returns terms in
    the deterministic :func:`term_key` order.
    """

    def __init__(self, triples: Iterable[Triple] = (), prefixes: PrefixMap | None = None):
        unique = sorted(set(triples), key=triple_key)
        self._triples: tuple[Triple, ...] = tuple(unique)
        self.prefixes: PrefixMap = prefixes.copy() if prefixes else PrefixMap()
        index: dict[Term, dict[str, list[Term]]] = {}
        for t in self._triples:
            index.setdefault(t.subject, {}).setdefault(t.predicate, []).append(t.object)
        self._index: dict[Term, dict[str, tuple[Term, ...]]] = {
            s: {p: tuple(objs) for p, objs in preds.items()} for s, preds in index.items()
        }

    @property
    def triples(self) -> tuple[Triple, ...]:
        return self._triples

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        objs = self._index.get(triple.subject, {}).get(triple.predicate, ())
        return triple.object in objs

    def subjects(self) -> list[Iri | Blank]:
        return sorted(self._index.keys(), key=term_key)

    def nodes(self) -> list[Term]:
        """All terms appearing in subject or object position."""
        seen: set[Term] = set(self._index.keys())
        for t in self._triples:
            seen.add(t.object)
        return sorted(seen, key=term_key)

    def neighbourhood(self, node: Term) -> list[Triple]:
        """All triples with the given subject, sorted; absent subjects yield []."""
        preds = self._index.get(node)
        if not preds:
            return []
        out = [Triple(node, p, o) for p in sorted(preds) for o in sorted(preds[p], key=term_key)]
        return out

    def objects(self, node: Term, predicate: str) -> tuple[Term, ...]:
        return self._index.get(node, {}).get(predicate, ())

    def count(self, node: Term, predicate: str) -> int:
        return len(self.objects(node, predicate))

    def props(self, nodes: Iterable[Term]) -> set[str]:
        """Predicates of all triples whose subject is in `nodes`."""
        out: set[str] = set()
        for n in nodes:
            out.update(self._index.get(n, ()))
        return out

    def p_neighbours(self, nodes: Iterable[Term], predicate: str) -> list[Term]:
        """Multiset of objects of `predicate` triples from `nodes` (sorted)."""
        out: list[Term] = []
        for n in nodes:
            out.extend(self.objects(n, predicate))
        out.sort(key=term_key)
        return out

    def p_neighbour_set(self, nodes: Iterable[Term], predicate: str) -> list[Term]:
        """Distinct p-neighbours, sorted."""
        return sorted(set(self.p_neighbours(nodes, predicate)), key=term_key)

    def class_members(self, class_iri: str) -> list[Term]:
        out = [s for s, preds in self._index.items() if any(
            isinstance(o, Iri) and o.value == class_iri for o in preds.get(RDF_TYPE, ())
        )]
        return sorted(out, key=term_key)

    def subjects_of(self, predicate: str) -> list[Term]:
        return sorted((s for s, preds in self._index.items() if predicate in preds), key=term_key)


def merge(*graphs: RdfGraph) -> RdfGraph:
    triples: list[Triple] = []
    prefixes = PrefixMap()
    for g in graphs:
        triples.extend(g.triples)
        for name, ns in g.prefixes.prefixes.items():
            prefixes.declare(name, ns)
    return RdfGraph(triples, prefixes)
