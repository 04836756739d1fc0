"""Seeded random graphs and samples shared by property and acceptance tests."""

from __future__ import annotations

import random

from shapekit.graph import RdfGraph
from shapekit.terms import Blank, Iri, Literal, PrefixMap, Term, Triple, xsd

EX = "http://gen.example/"
NS_A = "http://gen.example/a/"
NS_B = "http://gen.example/b/"

PREDICATES = [EX + f"p{i}" for i in range(8)]

IRI_OBJECTS = [Iri(NS_A + "o1"), Iri(NS_A + "o2"), Iri(NS_B + "o3")]
LITERAL_OBJECTS = [
    Literal("alpha"),
    Literal("beta"),
    Literal("7", datatype=xsd("integer")),
    Literal("12", datatype=xsd("integer")),
]
BLANK_OBJECTS = [Blank("b0"), Blank("b1")]

ALL_OBJECTS = IRI_OBJECTS + LITERAL_OBJECTS + BLANK_OBJECTS


def generator_namespaces() -> list[str]:
    return [NS_A, NS_B, EX]


def random_graph(rng: random.Random, max_nodes: int = 30, max_predicates: int = 8) -> RdfGraph:
    n_nodes = rng.randint(1, max_nodes)
    predicates = PREDICATES[: rng.randint(1, max_predicates)]
    triples: list[Triple] = []
    for i in range(n_nodes):
        subject = Iri(EX + f"n{i}")
        for p in predicates:
            for _ in range(rng.choice([0, 0, 1, 1, 1, 2, 3])):
                triples.append(Triple(subject, p, rng.choice(ALL_OBJECTS)))
    pm = PrefixMap({"gen": EX, "gena": NS_A, "genb": NS_B})
    return RdfGraph(triples, pm)


def random_sample(rng: random.Random, g: RdfGraph) -> list[Term]:
    subjects = g.subjects()
    if not subjects:
        return []
    k = rng.randint(1, len(subjects))
    return rng.sample(subjects, k)
