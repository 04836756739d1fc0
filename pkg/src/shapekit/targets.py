"""Validation-target selectors.

A target names the graph nodes a shape label must validate: a selector
(class membership, subjects of a predicate, all subjects, or nothing) plus
explicit include/exclude node sets.

CLI mini-syntax: ``class:<iri>``, ``subjects-of:<iri>``, ``all``,
``nodes:<file>``, optionally followed by ``+<file>`` / ``-<file>``
adjustment files holding one term per line.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .graph import RdfGraph
from .terms import Iri, Term, n3, parse_term, term_key

SELECTOR_KINDS = ("class", "subjects-of", "all", "explicit")


@dataclass(frozen=True)
class TargetSpec:
    selector: str = "explicit"
    iri: str | None = None
    include: tuple[Term, ...] = ()
    exclude: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        if self.selector not in SELECTOR_KINDS:
            raise ValueError(f"unknown selector kind {self.selector!r}")
        if self.selector in ("class", "subjects-of") and not self.iri:
            raise ValueError(f"selector {self.selector!r} needs an IRI")
        inc = tuple(sorted(set(self.include), key=term_key))
        exc = tuple(sorted(set(self.exclude), key=term_key))
        object.__setattr__(self, "include", inc)
        object.__setattr__(self, "exclude", exc)
        if set(inc) & set(exc):
            raise ValueError("include and exclude sets overlap")

    def resolve(self, g: RdfGraph) -> list[Term]:
        """Selector result, plus includes, minus excludes; sorted."""
        if self.selector == "class":
            base = set(g.class_members(self.iri))
        elif self.selector == "subjects-of":
            base = set(g.subjects_of(self.iri))
        elif self.selector == "all":
            base = set(g.subjects())
        else:
            base = set()
        base.update(self.include)
        base.difference_update(self.exclude)
        return sorted(base, key=term_key)

    def with_added(self, nodes: Iterable[Term]) -> "TargetSpec":
        extra = [n for n in nodes if n not in self.exclude]
        return replace(self, include=tuple(self.include) + tuple(extra))

    def to_dict(self) -> dict:
        out: dict = {"selector": self.selector}
        if self.iri:
            out["iri"] = self.iri
        if self.include:
            out["include"] = [n3(t) for t in self.include]
        if self.exclude:
            out["exclude"] = [n3(t) for t in self.exclude]
        return out

    @staticmethod
    def from_dict(data: dict) -> "TargetSpec":
        return TargetSpec(
            selector=data.get("selector", "explicit"),
            iri=data.get("iri"),
            include=tuple(parse_term(t) for t in data.get("include", ())),
            exclude=tuple(parse_term(t) for t in data.get("exclude", ())),
        )

    def describe(self) -> str:
        if self.selector == "class":
            core = f"class:<{self.iri}>"
        elif self.selector == "subjects-of":
            core = f"subjects-of:<{self.iri}>"
        elif self.selector == "all":
            core = "all"
        else:
            core = "nodes"
        extras = []
        if self.include:
            extras.append(f"+{len(self.include)}")
        if self.exclude:
            extras.append(f"-{len(self.exclude)}")
        return " ".join([core, *extras])


def explicit_target(nodes: Iterable[Term]) -> TargetSpec:
    return TargetSpec(selector="explicit", include=tuple(nodes))


def _read_nodes_file(path: str) -> list[Term]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("<") or line.startswith('"') or line.startswith("_:"):
                out.append(parse_term(line))
            else:
                out.append(Iri(line))
    return out


def parse_selector(expr: str) -> TargetSpec:
    """Parse the CLI target expression."""
    parts = expr.split()
    if not parts:
        raise ValueError("empty target expression")
    head = parts[0]
    include: list[Term] = []
    exclude: list[Term] = []
    if head == "all":
        selector, iri = "all", None
    elif head.startswith("class:"):
        selector, iri = "class", _strip_angle(head[len("class:") :])
    elif head.startswith("subjects-of:"):
        selector, iri = "subjects-of", _strip_angle(head[len("subjects-of:") :])
    elif head.startswith("nodes:"):
        selector, iri = "explicit", None
        include.extend(_read_nodes_file(head[len("nodes:") :]))
    else:
        raise ValueError(f"unknown target selector {head!r}")
    for part in parts[1:]:
        if part.startswith("+"):
            include.extend(_read_nodes_file(part[1:]))
        elif part.startswith("-"):
            exclude.extend(_read_nodes_file(part[1:]))
        else:
            raise ValueError(f"unexpected target adjustment {part!r}")
    return TargetSpec(selector=selector, iri=iri, include=tuple(include), exclude=tuple(exclude))


def _strip_angle(text: str) -> str:
    if text.startswith("<") and text.endswith(">"):
        return text[1:-1]
    if not text:
        raise ValueError("selector needs an IRI")
    return text


def load_targets_json(data: dict) -> dict[str, TargetSpec]:
    out: dict[str, TargetSpec] = {}
    for label, spec in data.get("targets", {}).items():
        out[label] = TargetSpec.from_dict(spec)
    return out


def targets_to_json(targets: dict[str, TargetSpec]) -> dict:
    return {"format_version": 1, "targets": {label: t.to_dict() for label, t in targets.items()}}
