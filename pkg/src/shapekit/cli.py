"""Command-line entry points.

Subcommands: infer, validate, export, stats, pattern-from-ontology, serve.
Exit codes: 0 success (validate: conformant), 1 validation failures,
2 usage or input errors.

The environment variable SHAPEKIT_NAMESPACES may point to a file with one
namespace IRI per line, extending the configured prefix universe.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .export import serialize_shapes_graph, to_shacl, to_shex
from .infer import (
    InferenceConfig,
    InferenceError,
    build_from_pattern,
    infer_uniform,
    pattern_from_ontology,
)
from .lattice import LatticeConfigError, ValueLattice
from .model import Schema, SchemaError
from .pattern import PatternError, parse_pattern, print_pattern
from .scl_text import parse_scl, print_scl
from .stats import all_predicate_stats, cooccurrence, predicate_stats
from .targets import TargetSpec, load_targets_json, parse_selector, targets_to_json
from .turtle import RdfSyntaxError, load_graph
from .validate import validate


class CliError(Exception):
    pass


def _namespaces_from_env() -> list[str]:
    path = os.environ.get("SHAPEKIT_NAMESPACES")
    if not path:
        return []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as err:
        raise CliError(f"cannot read namespace file {path!r}: {err}") from None
    return [line.strip() for line in lines if line.strip() and not line.startswith("#")]


def _lattice_for(graph, extra: list[str]) -> ValueLattice:
    return ValueLattice(
        [*graph.prefixes.prefixes.values(), *extra, *_namespaces_from_env()]
    )


def _load_graph(path: str):
    try:
        return load_graph(path)
    except OSError as err:
        raise CliError(str(err)) from None
    except RdfSyntaxError as err:
        raise CliError(f"{path}: {err}") from None


def _config_from_args(args) -> InferenceConfig:
    try:
        return InferenceConfig(
            error_rate=Fraction(args.error_rate),
            neighbour_error_rate=(
                Fraction(args.neighbour_error_rate)
                if args.neighbour_error_rate is not None
                else None
            ),
            shrink_warning_threshold=args.shrink_threshold,
        )
    except (InferenceError, ValueError, ZeroDivisionError) as err:
        raise CliError(f"bad error rate: {err}") from None


def _parse_target_args(values: list[str]) -> tuple[TargetSpec | None, dict[str, TargetSpec]]:
    """`--target expr` or repeated `--target Label=expr`."""
    default: TargetSpec | None = None
    named: dict[str, TargetSpec] = {}
    for value in values:
        head, sep, rest = value.partition("=")
        if sep and not head.startswith(("class:", "subjects-of:", "nodes:")) and head != "all":
            named[head] = parse_selector(rest)
        else:
            if default is not None:
                raise CliError("only one unnamed --target expression is allowed")
            default = parse_selector(value)
    return default, named


def cmd_infer(args) -> int:
    graph = _load_graph(args.graph)
    lattice = _lattice_for(graph, args.namespace)
    config = _config_from_args(args)
    default_target, named = _parse_target_args(args.target or [])
    if args.pattern:
        pattern = parse_pattern(Path(args.pattern).read_text(encoding="utf-8"))
        for label, spec in named.items():
            if label not in pattern.labels:
                raise CliError(f"--target names unknown pattern label {label!r}")
            pattern.samples[label] = spec
        unsampled = [label for label in pattern.labels if label not in pattern.samples]
        if default_target is not None:
            if len(unsampled) > 1:
                raise CliError(
                    "pattern defines several labels; use --target LABEL=<expr> to bind them"
                )
            for label in unsampled:
                pattern.samples[label] = default_target
        schema, targets, report = build_from_pattern(
            graph, pattern, lattice, config, args.mode
        )
    else:
        if default_target is None:
            raise CliError("infer needs a --target expression")
        label = args.label
        nodes = default_target.resolve(graph)
        uniform = infer_uniform(graph, nodes, lattice, config, args.mode)
        schema = Schema({label: uniform.to_shape_constraint()}, dict(graph.prefixes.prefixes))
        targets = {label: default_target}
        from .infer import InferenceReport

        report = InferenceReport(sample_sizes={label: len(nodes)})
    text = print_scl(schema)
    _write_out(args.out, text)
    for label, size in sorted(report.sample_sizes.items()):
        print(f"sample <{label}>: {size} node(s)", file=sys.stderr)
    for warning in report.warnings:
        where = f" {warning.predicate}" if warning.predicate else ""
        print(
            f"warning[{warning.kind}] <{warning.label}>{where}: {warning.detail}",
            file=sys.stderr,
        )
    if args.targets_out:
        Path(args.targets_out).write_text(
            json.dumps(targets_to_json(targets), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    return 0


def cmd_validate(args) -> int:
    graph = _load_graph(args.graph)
    schema = parse_scl(Path(args.schema).read_text(encoding="utf-8"))
    targets = load_targets_json(json.loads(Path(args.targets).read_text(encoding="utf-8")))
    resolved = {}
    for label in schema.defs:
        spec = targets.get(label)
        resolved[label] = spec.resolve(graph) if spec else []
    report = validate(graph, schema, resolved)
    print(report.summary())
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0 if report.conforms else 1


def cmd_export(args) -> int:
    schema = parse_scl(Path(args.schema).read_text(encoding="utf-8"))
    targets: dict[str, TargetSpec] = {}
    if args.targets:
        targets = load_targets_json(json.loads(Path(args.targets).read_text(encoding="utf-8")))
    if args.format == "shex":
        text = to_shex(schema, targets)
    else:
        text = serialize_shapes_graph(to_shacl(schema, targets, args.choice))
    _write_out(args.out, text)
    return 0


def cmd_stats(args) -> int:
    graph = _load_graph(args.graph)
    lattice = _lattice_for(graph, args.namespace)
    config = _config_from_args(args)
    default_target, named = _parse_target_args(args.target or [])
    if named or default_target is None:
        raise CliError("stats needs a single --target expression")
    nodes = default_target.resolve(graph)
    rows = all_predicate_stats(graph, nodes, lattice, config)
    matrix = cooccurrence(graph, nodes)
    focus = None
    if args.predicate:
        focus = predicate_stats(graph, nodes, args.predicate, lattice, config)
    from .report import lattice_text, predicate_table_text, write_stats_report

    print(f"sample: {len(nodes)} node(s)")
    print(predicate_table_text(rows))
    if focus is not None:
        print()
        print(lattice_text(focus))
    if args.out_dir:
        written = write_stats_report(rows, matrix, args.out_dir, focus)
        for path in written:
            print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_pattern_from_ontology(args) -> int:
    ontology = _load_graph(args.ontology)
    pattern = pattern_from_ontology(ontology, inherit=args.inherit)
    _write_out(args.out, print_pattern(pattern))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(graph_path=args.graph, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _write_out(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shapekit",
        description="Construct, refine, validate and export shape schemas for RDF data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_rates(p):
        p.add_argument("--mode", choices=("msc", "lac"), default="msc")
        p.add_argument("--error-rate", default="0", help="node-level error rate, e.g. 0.1 or 3/20")
        p.add_argument("--neighbour-error-rate", default=None)
        p.add_argument("--shrink-threshold", type=int, default=5)
        p.add_argument(
            "--namespace",
            action="append",
            default=[],
            help="extra namespace IRI for the value lattice (repeatable)",
        )

    p = sub.add_parser("infer", help="construct a schema from samples")
    p.add_argument("--graph", required=True)
    p.add_argument("--target", action="append", help="selector expr or LABEL=<expr> (repeatable)")
    p.add_argument("--pattern", help="schema pattern file (.sclp)")
    p.add_argument("--label", default="S", help="shape label when no pattern is given")
    p.add_argument("--out", default="-")
    p.add_argument("--targets-out", help="write the resolved targets as JSON")
    add_rates(p)
    p.set_defaults(fn=cmd_infer)

    p = sub.add_parser("validate", help="validate a graph against a schema")
    p.add_argument("--graph", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--report", help="write the full report as JSON")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("export", help="translate a schema to ShEx or SHACL")
    p.add_argument("--schema", required=True)
    p.add_argument("--targets")
    p.add_argument("--format", choices=("shex", "shacl"), required=True)
    p.add_argument("--choice", choices=("xone", "or"), default="xone")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("stats", help="predicate statistics over a sample")
    p.add_argument("--graph", required=True)
    p.add_argument("--target", action="append")
    p.add_argument("--predicate", help="focus predicate for the annotated lattice")
    p.add_argument("--out-dir", help="write CSV tables and PNG figures here")
    add_rates(p)
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("pattern-from-ontology", help="derive a pattern from RDFS axioms")
    p.add_argument("--ontology", required=True)
    p.add_argument("--inherit", action="store_true", help="repeat superclass properties")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_pattern_from_ontology)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--graph", help="default graph file for new sessions")
    p.add_argument("--ui", help="directory of static UI assets to mount at /ui")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (RdfSyntaxError, SchemaError, PatternError, InferenceError, LatticeConfigError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
