"""shapekit: semi-automatic construction of shape schemas for RDF data.

Induce uniform constraints from node samples, steer construction with
schema patterns, validate graphs against the abstract constraint language,
export to ShEx and SHACL, and refine interactively through a session
workspace, an HTTP service and a CLI.
"""

__version__ = "0.1.0"

from .graph import RdfGraph
from .infer import InferenceConfig, build_from_pattern, lac, msc, pattern_from_ontology
from .lattice import ValueLattice
from .model import Schema, ShapeConstraint, UniformConstraint, as_uniform
from .scl_text import parse_scl, print_scl
from .pattern import SchemaPattern, parse_pattern, print_pattern
from .targets import TargetSpec
from .terms import Blank, Iri, Literal, Triple
from .turtle import load_graph, parse_graph, serialize_ntriples, serialize_turtle
from .validate import ValidationReport, satisfies_value, validate, validate_node
