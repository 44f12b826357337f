"""Toolkit for communication-oriented requirements models.

Parses, validates and transforms communicative event diagrams (``.ced``),
message structures (``.msl``) and event specification templates (``.cet``):
metamodel constraint checking, unity-criteria and guideline lints,
cross-diagram partition consistency, class-model derivation and template
generation, plus DOT/JSON exports and a command-line front end.
"""

from .base import (
    CyclicResidue,
    DuplicateDefinition,
    ModelError,
    ParseError,
    SourceLoc,
    StructureError,
    UnknownEvent,
)
from .ced import (
    CommunicativeEvent,
    Diagram,
    EventVariant,
    Interaction,
    ModelRepository,
    Process,
    RoleBinding,
    assign_identifiers,
    parse_model,
)
from .derive import (
    ClassModel,
    class_model_to_dot,
    class_model_to_json,
    derive_class_model,
    derive_view,
    integrate,
)
from .diagnostics import CODE_TABLE, Diagnostic, Severity
from .dot import graph_to_dot
from .graph import (
    classify_precedences,
    direct_precedents,
    direct_successors,
    event_depth,
    topological_order,
)
from .lint import LintConfig, LintReport, check_guidelines, check_metamodel, check_unity, run_lints
from .msl import (
    MessageStructure,
    collect_fields,
    desugar,
    parse_message_structure,
    parse_msl_file,
    serialize,
    validate_structure,
)
from .partition import MergedGraph, check_partition, merge_views
from .templates import EventSpec, check_template, generate_template, parse_template, render_template

__version__ = "0.1.0"

__all__ = [
    "CODE_TABLE",
    "ClassModel",
    "CommunicativeEvent",
    "CyclicResidue",
    "Diagnostic",
    "Diagram",
    "DuplicateDefinition",
    "EventSpec",
    "EventVariant",
    "Interaction",
    "LintConfig",
    "LintReport",
    "MergedGraph",
    "MessageStructure",
    "ModelError",
    "ModelRepository",
    "ParseError",
    "Process",
    "RoleBinding",
    "Severity",
    "SourceLoc",
    "StructureError",
    "UnknownEvent",
    "assign_identifiers",
    "check_guidelines",
    "check_metamodel",
    "check_partition",
    "check_template",
    "check_unity",
    "class_model_to_dot",
    "class_model_to_json",
    "classify_precedences",
    "collect_fields",
    "derive_class_model",
    "derive_view",
    "desugar",
    "direct_precedents",
    "direct_successors",
    "event_depth",
    "generate_template",
    "graph_to_dot",
    "integrate",
    "merge_views",
    "parse_message_structure",
    "parse_model",
    "parse_msl_file",
    "parse_template",
    "render_template",
    "run_lints",
    "serialize",
    "topological_order",
    "validate_structure",
]
