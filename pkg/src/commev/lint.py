"""Validation engine: metamodel constraints, unity criteria, guidelines.

``run_lints`` aggregates every pass over a repository into one sorted,
reproducible report.  Individual passes are plain functions returning
diagnostics so they can be used (and tested) in isolation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace

from . import msl
from .base import CyclicResidue, ParseError, SourceLoc
from .ced import CommunicativeEvent, EventVariant, ModelRepository, NodeKind
from .diagnostics import CODE_TABLE, Diagnostic, Severity, make, severity_rank
from .graph import classify_precedences, event_depth
from .partition import MergedGraph, check_partition, merge_views
from .templates import check_template

_METAMODEL_CODE = re.compile(r"^CA-C\d{2}$")


@dataclass(frozen=True)
class LintConfig:
    stage: str = "analysis"
    severity_overrides: dict[str, Severity] = field(default_factory=dict)
    disabled: frozenset[str] = frozenset()
    max_diagram_elements: int = 50
    strict_table_c4: bool = False

    def effective_severity(self, diagnostic: Diagnostic) -> Severity:
        override = self.severity_overrides.get(diagnostic.code)
        if override is None:
            return diagnostic.severity
        # metamodel constraints are grammar rules: never demote below warning
        if _METAMODEL_CODE.match(diagnostic.code) and severity_rank(override) > severity_rank(
            Severity.WARNING
        ):
            return Severity.WARNING
        return override


def parse_config(text: str, file: str = "<config>") -> LintConfig:
    """Line-oriented ``key = value`` configuration.

    Keys: ``stage``, ``max_diagram_elements``, ``strict_table_c4``,
    ``disable`` (comma-separated codes) and ``severity.CA-XXX`` entries.
    """
    stage = "analysis"
    overrides: dict[str, Severity] = {}
    disabled: set[str] = set()
    max_elements = 50
    strict_c4 = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        loc = SourceLoc(file, lineno, 1)
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"expected 'key = value', got '{line}'", loc)
        key = key.strip()
        value = value.strip()
        if key == "stage":
            if value not in msl.STAGES:
                raise ParseError(f"unknown stage '{value}'", loc)
            stage = value
        elif key == "max_diagram_elements":
            if not value.isdigit():
                raise ParseError("max_diagram_elements takes an integer", loc)
            max_elements = int(value)
        elif key == "strict_table_c4":
            if value not in ("true", "false"):
                raise ParseError("strict_table_c4 takes true or false", loc)
            strict_c4 = value == "true"
        elif key == "disable":
            for code in value.split(","):
                code = code.strip()
                if code and code not in CODE_TABLE:
                    raise ParseError(f"unknown diagnostic code '{code}'", loc)
                if code:
                    disabled.add(code)
        elif key.startswith("severity."):
            code = key[len("severity.") :]
            if code not in CODE_TABLE:
                raise ParseError(f"unknown diagnostic code '{code}'", loc)
            try:
                overrides[code] = Severity(value)
            except ValueError:
                raise ParseError(f"unknown severity '{value}'", loc) from None
        else:
            raise ParseError(f"unknown configuration key '{key}'", loc)
    return LintConfig(
        stage=stage,
        severity_overrides=overrides,
        disabled=frozenset(disabled),
        max_diagram_elements=max_elements,
        strict_table_c4=strict_c4,
    )


# -- metamodel constraints ------------------------------------------------------


def check_metamodel(
    repo: ModelRepository, graph: MergedGraph | None = None, cfg: LintConfig | None = None
) -> list[Diagnostic]:
    """Structural constraints on the merged graph and the repository."""
    cfg = cfg or LintConfig()
    if graph is None:
        graph = merge_views(repo)
    findings: list[Diagnostic] = []

    for edge in graph.edges:
        if edge.target_kind is NodeKind.START:
            findings.append(
                make(
                    "CA-C01",
                    f"start node has an incoming precedence relation from {edge.source}",
                    edge.loc,
                )
            )
        if edge.source_kind is NodeKind.END:
            findings.append(
                make(
                    "CA-C02",
                    f"end node has an outgoing precedence relation to {edge.target}",
                    edge.loc,
                )
            )

    for key in sorted(graph.nodes):
        info = graph.nodes[key]
        if info.kind not in (NodeKind.AND, NodeKind.OR):
            continue
        n_in = len(graph.incoming(key))
        n_out = len(graph.outgoing(key))
        if info.kind is NodeKind.AND:
            is_join = n_in >= 2 and n_out == 1
            is_fork = n_in == 1 and n_out >= 2
            if not (is_join or is_fork):
                findings.append(
                    make(
                        "CA-C03",
                        f"and node {key} has {n_in} incoming and {n_out} outgoing precedence "
                        "relations (a join needs >=2 in and 1 out, a fork 1 in and >=2 out)",
                        info.loc,
                        element=key,
                    )
                )
        else:
            if cfg.strict_table_c4:
                ok = n_in == 1 and n_out >= 2
                expected = "1 incoming and >=2 outgoing"
            else:
                ok = n_in >= 2 and n_out == 1
                expected = ">=2 incoming and 1 outgoing"
            if not ok:
                findings.append(
                    make(
                        "CA-C04",
                        f"or node {key} has {n_in} incoming and {n_out} outgoing precedence "
                        f"relations (expected {expected})",
                        info.loc,
                        element=key,
                    )
                )

    by_process: dict[str, dict[int, CommunicativeEvent]] = {}
    for event in repo.events:
        seen = by_process.setdefault(event.process, {})
        if event.number in seen:
            findings.append(
                make(
                    "CA-C05",
                    f"events \"{seen[event.number].name}\" and \"{event.name}\" of process "
                    f"{event.process} share number {event.number}",
                    event.loc,
                    element=event.id,
                )
            )
        else:
            seen[event.number] = event

    for event in repo.events:
        _check_variant_numbers(event.id, event.variants, findings)

    return findings


def _check_variant_numbers(
    parent_id: str, variants: tuple[EventVariant, ...], findings: list[Diagnostic]
) -> None:
    seen: dict[int, EventVariant] = {}
    for variant in variants:
        if variant.number in seen:
            findings.append(
                make(
                    "CA-C06",
                    f"variants \"{seen[variant.number].name}\" and \"{variant.name}\" of "
                    f"{parent_id} share number {variant.number}",
                    variant.loc,
                    element=variant.id,
                )
            )
        else:
            seen[variant.number] = variant
        _check_variant_numbers(variant.id, variant.variants, findings)


# -- structures (delegated checks plus event-bound formulas) ---------------------


def check_structures(repo: ModelRepository, cfg: LintConfig | None = None) -> list[Diagnostic]:
    """Field-level validation of every structure at the configured stage,
    plus resolution of specialisation-condition field references against
    each event's ingoing message."""
    cfg = cfg or LintConfig()
    findings: list[Diagnostic] = []
    for name in sorted(repo.message_structures):
        structure = repo.message_structures[name]
        file = repo.structure_files.get(name, "<msl>")
        findings.extend(msl.validate_structure(structure, cfg.stage, file))

    for event in repo.events:
        fields: set[str] = set()
        for interaction in event.ingoing():
            structure = repo.message_structures.get(interaction.message_ref or "")
            if structure is not None:
                fields.update(p.field.name for p in msl.collect_fields(structure))
        for variant in event.all_variants():
            if variant.condition is None:
                continue
            for ref in variant.condition.field_refs:
                if ref not in fields:
                    findings.append(
                        make(
                            "CA-S02",
                            f"specialisation condition of {variant.id} references unknown "
                            f"field ':{ref}'",
                            variant.loc,
                            element=variant.id,
                        )
                    )
    return findings


# -- unity criteria --------------------------------------------------------------


def check_unity(repo: ModelRepository) -> list[Diagnostic]:
    """Trigger, communication and reaction unity.

    CA-U01 (error): no primary role, so trigger responsibility is not
    external.  CA-U02 (warning): the ingoing message is missing or conveys
    no new information (no input fields).  CA-U03 (info): nothing leaves
    the event; raised only when a template exists and its reaction section
    is empty too, because work-practice synchronism is not in the model.
    """
    findings: list[Diagnostic] = []
    templates_by_event = {spec.header.event_id: spec for spec in repo.templates}
    for event in repo.events:
        if not event.primary_roles():
            findings.append(
                make(
                    "CA-U01",
                    f"event {event.id} has no primary role; trigger responsibility must be "
                    "external",
                    event.loc,
                    element=event.id,
                )
            )
        structures = [
            repo.message_structures[i.message_ref]
            for i in event.ingoing()
            if i.message_ref in repo.message_structures
        ]
        if not structures:
            findings.append(
                make(
                    "CA-U02",
                    f"event {event.id} has no resolvable ingoing message structure",
                    event.loc,
                    element=event.id,
                )
            )
        elif not any(
            p.field.props.op == "i" for s in structures for p in msl.collect_fields(s)
        ):
            findings.append(
                make(
                    "CA-U02",
                    f"message of event {event.id} conveys no input fields (op i)",
                    event.loc,
                    element=event.id,
                )
            )
        template = templates_by_event.get(event.id)
        if not event.outgoing() and template is not None and template.reaction.is_empty():
            findings.append(
                make(
                    "CA-U03",
                    f"event {event.id} has no outgoing interaction and its template's "
                    "reaction section is empty",
                    event.loc,
                    element=event.id,
                )
            )
    return findings


# -- guidelines -------------------------------------------------------------------

_ARTICLES = {"a", "an", "the"}


def _name_follows_nomination(name: str) -> bool:
    """Shallow actor-verb-object pattern: at least three words with a
    verb-looking token shortly after the actor."""
    tokens = name.split()
    if len(tokens) < 3:
        return False
    window = tokens[1:5]
    return any(t.islower() and len(t) > 3 and t.endswith("s") for t in window)


def check_guidelines(repo: ModelRepository, cfg: LintConfig | None = None) -> list[Diagnostic]:
    """Advisory checks: naming, variant paths, diagram size, label match."""
    cfg = cfg or LintConfig()
    graph = merge_views(repo)
    findings: list[Diagnostic] = []
    for event in repo.events:
        if not _name_follows_nomination(event.name):
            findings.append(
                make(
                    "CA-G01",
                    f"name of {event.id} (\"{event.name}\") does not follow the "
                    "'actor + action + object' nomination pattern",
                    event.loc,
                    element=event.id,
                )
            )
        if len(event.variants) >= 2:
            target_sets = []
            for variant in event.variants:
                keys = {variant.id} | {v.id for v in _nested(variant)}
                targets = frozenset(
                    edge.target for key in keys for edge in graph.outgoing(key)
                )
                target_sets.append(targets)
            if all(ts == target_sets[0] for ts in target_sets) and target_sets[0]:
                findings.append(
                    make(
                        "CA-G02",
                        f"all variants of {event.id} lead to the same successors; variants "
                        "should open distinct temporal paths",
                        event.loc,
                        element=event.id,
                    )
                )
        for interaction in event.ingoing():
            if interaction.message_ref is None:
                continue
            if interaction.label.casefold() != interaction.message_ref.casefold():
                findings.append(
                    make(
                        "CA-G04",
                        f"ingoing interaction \"{interaction.label}\" of {event.id} does not "
                        f"match its message structure name {interaction.message_ref}",
                        interaction.loc,
                        element=event.id,
                    )
                )
    for diagram in repo.diagrams:
        count = diagram.element_count()
        if count > cfg.max_diagram_elements:
            findings.append(
                make(
                    "CA-G03",
                    f"diagram \"{diagram.name}\" has {count} elements "
                    f"(budget {cfg.max_diagram_elements}); consider partitioning it",
                    diagram.loc,
                )
            )
    return findings


def _nested(variant: EventVariant) -> list[EventVariant]:
    out = []
    for child in variant.variants:
        out.append(child)
        out.extend(_nested(child))
    return out


# -- the aggregated report ---------------------------------------------------------


@dataclass(frozen=True)
class LintReport:
    diagnostics: tuple[Diagnostic, ...]

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.ERROR]

    def count(self, severity: Severity) -> int:
        return sum(1 for d in self.diagnostics if d.severity is severity)

    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]

    def to_text(self) -> str:
        lines = [d.render() for d in self.diagnostics]
        lines.append(
            f"{self.count(Severity.ERROR)} errors, {self.count(Severity.WARNING)} warnings, "
            f"{self.count(Severity.INFO)} infos"
        )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps([d.as_dict() for d in self.diagnostics], indent=2, ensure_ascii=False) + "\n"


def run_lints(repo: ModelRepository, cfg: LintConfig | None = None) -> LintReport:
    """All passes, with severity overrides and disabled codes applied and
    the result sorted by (file, line, column, code); stable across runs."""
    cfg = cfg or LintConfig()
    graph = merge_views(repo)
    findings: list[Diagnostic] = []
    findings.extend(check_metamodel(repo, graph, cfg))
    findings.extend(check_unity(repo))
    findings.extend(check_guidelines(repo, cfg))
    findings.extend(check_structures(repo, cfg))
    findings.extend(check_partition(repo, graph))
    _, unreachable = event_depth(repo, graph)
    findings.extend(unreachable)
    try:
        classify_precedences(repo, graph)
    except CyclicResidue as exc:
        anchor = graph.edges[0].loc if graph.edges else SourceLoc("<model>", 1, 1)
        findings.append(make("CA-X02", str(exc), anchor))
    for spec in repo.templates:
        findings.extend(check_template(spec, repo))

    final: list[Diagnostic] = []
    for diagnostic in findings:
        if diagnostic.code in cfg.disabled:
            continue
        severity = cfg.effective_severity(diagnostic)
        if severity is not diagnostic.severity:
            diagnostic = replace(diagnostic, severity=severity)
        final.append(diagnostic)
    final.sort(key=lambda d: d.sort_key)
    return LintReport(tuple(final))
