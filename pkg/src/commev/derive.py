"""Class-model derivation from message structures.

Each communicative event contributes a class-diagram view derived from
its ingoing message structure:

  * every named aggregation becomes a class (the aggregation inside an
    iteration included);
  * an iteration yields a composition from the nearest enclosing class to
    the iterated class, one to many;
  * a field whose domain resolves in the business-object registry (after
    name normalization) becomes a reference association many-to-one, not
    an attribute;
  * remaining fields become attributes: op ``i`` stored, ``g`` a generated
    identifier, ``d`` derived (keeping its formula);
  * specialisation variants become classes composed one-to-one under the
    class owning the specialisation.

The full model integrates the views in temporal-precedence order: classes
merge by name, attribute sets union (first writer wins on conflicting
domains, reported as CA-D02) and associations deduplicate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import msl
from .base import SourceLoc
from .ced import CommunicativeEvent, ModelRepository
from .diagnostics import Diagnostic, make
from .graph import direct_precedents, topological_order
from .partition import MergedGraph, merge_views


def normalize_class_name(raw: str) -> str:
    """``"CLIENT ADDRESS"`` and ``"Client address"`` both map to
    ``ClientAddress``: words capitalized, spaces stripped."""
    return "".join(word[:1].upper() + word[1:].lower() for word in raw.split())


def normalize_attribute_name(raw: str) -> str:
    return normalize_class_name(raw)


@dataclass(frozen=True)
class Attribute:
    name: str
    domain: str  # rendered domain
    kind: str  # "stored" | "generated_id" | "derived"
    formula: msl.FormulaText | None = None


@dataclass
class Class:
    name: str
    attributes: list[Attribute] = field(default_factory=list)
    origin_events: set[str] = field(default_factory=set)

    def attribute(self, name: str) -> Attribute | None:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        return None


@dataclass(frozen=True)
class Association:
    source: str
    target: str
    kind: str  # "composition" | "reference"
    card_source: str  # "one" | "many"
    card_target: str
    origin_event: str


@dataclass
class ClassModel:
    classes: dict[str, Class] = field(default_factory=dict)
    associations: list[Association] = field(default_factory=list)

    def sorted_classes(self) -> list[Class]:
        return [self.classes[name] for name in sorted(self.classes)]

    def sorted_associations(self) -> list[Association]:
        return sorted(
            self.associations,
            key=lambda a: (a.source, a.target, a.kind, a.card_source, a.card_target),
        )

    def normalized(self) -> "ClassModel":
        """Deterministic form: classes and attributes sorted by name."""
        model = ClassModel()
        for cls in self.sorted_classes():
            model.classes[cls.name] = Class(
                name=cls.name,
                attributes=sorted(cls.attributes, key=lambda a: a.name),
                origin_events=set(sorted(cls.origin_events)),
            )
        model.associations = self.sorted_associations()
        return model

    def composition(self, source: str, target: str) -> Association | None:
        for assoc in self.associations:
            if assoc.kind == "composition" and assoc.source == source and assoc.target == target:
                return assoc
        return None

    def reference(self, source: str, target: str) -> Association | None:
        for assoc in self.associations:
            if assoc.kind == "reference" and assoc.source == source and assoc.target == target:
                return assoc
        return None


_OP_TO_KIND = {"i": "stored", "g": "generated_id", "d": "derived"}


def _domain_class(domain: msl.DomainRef, registry: set[str]) -> str | None:
    """Registry class a field domain refers to, or None for data fields."""
    if isinstance(domain, msl.EnumDomain):
        return None
    normalized = normalize_class_name(domain.name)
    if domain.name.strip().lower() in msl.BASIC_DOMAINS:
        return None
    return normalized if normalized in registry else None


def _is_suspect_reference(domain: msl.DomainRef) -> bool:
    if isinstance(domain, msl.EnumDomain):
        return False
    return domain.name.strip().lower() not in msl.BASIC_DOMAINS


def derive_view(
    event: CommunicativeEvent,
    structure: msl.MessageStructure,
    registry: set[str],
    file: str = "<msl>",
) -> tuple[ClassModel, list[Diagnostic]]:
    """The class-diagram view contributed by one event's message.

    The registry holds normalized class names of known business objects.
    Reference fields whose domain is neither basic nor registered are
    reported as CA-D01 and kept as stored attributes.
    """
    model = ClassModel()
    findings: list[Diagnostic] = []
    _walk(structure.root, None, event, registry, model, findings, file)
    return model, findings


def _class_for(model: ClassModel, name: str, event_id: str) -> Class:
    cls = model.classes.get(name)
    if cls is None:
        cls = Class(name=name)
        model.classes[name] = cls
    cls.origin_events.add(event_id)
    return cls


def _walk(
    node: msl.Substructure,
    owner: str | None,
    event: CommunicativeEvent,
    registry: set[str],
    model: ClassModel,
    findings: list[Diagnostic],
    file: str,
) -> None:
    if isinstance(node, msl.Aggregation):
        class_name = normalize_class_name(node.name or "")
        cls = _class_for(model, class_name, event.id)
        for child in node.children:
            if isinstance(child, msl.Field):
                _add_field(cls, child, event, registry, model, findings, file)
            else:
                _walk(child, class_name, event, registry, model, findings, file)
        return
    if isinstance(node, msl.Iteration):
        body = node.body
        if not isinstance(body, msl.Aggregation):
            raise ValueError("iteration body must be an aggregation; desugar first")
        member = normalize_class_name(body.name or "")
        if owner is not None:
            model.associations.append(
                Association(owner, member, "composition", "one", "many", event.id)
            )
        _walk(body, owner, event, registry, model, findings, file)
        return
    if isinstance(node, msl.Specialisation):
        for variant in node.variants:
            if not isinstance(variant, msl.Aggregation):
                raise ValueError("specialisation variant must be an aggregation; desugar first")
            variant_name = normalize_class_name(variant.name or "")
            if owner is not None:
                model.associations.append(
                    Association(owner, variant_name, "composition", "one", "one", event.id)
                )
            _walk(variant, variant_name, event, registry, model, findings, file)
        return
    raise ValueError(f"unexpected node {node!r}")


def _add_field(
    cls: Class,
    fld: msl.Field,
    event: CommunicativeEvent,
    registry: set[str],
    model: ClassModel,
    findings: list[Diagnostic],
    file: str,
) -> None:
    props = fld.props
    referenced = _domain_class(props.domain, registry)
    if referenced is not None:
        model.associations.append(
            Association(cls.name, referenced, "reference", "many", "one", event.id)
        )
        _class_for(model, referenced, event.id)
        return
    if _is_suspect_reference(props.domain):
        loc = fld.loc or SourceLoc(file, 0, 0)
        findings.append(
            make(
                "CA-D01",
                f"domain '{props.domain.render()}' of field '{fld.name}' is not a registered "
                "business object; keeping it as a stored attribute",
                loc,
                element=f"{event.id}:{fld.name}",
            )
        )
    attr = Attribute(
        name=normalize_attribute_name(fld.name),
        domain=props.domain.render(),
        kind=_OP_TO_KIND[props.op],
        formula=props.derivation_formula,
    )
    existing = cls.attribute(attr.name)
    if existing is None:
        cls.attributes.append(attr)


def integrate(views: list[ClassModel]) -> tuple[ClassModel, list[Diagnostic]]:
    """Merge views: classes by name, attributes unioned (first writer wins
    on domain conflicts, CA-D02), associations deduplicated."""
    merged = ClassModel()
    findings: list[Diagnostic] = []
    seen_assoc: set[tuple[str, str, str]] = set()
    for view in views:
        for cls in view.sorted_classes():
            target = merged.classes.get(cls.name)
            if target is None:
                merged.classes[cls.name] = Class(
                    name=cls.name,
                    attributes=list(cls.attributes),
                    origin_events=set(cls.origin_events),
                )
                continue
            target.origin_events.update(cls.origin_events)
            for attr in cls.attributes:
                existing = target.attribute(attr.name)
                if existing is None:
                    target.attributes.append(attr)
                elif existing.domain != attr.domain or existing.kind != attr.kind:
                    findings.append(
                        make(
                            "CA-D02",
                            f"attribute {cls.name}.{attr.name} integrated with conflicting "
                            f"definitions ({existing.kind} {existing.domain} kept, "
                            f"{attr.kind} {attr.domain} dropped)",
                            SourceLoc("<integration>", 0, 0),
                            element=f"{cls.name}.{attr.name}",
                        )
                    )
        for assoc in view.sorted_associations():
            key = (assoc.source, assoc.target, assoc.kind)
            if key in seen_assoc:
                continue
            seen_assoc.add(key)
            merged.associations.append(assoc)
    return merged.normalized(), findings


def derive_class_model(
    repo: ModelRepository, graph: MergedGraph | None = None
) -> tuple[ClassModel, list[Diagnostic]]:
    """Iteratively integrate per-event views in temporal order.

    The registry starts from declared business objects plus the classes
    created by globally initiatory events (events with no precedents), and
    accumulates every derived class so later events can reference earlier
    business objects.
    """
    order = topological_order(repo, graph)
    registry: set[str] = {normalize_class_name(name) for name in repo.business_objects}

    def structure_of(event: CommunicativeEvent) -> msl.MessageStructure | None:
        for interaction in event.ingoing():
            candidate = repo.message_structures.get(interaction.message_ref or "")
            if candidate is not None:
                return candidate
        return None

    merged = graph if graph is not None else merge_views(repo)
    for event in order:
        if direct_precedents(repo, event, merged):
            continue
        structure = structure_of(event)
        if structure is None:
            continue
        seed_view, _ = derive_view(event, structure, registry)
        registry.update(seed_view.classes)

    views: list[ClassModel] = []
    findings: list[Diagnostic] = []
    for event in order:
        structure = structure_of(event)
        if structure is None:
            continue
        file = repo.structure_files.get(structure.name, "<msl>")
        view, view_findings = derive_view(event, structure, registry, file)
        registry.update(view.classes)
        views.append(view)
        findings.extend(view_findings)
    model, merge_findings = integrate(views)
    findings.extend(merge_findings)
    return model, findings


# -- exports ------------------------------------------------------------------


def class_model_to_json(model: ClassModel) -> str:
    normalized = model.normalized()
    payload = {
        "classes": [
            {
                "name": cls.name,
                "origin_events": sorted(cls.origin_events),
                "attributes": [
                    {
                        "name": attr.name,
                        "domain": attr.domain,
                        "kind": attr.kind,
                        "formula": attr.formula.text if attr.formula else None,
                    }
                    for attr in cls.attributes
                ],
            }
            for cls in normalized.sorted_classes()
        ],
        "associations": [
            {
                "from": assoc.source,
                "to": assoc.target,
                "kind": assoc.kind,
                "card_from": assoc.card_source,
                "card_to": assoc.card_target,
                "origin_event": assoc.origin_event,
            }
            for assoc in normalized.sorted_associations()
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


_KIND_MARK = {"stored": "", "generated_id": " {id}", "derived": " {derived}"}


def class_model_to_dot(model: ClassModel) -> str:
    """Classes as record nodes; compositions with a diamond tail,
    references with an open arrow."""
    normalized = model.normalized()
    lines = [
        "digraph class_model {",
        "  // legend: record = class; edge with diamond tail = composition",
        "  // (container to member); open arrow = reference (holder to target)",
        "  node [shape=record, fontsize=10];",
        "  rankdir=BT;",
    ]
    for cls in normalized.sorted_classes():
        attrs = "\\l".join(
            f"{attr.name}: {attr.domain}{_KIND_MARK[attr.kind]}" for attr in cls.attributes
        )
        label = f"{{{cls.name}|{attrs}\\l}}" if attrs else f"{{{cls.name}}}"
        lines.append(f'  "{cls.name}" [label="{label}"];')
    for assoc in normalized.sorted_associations():
        if assoc.kind == "composition":
            style = "dir=back, arrowtail=diamond"
            head, tail = assoc.source, assoc.target
            label = f"1..{assoc.card_target if assoc.card_target == 'one' else '*'}"
            lines.append(f'  "{head}" -> "{tail}" [{style}, label="{label}"];')
        else:
            lines.append(
                f'  "{assoc.source}" -> "{assoc.target}" '
                f'[arrowhead=open, style=dashed, label="*..1"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
