"""Event specification templates: the ``.cet`` format and its checks.

A template collects the requirements of one communicative event under four
sections.  The file format is line oriented: an ``event "ID"`` header,
``[section]`` markers, ``key: value`` lines and ``-`` list items attached
to the preceding list key:

    event "SALE 1"
    [general]
    name: A client places an order
    goal: Record the order a client places.
    [contact]
    primary: Client
    interface: Salesman
    [message]
    structure: ORDER
    fields:
    - Order number: A sequential number that identifies the order.
    structural:
    - One order can have many destinations.
    [reaction]
    treatments:
    - The order is recorded.
    communications:
    - The Sales Manager is informed of the order placement.

Rendering produces a Markdown document with the four numbered sections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import msl
from .base import ParseError, SourceLoc, UnknownEvent
from .ced import Direction, ModelRepository
from .diagnostics import Diagnostic, make


@dataclass
class TemplateHeader:
    event_id: str
    name: str | None = None
    description: str | None = None
    goal: str | None = None
    diagram_ref: str | None = None


@dataclass
class TemplateContact:
    primary_actor: str | None = None
    support_actors: list[str] = field(default_factory=list)
    interface_actors: list[str] = field(default_factory=list)
    availability: str | None = None
    medium: str | None = None
    accreditation: str | None = None
    verification: str | None = None
    occurrence_constraints: str | None = None
    frequency: str | None = None


@dataclass
class TemplateMessage:
    structure_ref: str | None = None
    field_descriptions: dict[str, str] = field(default_factory=dict)
    structural_constraints: list[str] = field(default_factory=list)
    contextual_constraints: list[str] = field(default_factory=list)


@dataclass
class TemplateReaction:
    data_view_ref: str | None = None
    treatments: list[str] = field(default_factory=list)
    linked_behaviours: list[str] = field(default_factory=list)
    linked_communications: list[str] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (
            self.data_view_ref
            or self.treatments
            or self.linked_behaviours
            or self.linked_communications
        )


@dataclass
class EventSpec:
    header: TemplateHeader
    contact: TemplateContact = field(default_factory=TemplateContact)
    message: TemplateMessage = field(default_factory=TemplateMessage)
    reaction: TemplateReaction = field(default_factory=TemplateReaction)
    loc: SourceLoc | None = field(default=None, compare=False)
    file: str = field(default="<cet>", compare=False)


_SECTIONS = ("general", "contact", "message", "reaction")

# section -> scalar keys -> setter target
_SCALAR_KEYS = {
    "general": {"name", "description", "goal", "diagram"},
    "contact": {
        "primary",
        "availability",
        "medium",
        "accreditation",
        "verification",
        "occurrence",
        "frequency",
    },
    "message": {"structure"},
    "reaction": {"data-view"},
}
_LIST_KEYS = {
    "general": set(),
    "contact": {"support", "interface"},
    "message": {"fields", "structural", "contextual"},
    "reaction": {"treatments", "behaviours", "communications"},
}


def parse_template(text: str, file: str = "<cet>") -> EventSpec:
    """Parse one ``.cet`` file."""
    spec: EventSpec | None = None
    section: str | None = None
    list_key: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        loc = SourceLoc(file, lineno, 1)
        if spec is None:
            if not line.startswith("event"):
                raise ParseError('expected \'event "ID"\' header line', loc)
            ident = line[len("event") :].strip()
            if not (ident.startswith('"') and ident.endswith('"') and len(ident) > 2):
                raise ParseError("event id must be double-quoted", loc)
            spec = EventSpec(header=TemplateHeader(event_id=ident[1:-1]), loc=loc, file=file)
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            list_key = None
            if section not in _SECTIONS:
                raise ParseError(
                    f"unknown section [{section}] (expected one of {', '.join(_SECTIONS)})", loc
                )
            continue
        if section is None:
            raise ParseError("content before any [section] marker", loc)
        if line.startswith("-"):
            if list_key is None:
                raise ParseError("list item without a preceding list key", loc)
            _apply_list_item(spec, section, list_key, line[1:].strip(), loc)
            continue
        key, sep, value = line.partition(":")
        key = key.strip().lower()
        value = value.strip()
        if not sep:
            raise ParseError(f"expected 'key: value', got '{line}'", loc)
        if key in _LIST_KEYS[section]:
            list_key = key
            if value:
                _apply_list_item(spec, section, key, value, loc)
            continue
        if key not in _SCALAR_KEYS[section]:
            raise ParseError(f"unknown key '{key}' in section [{section}]", loc)
        list_key = None
        _apply_scalar(spec, section, key, value, loc)
    if spec is None:
        raise ParseError("empty template", SourceLoc(file, 1, 1))
    return spec


def _apply_scalar(spec: EventSpec, section: str, key: str, value: str, loc: SourceLoc) -> None:
    target = {
        ("general", "name"): ("header", "name"),
        ("general", "description"): ("header", "description"),
        ("general", "goal"): ("header", "goal"),
        ("general", "diagram"): ("header", "diagram_ref"),
        ("contact", "primary"): ("contact", "primary_actor"),
        ("contact", "availability"): ("contact", "availability"),
        ("contact", "medium"): ("contact", "medium"),
        ("contact", "accreditation"): ("contact", "accreditation"),
        ("contact", "verification"): ("contact", "verification"),
        ("contact", "occurrence"): ("contact", "occurrence_constraints"),
        ("contact", "frequency"): ("contact", "frequency"),
        ("message", "structure"): ("message", "structure_ref"),
        ("reaction", "data-view"): ("reaction", "data_view_ref"),
    }[(section, key)]
    holder = getattr(spec, target[0])
    if getattr(holder, target[1]) is not None:
        raise ParseError(f"key '{key}' set twice in section [{section}]", loc)
    setattr(holder, target[1], value)


def _apply_list_item(spec: EventSpec, section: str, key: str, item: str, loc: SourceLoc) -> None:
    if not item:
        raise ParseError("empty list item", loc)
    if key == "fields":
        name, sep, description = item.partition(":")
        if not sep:
            raise ParseError("field items use '- Field name: description'", loc)
        name = name.strip()
        if name in spec.message.field_descriptions:
            raise ParseError(f"field '{name}' described twice", loc)
        spec.message.field_descriptions[name] = description.strip()
        return
    target = {
        "support": spec.contact.support_actors,
        "interface": spec.contact.interface_actors,
        "structural": spec.message.structural_constraints,
        "contextual": spec.message.contextual_constraints,
        "treatments": spec.reaction.treatments,
        "behaviours": spec.reaction.linked_behaviours,
        "communications": spec.reaction.linked_communications,
    }[key]
    target.append(item)


# -- generation ---------------------------------------------------------------


def generate_template(repo: ModelRepository, event_id: str) -> EventSpec:
    """Prefill a template from the repository.

    Header and contact come from the event definition, the message section
    from the ingoing interaction (field descriptions stubbed per field) and
    linked communications from the outgoing interactions.  Raises
    ``UnknownEvent`` for unresolvable ids.
    """
    event = repo.event(event_id)
    if event is None:
        raise UnknownEvent(f"no event with id '{event_id}'")
    spec = EventSpec(
        header=TemplateHeader(
            event_id=event.id, name=event.name, goal=event.goal, description=None
        )
    )
    primaries = event.primary_roles()
    spec.contact.primary_actor = primaries[0] if primaries else None
    spec.contact.interface_actors = list(event.interface_roles())
    ingoing = event.ingoing()
    if ingoing and ingoing[0].message_ref:
        ref = ingoing[0].message_ref
        spec.message.structure_ref = ref
        structure = repo.message_structures.get(ref)
        if structure is not None:
            for path in msl.collect_fields(structure):
                spec.message.field_descriptions.setdefault(path.field.name, "")
    for interaction in event.outgoing():
        who = interaction.counterpart or "?"
        spec.reaction.linked_communications.append(
            f"{who} is informed via \"{interaction.label}\"."
        )
    return spec


# -- checking -----------------------------------------------------------------


def check_template(spec: EventSpec, repo: ModelRepository) -> list[Diagnostic]:
    """Consistency of one template against the repository.

    CA-T01 (error): the event id does not resolve.  CA-T02 (warning): the
    stated primary actor differs from the model.  CA-T03 (warning): field
    descriptions disagree with the referenced structure, in either
    direction.  CA-T04 (info): an outgoing interaction of the event has no
    matching linked communication.
    """
    findings: list[Diagnostic] = []
    loc = spec.loc or SourceLoc(spec.file, 1, 1)
    event = repo.event(spec.header.event_id)
    if event is None:
        findings.append(
            make(
                "CA-T01",
                f"template references unknown event \"{spec.header.event_id}\"",
                loc,
                element=spec.header.event_id,
            )
        )
    elif spec.contact.primary_actor is not None:
        primaries = event.primary_roles()
        if spec.contact.primary_actor not in primaries:
            stated = ", ".join(primaries) or "none"
            findings.append(
                make(
                    "CA-T02",
                    f"template primary actor '{spec.contact.primary_actor}' differs from the "
                    f"diagram ({stated})",
                    loc,
                    element=event.id,
                )
            )

    if spec.message.structure_ref is not None:
        structure = repo.message_structures.get(spec.message.structure_ref)
        if structure is None:
            findings.append(
                make(
                    "CA-T03",
                    f"template references unknown message structure "
                    f"'{spec.message.structure_ref}'",
                    loc,
                    element=spec.header.event_id,
                )
            )
        else:
            structure_fields = {p.field.name for p in msl.collect_fields(structure)}
            for name in spec.message.field_descriptions:
                if name not in structure_fields:
                    findings.append(
                        make(
                            "CA-T03",
                            f"description for '{name}' does not match any field of "
                            f"{structure.name}",
                            loc,
                            element=spec.header.event_id,
                        )
                    )
            for name in sorted(structure_fields):
                if name not in spec.message.field_descriptions:
                    findings.append(
                        make(
                            "CA-T03",
                            f"field '{name}' of {structure.name} lacks a description",
                            loc,
                            element=spec.header.event_id,
                        )
                    )

    if event is not None:
        haystack = " \n ".join(spec.reaction.linked_communications).casefold()
        for interaction in event.outgoing():
            role = (interaction.counterpart or "").casefold()
            label = interaction.label.casefold()
            if (role and role in haystack) or (label and label in haystack):
                continue
            findings.append(
                make(
                    "CA-T04",
                    f"linked communications omit outgoing interaction "
                    f"\"{interaction.label}\" to {interaction.counterpart}",
                    loc,
                    element=event.id,
                )
            )
    return findings


# -- rendering ----------------------------------------------------------------

_NONE = "(none specified)"


def render_template(spec: EventSpec, repo: ModelRepository | None = None) -> str:
    """Deterministic Markdown document with the four numbered sections."""
    lines: list[str] = []
    title = spec.header.name or _NONE
    lines.append(f"# {spec.header.event_id}. {title}")
    lines.append("")
    lines.append("## 1 General information")
    lines.append("")
    _kv(lines, "Goal", spec.header.goal)
    _kv(lines, "Description", spec.header.description)
    _kv(lines, "Explanatory diagram", spec.header.diagram_ref)
    lines.append("")
    lines.append("## 2 Contact requirements")
    lines.append("")
    _kv(lines, "Primary actor", spec.contact.primary_actor)
    _kv(lines, "Support actors", ", ".join(spec.contact.support_actors) or None)
    _kv(lines, "Interface actors", ", ".join(spec.contact.interface_actors) or None)
    _kv(lines, "Availability", spec.contact.availability)
    _kv(lines, "Medium", spec.contact.medium)
    _kv(lines, "Accreditation", spec.contact.accreditation)
    _kv(lines, "Verification", spec.contact.verification)
    _kv(lines, "Occurrence constraints", spec.contact.occurrence_constraints)
    _kv(lines, "Frequency", spec.contact.frequency)
    lines.append("")
    lines.append("## 3 Message requirements")
    lines.append("")
    structure = None
    if repo is not None and spec.message.structure_ref:
        structure = repo.message_structures.get(spec.message.structure_ref)
    _kv(lines, "Message structure", spec.message.structure_ref)
    if structure is not None:
        lines.append("")
        lines.append("```")
        lines.append(msl.serialize(structure).rstrip("\n"))
        lines.append("```")
    lines.append("")
    lines.append("Field descriptions:")
    lines.append("")
    if spec.message.field_descriptions:
        for name, description in spec.message.field_descriptions.items():
            lines.append(f"- **{name}**: {description or _NONE}")
    else:
        lines.append(f"- {_NONE}")
    lines.append("")
    _bullets(lines, "Structural constraints", spec.message.structural_constraints)
    _bullets(lines, "Contextual constraints", spec.message.contextual_constraints)
    lines.append("## 4 Reaction requirements")
    lines.append("")
    _kv(lines, "Data model view", spec.reaction.data_view_ref)
    lines.append("")
    _bullets(lines, "Treatments", spec.reaction.treatments)
    _bullets(lines, "Linked behaviours", spec.reaction.linked_behaviours)
    _bullets(lines, "Linked communications", spec.reaction.linked_communications)
    return "\n".join(lines).rstrip("\n") + "\n"


def _kv(lines: list[str], label: str, value: str | None) -> None:
    lines.append(f"- **{label}**: {value if value else _NONE}")


def _bullets(lines: list[str], label: str, items: list[str]) -> None:
    lines.append(f"{label}:")
    lines.append("")
    if items:
        for item in items:
            lines.append(f"- {item}")
    else:
        lines.append(f"- {_NONE}")
    lines.append("")


def serialize_template(spec: EventSpec) -> str:
    """Canonical ``.cet`` text for a spec (used by template generation)."""
    out: list[str] = [f'event "{spec.header.event_id}"', ""]
    out.append("[general]")
    if spec.header.name is not None:
        out.append(f"name: {spec.header.name}")
    if spec.header.goal is not None:
        out.append(f"goal: {spec.header.goal}")
    if spec.header.description is not None:
        out.append(f"description: {spec.header.description}")
    if spec.header.diagram_ref is not None:
        out.append(f"diagram: {spec.header.diagram_ref}")
    out.append("")
    out.append("[contact]")
    if spec.contact.primary_actor is not None:
        out.append(f"primary: {spec.contact.primary_actor}")
    for actor in spec.contact.support_actors:
        out.append(f"support: {actor}")
    for actor in spec.contact.interface_actors:
        out.append(f"interface: {actor}")
    for key, value in (
        ("availability", spec.contact.availability),
        ("medium", spec.contact.medium),
        ("accreditation", spec.contact.accreditation),
        ("verification", spec.contact.verification),
        ("occurrence", spec.contact.occurrence_constraints),
        ("frequency", spec.contact.frequency),
    ):
        if value is not None:
            out.append(f"{key}: {value}")
    out.append("")
    out.append("[message]")
    if spec.message.structure_ref is not None:
        out.append(f"structure: {spec.message.structure_ref}")
    if spec.message.field_descriptions:
        out.append("fields:")
        for name, description in spec.message.field_descriptions.items():
            out.append(f"- {name}: {description}")
    if spec.message.structural_constraints:
        out.append("structural:")
        out.extend(f"- {item}" for item in spec.message.structural_constraints)
    if spec.message.contextual_constraints:
        out.append("contextual:")
        out.extend(f"- {item}" for item in spec.message.contextual_constraints)
    out.append("")
    out.append("[reaction]")
    if spec.reaction.data_view_ref is not None:
        out.append(f"data-view: {spec.reaction.data_view_ref}")
    if spec.reaction.treatments:
        out.append("treatments:")
        out.extend(f"- {item}" for item in spec.reaction.treatments)
    if spec.reaction.linked_behaviours:
        out.append("behaviours:")
        out.extend(f"- {item}" for item in spec.reaction.linked_behaviours)
    if spec.reaction.linked_communications:
        out.append("communications:")
        out.extend(f"- {item}" for item in spec.reaction.linked_communications)
    return "\n".join(out).rstrip() + "\n"
