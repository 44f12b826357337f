"""Communicative event diagrams: model types and the ``.ced`` text format.

A ``.ced`` file holds one or more diagrams.  Each diagram declares the
processes and events it fully defines, logical nodes, out-of-scope
references to events defined elsewhere, and precedence edges:

    diagram "Sales management" {
      process SALE "Sales management" {
        event 1 "A client places an order" {
          primary Client;
          interface Salesman;
          in "Order" message=ORDER;
          out "Order notice" to Sales Manager;
          goal "Record the order a client places.";
        }
        variant-event 3 "The supplier decides about the order" {
          primary Supplier;
          in "Decision" message=DECISION;
          variant 1 "The supplier accepts the order" condition=":Response = accept" { }
          variant 2 "The supplier rejects the order" { }
        }
        1 -> 3;
      }
      node and j1;
      extern "SUPP 2";
      "SUPP 2" -> j1;
      start; end;
    }

Edge endpoints are event numbers or variant paths (``3.1``) local to the
enclosing process block, quoted identifiers (``"SALE 1"``) naming a member
event or a declared out-of-scope reference, logical node ids, ``start`` or
``end``.  ``message NAME = <...>`` and ``field`` blocks embed message
structures inline; ``business-object`` declares a registry class name.
``#`` comments run to end of line.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from . import msl
from .base import DuplicateDefinition, ParseError, SourceLoc

ACRONYM_PATTERN = re.compile(r"^[A-Z][A-Z0-9]*$")
EVENT_ID_PATTERN = re.compile(r"^[A-Z][A-Z0-9]* \d+$")
NODE_ID_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_NUMPATH_PATTERN = re.compile(r"^\d+(\.\d+)*$")

_WORD_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-")


class RoleKind(enum.Enum):
    PRIMARY = "primary"
    RECEIVER = "receiver"
    INTERFACE = "interface"
    SUPPORT = "support"


class Direction(enum.Enum):
    INGOING = "in"
    OUTGOING = "out"


class NodeKind(enum.Enum):
    EVENT = "event"
    VARIANT = "variant"
    AND = "and"
    OR = "or"
    START = "start"
    END = "end"
    EXTERN = "extern"


@dataclass
class Process:
    acronym: str
    name: str
    loc: SourceLoc


@dataclass
class RoleBinding:
    role: str
    kind: RoleKind


@dataclass
class Interaction:
    direction: Direction
    label: str
    counterpart: str | None
    message_ref: str | None
    loc: SourceLoc


@dataclass
class EventVariant:
    number: int
    name: str
    condition: msl.FormulaText | None
    variants: tuple["EventVariant", ...]
    loc: SourceLoc
    id: str = ""


@dataclass
class CommunicativeEvent:
    process: str
    number: int
    name: str
    roles: list[RoleBinding]
    interactions: list[Interaction]
    variants: tuple[EventVariant, ...]
    goal: str | None
    precondition: str | None
    loc: SourceLoc
    diagram: str = ""
    id: str = ""

    def primary_roles(self) -> list[str]:
        return [r.role for r in self.roles if r.kind is RoleKind.PRIMARY]

    def receiver_roles(self) -> list[str]:
        return [r.role for r in self.roles if r.kind is RoleKind.RECEIVER]

    def interface_roles(self) -> list[str]:
        return [r.role for r in self.roles if r.kind is RoleKind.INTERFACE]

    def ingoing(self) -> list[Interaction]:
        return [i for i in self.interactions if i.direction is Direction.INGOING]

    def outgoing(self) -> list[Interaction]:
        return [i for i in self.interactions if i.direction is Direction.OUTGOING]

    def all_variants(self) -> list[EventVariant]:
        out: list[EventVariant] = []

        def walk(vs: tuple[EventVariant, ...]) -> None:
            for v in vs:
                out.append(v)
                walk(v.variants)

        walk(self.variants)
        return out


@dataclass
class LogicalNode:
    kind: NodeKind  # AND or OR
    node_id: str
    loc: SourceLoc


@dataclass
class Edge:
    source: str  # node key
    target: str
    source_kind: NodeKind
    target_kind: NodeKind
    loc: SourceLoc
    loopback: bool | None = None


@dataclass
class Diagram:
    name: str
    file: str
    loc: SourceLoc
    events: list[CommunicativeEvent] = field(default_factory=list)
    externs: dict[str, SourceLoc] = field(default_factory=dict)
    logical: dict[str, LogicalNode] = field(default_factory=dict)
    start_loc: SourceLoc | None = None
    end_loc: SourceLoc | None = None
    edges: list[Edge] = field(default_factory=list)

    def start_key(self) -> str:
        return f"{self.name}::start"

    def end_key(self) -> str:
        return f"{self.name}::end"

    def logical_key(self, node_id: str) -> str:
        return f"{self.name}::{node_id}"

    def member_event_ids(self) -> set[str]:
        return {e.id for e in self.events}

    def member_keys(self) -> set[str]:
        keys: set[str] = set()
        for e in self.events:
            keys.add(e.id)
            keys.update(v.id for v in e.all_variants())
        return keys

    def element_count(self) -> int:
        """Events, variants, logical nodes, interactions and edges."""
        n = len(self.events) + len(self.logical) + len(self.edges)
        for e in self.events:
            n += len(e.all_variants()) + len(e.interactions)
        return n


@dataclass
class ModelRepository:
    processes: dict[str, Process] = field(default_factory=dict)
    events: list[CommunicativeEvent] = field(default_factory=list)
    diagrams: list[Diagram] = field(default_factory=list)
    message_structures: dict[str, msl.MessageStructure] = field(default_factory=dict)
    structure_files: dict[str, str] = field(default_factory=dict)
    business_objects: set[str] = field(default_factory=set)
    templates: list = field(default_factory=list)  # templates.EventSpec

    def events_by_id(self) -> dict[str, CommunicativeEvent]:
        index: dict[str, CommunicativeEvent] = {}
        for event in self.events:
            index.setdefault(event.id, event)
        return index

    def event(self, event_id: str) -> CommunicativeEvent | None:
        return self.events_by_id().get(event_id)

    def variant_owner(self, key: str) -> CommunicativeEvent | None:
        """The event owning a variant key like ``SALE 3.1``, if any."""
        head = key.split(".", 1)[0]
        event = self.events_by_id().get(head)
        if event and any(v.id == key for v in event.all_variants()):
            return event
        return None


def assign_identifiers(repo: ModelRepository) -> ModelRepository:
    """Derive ids: events get ``ACRONYM number``, variants append ``.number``
    to their parent id, recursively.  Idempotent."""
    for event in repo.events:
        event.id = f"{event.process} {event.number}"
        _assign_variant_ids(event.variants, event.id)
    return repo


def _assign_variant_ids(variants: tuple[EventVariant, ...], parent_id: str) -> None:
    for variant in variants:
        variant.id = f"{parent_id}.{variant.number}"
        _assign_variant_ids(variant.variants, variant.id)


# -- parsing -----------------------------------------------------------------


class _Scanner:
    def __init__(self, text: str, file: str):
        self.text = text
        self.file = file
        self.pos = 0
        self.line = 1
        self.col = 1

    def loc(self) -> SourceLoc:
        return SourceLoc(self.file, self.line, self.col)

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def at_arrow(self) -> bool:
        return self.text.startswith("->", self.pos)

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_layout(self) -> None:
        while not self.eof():
            ch = self.peek()
            if ch == "#":
                while not self.eof() and self.peek() != "\n":
                    self.advance()
            elif ch.isspace():
                self.advance()
            else:
                return

    def error(self, message: str, loc: SourceLoc | None = None) -> ParseError:
        return ParseError(message, loc or self.loc())

    def expect_char(self, ch: str) -> None:
        self.skip_layout()
        if self.peek() != ch:
            got = self.peek() or "end of input"
            raise self.error(f"expected '{ch}', got '{got}'")
        self.advance()

    def expect_arrow(self) -> None:
        self.skip_layout()
        if not self.at_arrow():
            got = self.peek() or "end of input"
            raise self.error(f"expected '->', got '{got}'")
        self.advance()
        self.advance()

    def read_word(self, context: str = "a word") -> tuple[str, SourceLoc]:
        self.skip_layout()
        start = self.loc()
        if self.at_arrow():
            raise self.error(f"expected {context}, got '->'", start)
        chars: list[str] = []
        while not self.eof() and self.peek() in _WORD_CHARS and not self.at_arrow():
            chars.append(self.advance())
        if not chars:
            got = self.peek() or "end of input"
            raise self.error(f"expected {context}, got '{got}'", start)
        return "".join(chars), start

    def read_string(self) -> tuple[str, SourceLoc]:
        self.skip_layout()
        start = self.loc()
        if self.peek() != '"':
            got = self.peek() or "end of input"
            raise self.error(f"expected a double-quoted string, got '{got}'", start)
        self.advance()
        chars: list[str] = []
        while True:
            if self.eof() or self.peek() == "\n":
                raise self.error("unterminated string", start)
            ch = self.advance()
            if ch == "\\":
                if self.eof():
                    raise self.error("unterminated string", start)
                chars.append(self.advance())
            elif ch == '"':
                return "".join(chars), start
            else:
                chars.append(ch)

    def read_until_semicolon(self, context: str) -> tuple[str, SourceLoc]:
        """Free text (role names, message names) terminated by ';'."""
        self.skip_layout()
        start = self.loc()
        if self.peek() == '"':
            value, _ = self.read_string()
            self.expect_char(";")
            return value, start
        chars: list[str] = []
        while not self.eof() and self.peek() not in ";\n#{}":
            chars.append(self.advance())
        value = re.sub(r"\s+", " ", "".join(chars)).strip()
        if not value:
            raise self.error(f"expected {context}", start)
        self.expect_char(";")
        return value, start


# raw edge endpoint before resolution
@dataclass
class _Endpoint:
    kind: str  # "numpath" | "quoted" | "ident" | "start" | "end"
    value: str
    process: str | None
    loc: SourceLoc


@dataclass
class _RawEdge:
    source: _Endpoint
    target: _Endpoint
    loc: SourceLoc


class _CedParser:
    def __init__(self, text: str, file: str):
        self.s = _Scanner(text, file)
        self.file = file
        self.diagrams: list[Diagram] = []
        self.structures: list[msl.MessageStructure] = []
        self.business_objects: list[str] = []
        self.process_decls: list[Process] = []

    def parse_file(self) -> None:
        while True:
            self.s.skip_layout()
            if self.s.eof():
                return
            word, start = self.s.read_word("'diagram', 'message', 'field' or 'business-object'")
            if word == "diagram":
                self.parse_diagram(start)
            elif word == "message":
                self.parse_inline_message()
            elif word == "field":
                self.parse_field_block(start)
            elif word == "business-object":
                name, _ = self.s.read_until_semicolon("a business object name")
                self.business_objects.append(name)
            else:
                raise self.s.error(
                    f"unexpected '{word}' at top level (expected 'diagram', 'message', "
                    "'field' or 'business-object')",
                    start,
                )

    def parse_inline_message(self) -> None:
        inner = msl._Parser(self.s.text, self.file, self.s.pos, self.s.line, self.s.col)
        structure = inner.parse_structure()
        self.s.pos, self.s.line, self.s.col = inner.pos, inner.line, inner.col
        self.structures.append(structure)

    def parse_field_block(self, start: SourceLoc) -> None:
        # target name runs up to the opening brace
        self.s.skip_layout()
        chars: list[str] = []
        while not self.s.eof() and self.s.peek() != "{":
            if self.s.peek() in "\n#":
                raise self.s.error("expected '{' in field block", start)
            chars.append(self.s.advance())
        target = re.sub(r"\s+", " ", "".join(chars)).strip()
        if not target:
            raise self.s.error("expected a field name before '{'", start)
        inner = msl._Parser(self.s.text, self.file, self.s.pos, self.s.line, self.s.col)
        _, props, _ = inner.parse_prop_block()
        self.s.pos, self.s.line, self.s.col = inner.pos, inner.line, inner.col
        if not self.structures:
            raise ParseError("field block before any message structure", start)
        msl._apply_props(self.structures[-1], target, props, start)

    # -- diagram ------------------------------------------------------------

    def parse_diagram(self, start: SourceLoc) -> None:
        name, _ = self.s.read_string()
        if any(d.name == name for d in self.diagrams):
            raise ParseError(f"diagram \"{name}\" declared twice", start)
        diagram = Diagram(name=name, file=self.file, loc=start)
        raw_edges: list[_RawEdge] = []
        self.s.expect_char("{")
        while True:
            self.s.skip_layout()
            if self.s.peek() == "}":
                self.s.advance()
                break
            if self.s.peek() == '"':
                raw_edges.append(self.parse_edge(None))
                continue
            word, wstart = self.s.read_word("a declaration or an edge")
            if word == "process":
                self.parse_process(diagram, raw_edges, wstart)
            elif word == "node":
                kind_word, kloc = self.s.read_word("'and' or 'or'")
                if kind_word not in ("and", "or"):
                    raise self.s.error(f"expected 'and' or 'or', got '{kind_word}'", kloc)
                node_id, nloc = self.s.read_word("a node id")
                if not NODE_ID_PATTERN.match(node_id):
                    raise self.s.error(f"invalid node id '{node_id}'", nloc)
                if node_id in diagram.logical:
                    raise self.s.error(f"node '{node_id}' declared twice", nloc)
                kind = NodeKind.AND if kind_word == "and" else NodeKind.OR
                diagram.logical[node_id] = LogicalNode(kind, node_id, nloc)
                self.s.expect_char(";")
            elif word in ("start", "end"):
                self.s.skip_layout()
                if self.s.at_arrow():
                    raw_edges.append(self.parse_edge_from(_Endpoint(word, word, None, wstart), None))
                else:
                    if word == "start":
                        diagram.start_loc = diagram.start_loc or wstart
                    else:
                        diagram.end_loc = diagram.end_loc or wstart
                    self.s.expect_char(";")
            elif word == "extern":
                ident, iloc = self.s.read_string()
                if not EVENT_ID_PATTERN.match(ident):
                    raise self.s.error(
                        f"invalid out-of-scope reference '{ident}' (only events like \"SALE 7\" "
                        "can be referenced)",
                        iloc,
                    )
                diagram.externs.setdefault(ident, iloc)
                self.s.expect_char(";")
            elif word == "business-object":
                name_text, _ = self.s.read_until_semicolon("a business object name")
                self.business_objects.append(name_text)
            elif word == "message":
                self.parse_inline_message()
            elif word == "field":
                self.parse_field_block(wstart)
            else:
                # an edge starting with a logical-node id or number path
                endpoint = self.classify_word_endpoint(word, None, wstart)
                raw_edges.append(self.parse_edge_from(endpoint, None))
        self.resolve_edges(diagram, raw_edges)
        self.diagrams.append(diagram)

    def parse_process(self, diagram: Diagram, raw_edges: list[_RawEdge], start: SourceLoc) -> None:
        acronym, aloc = self.s.read_word("a process acronym")
        if not ACRONYM_PATTERN.match(acronym):
            raise self.s.error(
                f"invalid process acronym '{acronym}' (uppercase alphanumeric required)", aloc
            )
        name, _ = self.s.read_string()
        self.process_decls.append(Process(acronym, name, start))
        self.s.expect_char("{")
        while True:
            self.s.skip_layout()
            if self.s.peek() == "}":
                self.s.advance()
                return
            if self.s.peek() == '"':
                raw_edges.append(self.parse_edge(acronym))
                continue
            word, wstart = self.s.read_word("'event', 'variant-event' or an edge")
            if word == "event":
                diagram.events.append(self.parse_event(acronym, diagram.name, wstart, specialised=False))
            elif word == "variant-event":
                diagram.events.append(self.parse_event(acronym, diagram.name, wstart, specialised=True))
            elif word in ("start", "end"):
                raw_edges.append(self.parse_edge_from(_Endpoint(word, word, None, wstart), acronym))
            else:
                endpoint = self.classify_word_endpoint(word, acronym, wstart)
                raw_edges.append(self.parse_edge_from(endpoint, acronym))

    def parse_event(
        self, acronym: str, diagram_name: str, start: SourceLoc, specialised: bool
    ) -> CommunicativeEvent:
        number_word, nloc = self.s.read_word("an event number")
        if not number_word.isdigit():
            raise self.s.error(f"expected an event number, got '{number_word}'", nloc)
        name, _ = self.s.read_string()
        event = CommunicativeEvent(
            process=acronym,
            number=int(number_word),
            name=name,
            roles=[],
            interactions=[],
            variants=(),
            goal=None,
            precondition=None,
            loc=start,
            diagram=diagram_name,
        )
        variants: list[EventVariant] = []
        self.s.expect_char("{")
        while True:
            self.s.skip_layout()
            if self.s.peek() == "}":
                self.s.advance()
                break
            word, wstart = self.s.read_word("an event clause")
            if word in ("primary", "receiver", "interface"):
                role, _ = self.s.read_until_semicolon("a role name")
                event.roles.append(RoleBinding(role, RoleKind(word)))
            elif word == "support":
                raise self.s.error(
                    "support actors are specified in event templates, not in diagrams", wstart
                )
            elif word == "in":
                label, lloc = self.s.read_string()
                kw, kloc = self.s.read_word("'message'")
                if kw != "message":
                    raise self.s.error(f"expected 'message', got '{kw}'", kloc)
                self.s.expect_char("=")
                ref, _ = self.s.read_until_semicolon("a message structure name")
                event.interactions.append(
                    Interaction(Direction.INGOING, label, None, ref, lloc)
                )
            elif word == "out":
                label, lloc = self.s.read_string()
                kw, kloc = self.s.read_word("'to'")
                if kw != "to":
                    raise self.s.error(f"expected 'to', got '{kw}'", kloc)
                role, _ = self.s.read_until_semicolon("a receiver role name")
                event.interactions.append(
                    Interaction(Direction.OUTGOING, label, role, None, lloc)
                )
            elif word == "goal":
                text, _ = self.s.read_string()
                event.goal = text
                self.s.expect_char(";")
            elif word == "precondition":
                text, _ = self.s.read_string()
                event.precondition = text
                self.s.expect_char(";")
            elif word == "variant":
                if not specialised:
                    raise self.s.error(
                        "variant blocks are only allowed inside variant-event", wstart
                    )
                variants.append(self.parse_variant(wstart))
            else:
                raise self.s.error(f"unexpected '{word}' inside event block", wstart)
        if specialised and not variants:
            raise self.s.error("variant-event needs at least one variant", start)
        event.variants = tuple(variants)
        # ingoing interactions are fed by the primary role
        primaries = event.primary_roles()
        for interaction in event.interactions:
            if interaction.direction is Direction.INGOING and interaction.counterpart is None:
                interaction.counterpart = primaries[0] if primaries else None
            if interaction.direction is Direction.OUTGOING and interaction.counterpart:
                if interaction.counterpart not in event.receiver_roles():
                    event.roles.append(RoleBinding(interaction.counterpart, RoleKind.RECEIVER))
        return event

    def parse_variant(self, start: SourceLoc) -> EventVariant:
        number_word, nloc = self.s.read_word("a variant number")
        if not number_word.isdigit():
            raise self.s.error(f"expected a variant number, got '{number_word}'", nloc)
        name, _ = self.s.read_string()
        condition: msl.FormulaText | None = None
        self.s.skip_layout()
        if self.s.peek() == "c":
            kw, kloc = self.s.read_word("'condition'")
            if kw != "condition":
                raise self.s.error(f"expected 'condition' or '{{', got '{kw}'", kloc)
            self.s.expect_char("=")
            text, _ = self.s.read_string()
            condition = msl.FormulaText(text)
        nested: list[EventVariant] = []
        self.s.expect_char("{")
        while True:
            self.s.skip_layout()
            if self.s.peek() == "}":
                self.s.advance()
                break
            word, wstart = self.s.read_word("'variant'")
            if word != "variant":
                raise self.s.error(
                    f"unexpected '{word}' inside variant block (only nested variants allowed)",
                    wstart,
                )
            nested.append(self.parse_variant(wstart))
        return EventVariant(int(number_word), name, condition, tuple(nested), start)

    # -- edges ---------------------------------------------------------------

    def classify_word_endpoint(self, word: str, process: str | None, loc: SourceLoc) -> _Endpoint:
        if _NUMPATH_PATTERN.match(word):
            if process is None:
                raise self.s.error(
                    f"bare event number '{word}' outside a process block; quote the full id",
                    loc,
                )
            return _Endpoint("numpath", word, process, loc)
        if NODE_ID_PATTERN.match(word):
            return _Endpoint("ident", word, process, loc)
        raise self.s.error(f"invalid edge endpoint '{word}'", loc)

    def parse_edge(self, process: str | None) -> _RawEdge:
        source = self.parse_endpoint(process)
        return self.parse_edge_from(source, process)

    def parse_edge_from(self, source: _Endpoint, process: str | None) -> _RawEdge:
        self.s.expect_arrow()
        target = self.parse_endpoint(process)
        self.s.expect_char(";")
        return _RawEdge(source, target, source.loc)

    def parse_endpoint(self, process: str | None) -> _Endpoint:
        self.s.skip_layout()
        if self.s.peek() == '"':
            value, loc = self.s.read_string()
            return _Endpoint("quoted", value, process, loc)
        word, loc = self.s.read_word("an edge endpoint")
        if word in ("start", "end"):
            return _Endpoint(word, word, None, loc)
        return self.classify_word_endpoint(word, process, loc)

    def resolve_edges(self, diagram: Diagram, raw_edges: list[_RawEdge]) -> None:
        # identifiers must exist before resolution
        for event in diagram.events:
            event.id = f"{event.process} {event.number}"
            _assign_variant_ids(event.variants, event.id)
        member_keys = diagram.member_keys()
        for raw in raw_edges:
            src_key, src_kind = self.resolve_endpoint(diagram, member_keys, raw.source)
            dst_key, dst_kind = self.resolve_endpoint(diagram, member_keys, raw.target)
            diagram.edges.append(Edge(src_key, dst_key, src_kind, dst_kind, raw.loc))

    def resolve_endpoint(
        self, diagram: Diagram, member_keys: set[str], ep: _Endpoint
    ) -> tuple[str, NodeKind]:
        if ep.kind == "start":
            if diagram.start_loc is None:
                diagram.start_loc = ep.loc
            return diagram.start_key(), NodeKind.START
        if ep.kind == "end":
            if diagram.end_loc is None:
                diagram.end_loc = ep.loc
            return diagram.end_key(), NodeKind.END
        if ep.kind == "numpath":
            key = f"{ep.process} {ep.value}"
            if key not in member_keys:
                raise ParseError(
                    f"'{ep.value}' does not name an event or variant of process {ep.process} "
                    "in this diagram",
                    ep.loc,
                )
            return key, NodeKind.VARIANT if "." in ep.value else NodeKind.EVENT
        if ep.kind == "ident":
            if ep.value not in diagram.logical:
                raise ParseError(f"unknown logical node '{ep.value}'", ep.loc)
            return diagram.logical_key(ep.value), diagram.logical[ep.value].kind
        # quoted
        if ep.value in member_keys:
            return ep.value, NodeKind.VARIANT if "." in ep.value.split(" ")[-1] else NodeKind.EVENT
        if ep.value in diagram.externs:
            return ep.value, NodeKind.EXTERN
        raise ParseError(
            f'"{ep.value}" is neither defined in this diagram nor declared extern',
            ep.loc,
        )


def parse_ced_file(text: str, file: str) -> _CedParser:
    parser = _CedParser(text, file)
    parser.parse_file()
    return parser


def parse_model(sources: list[tuple[str, str]]) -> ModelRepository:
    """Assemble a repository from ``(path, text)`` pairs.

    Routing is by extension: ``.msl`` message structures, ``.ced`` diagrams,
    ``.cet`` event specification templates.  Sources are processed in
    lexicographic path order, so discovery order does not matter.  Raises
    ``DuplicateDefinition`` when two diagrams fully define the same event id
    or two sources define the same structure name.
    """
    from . import templates as templates_mod

    repo = ModelRepository()
    defined_in: dict[str, str] = {}
    for path, text in sorted(sources, key=lambda item: item[0]):
        if path.endswith(".msl"):
            for structure in msl.parse_msl_file(text, path):
                _add_structure(repo, structure, path)
        elif path.endswith(".ced"):
            parsed = parse_ced_file(text, path)
            for structure in parsed.structures:
                _add_structure(repo, structure, path)
            repo.business_objects.update(parsed.business_objects)
            for proc in parsed.process_decls:
                repo.processes.setdefault(proc.acronym, proc)
            for diagram in parsed.diagrams:
                if any(d.name == diagram.name for d in repo.diagrams):
                    raise DuplicateDefinition(
                        f'diagram "{diagram.name}" defined in more than one source', diagram.loc
                    )
                repo.diagrams.append(diagram)
                for event in diagram.events:
                    event_id = f"{event.process} {event.number}"
                    if event_id in defined_in and defined_in[event_id] != diagram.name:
                        raise DuplicateDefinition(
                            f"event {event_id} is fully defined in diagrams "
                            f'"{defined_in[event_id]}" and "{diagram.name}"',
                            event.loc,
                        )
                    defined_in.setdefault(event_id, diagram.name)
                    repo.events.append(event)
        elif path.endswith(".cet"):
            repo.templates.append(templates_mod.parse_template(text, path))
        else:
            raise ParseError(f"cannot route source '{path}' (expected .msl, .ced or .cet)")
    assign_identifiers(repo)
    return repo


def _add_structure(repo: ModelRepository, structure: msl.MessageStructure, path: str) -> None:
    desugared = msl.desugar(structure)
    if structure.name in repo.message_structures:
        raise DuplicateDefinition(
            f"message structure {structure.name} defined more than once", structure.loc
        )
    repo.message_structures[structure.name] = desugared
    repo.structure_files[structure.name] = path
