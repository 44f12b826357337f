"""Message Structure Language (MSL): structured-text message specifications.

A message structure describes the information conveyed in one communicative
interaction as a tree of substructures:

    aggregation     ``< a + b + c >``   components that stay grouped
    iteration       ``{ ... }``          a repeating group
    specialisation  ``[ x | y ]``        structural alternatives (one variant
                                         encodes optionality)
    field           ``Name : op : domain``

The acquisition operation ``op`` is ``i`` (input by the primary actor),
``g`` (generated by the system) or ``d`` (derived from system memory).
A domain is an uninterpreted name (``number``, ``date``, ``Client``) or an
inline enumeration ``[cash|credit|cheque]``.  Extended field properties are
attached after the structure expression:

    ORDER = <
      Order number : g : number +
      DESTINATIONS = { DESTINATION = < Address : i : Client address > }
    >
    field Order number { example = "10352" }

``#`` starts a comment that runs to the end of the line.  Names may contain
spaces; ``/`` is reserved for field paths in ``field`` blocks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Union

from .base import ParseError, SourceLoc, StructureError
from .diagnostics import Diagnostic, make

STRUCTURAL_CHARS = set('<>{}[]=+|:#"\n')

ACQUISITION_OPS = ("i", "g", "d")

#: Domains treated as plain data types during class-model derivation.
BASIC_DOMAINS = frozenset({"number", "text", "date", "time", "money", "boolean"})

FIELD_REF_PATTERN = re.compile(r":([A-Za-z_][A-Za-z0-9_]*)")

#: Development stages a structure can be validated against.
STAGES = ("analysis", "design-memory", "design-interface")

# Field properties that are not recommended ("-") at a given stage.  Cells
# not listed are recommended or better and never warned about; a property
# mapped to ERROR would be discouraged outright (no such cell exists today,
# the mechanism is kept for configurability).
_STAGE_NOT_RECOMMENDED: dict[str, frozenset[str]] = {
    "analysis": frozenset(
        {"derivation", "label", "link_with_memory", "mandatory", "init_formula", "visible"}
    ),
    "design-memory": frozenset({"label", "init_formula", "visible"}),
    "design-interface": frozenset(),
}
_STAGE_DISCOURAGED: dict[str, frozenset[str]] = {stage: frozenset() for stage in STAGES}


@dataclass(frozen=True)
class FormulaText:
    """An opaque formula; only ``:field`` references are interpreted."""

    text: str

    @property
    def field_refs(self) -> tuple[str, ...]:
        seen: list[str] = []
        for token in FIELD_REF_PATTERN.findall(self.text):
            if token not in seen:
                seen.append(token)
        return tuple(seen)


@dataclass(frozen=True)
class NamedDomain:
    """A domain referenced by name; resolved against the business-object
    registry at derivation time and treated as basic until then."""

    name: str

    def render(self) -> str:
        return self.name


@dataclass(frozen=True)
class EnumDomain:
    """An inline enumeration of admissible values."""

    tokens: tuple[str, ...]

    def render(self) -> str:
        return "[" + "|".join(self.tokens) + "]"


DomainRef = Union[NamedDomain, EnumDomain]


@dataclass(frozen=True)
class FieldProperties:
    op: str
    domain: DomainRef
    example: str | None = None
    description: str | None = None
    label: str | None = None
    link_with_memory: str | None = None
    mandatory: bool | None = None
    init_formula: FormulaText | None = None
    visible: bool | None = None
    derivation_formula: FormulaText | None = None


@dataclass
class Field:
    name: str
    props: FieldProperties
    loc: SourceLoc | None = field(default=None, compare=False)


@dataclass
class Aggregation:
    name: str | None
    children: tuple["Substructure", ...]
    loc: SourceLoc | None = field(default=None, compare=False)


@dataclass
class Iteration:
    name: str | None
    body: "Substructure"
    loc: SourceLoc | None = field(default=None, compare=False)


@dataclass
class Specialisation:
    name: str | None
    variants: tuple["Substructure", ...]
    loc: SourceLoc | None = field(default=None, compare=False)


Substructure = Union[Field, Aggregation, Iteration, Specialisation]
ComplexSubstructure = Union[Aggregation, Iteration, Specialisation]


@dataclass
class MessageStructure:
    name: str
    root: Substructure
    loc: SourceLoc | None = field(default=None, compare=False)


@dataclass(frozen=True)
class FieldPath:
    """A field together with the names of its enclosing substructures."""

    segments: tuple[str, ...]  # enclosing names plus the field name itself
    field: Field

    def joined(self) -> str:
        return "/".join(self.segments)


_PROP_KEYS = (
    "example",
    "description",
    "label",
    "link",
    "mandatory",
    "init",
    "visible",
    "formula",
)


class _Parser:
    """Character-level recursive descent over MSL text.

    Instances can start at an arbitrary offset so that other file formats
    may embed structure expressions and ``field`` blocks.
    """

    def __init__(self, text: str, file: str, pos: int = 0, line: int = 1, col: int = 1):
        self.text = text
        self.file = file
        self.pos = pos
        self.line = line
        self.col = col

    # -- low-level scanning ------------------------------------------------

    def loc(self) -> SourceLoc:
        return SourceLoc(self.file, self.line, self.col)

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

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

    def expect(self, ch: str) -> None:
        self.skip_layout()
        if self.peek() != ch:
            got = self.peek() or "end of input"
            raise self.error(f"expected '{ch}', got '{got}'")
        self.advance()

    def read_name(self, context: str) -> tuple[str, SourceLoc]:
        """Read a (possibly multi-word) name up to the next structural char."""
        self.skip_layout()
        start = self.loc()
        chars: list[str] = []
        while not self.eof() and self.peek() not in STRUCTURAL_CHARS:
            chars.append(self.advance())
        name = re.sub(r"\s+", " ", "".join(chars)).strip()
        if not name:
            raise self.error(f"expected {context}", start)
        return name, start

    def read_word(self) -> str:
        """Read a single whitespace-delimited bare word (property values)."""
        self.skip_layout()
        chars: list[str] = []
        while not self.eof() and not self.peek().isspace() and self.peek() not in "}{\"":
            chars.append(self.advance())
        return "".join(chars)

    def read_string(self) -> str:
        self.skip_layout()
        start = self.loc()
        if self.peek() != '"':
            raise self.error("expected a double-quoted string")
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
                return "".join(chars)
            else:
                chars.append(ch)

    # -- grammar -----------------------------------------------------------

    def parse_structure(self) -> MessageStructure:
        """Parse ``NAME = <complex>`` leaving the cursor after the expression."""
        name, start = self.read_name("a structure name")
        self.expect("=")
        root = self.parse_complex()
        if isinstance(root, Aggregation) and root.name is None:
            root = replace(root, name=name)
        elif isinstance(root, Iteration) and root.name is None:
            root = replace(root, name=name)
        elif isinstance(root, Specialisation) and root.name is None:
            root = replace(root, name=name)
        return MessageStructure(name=name, root=root, loc=start)

    def parse_complex(self) -> ComplexSubstructure:
        self.skip_layout()
        start = self.loc()
        ch = self.peek()
        if ch == "<":
            self.advance()
            children = self.parse_sublist(">")
            self.expect(">")
            return Aggregation(None, tuple(children), loc=start)
        if ch == "{":
            self.advance()
            children = self.parse_sublist("}")
            self.expect("}")
            body = children[0] if len(children) == 1 else Aggregation(None, tuple(children), loc=start)
            return Iteration(None, body, loc=start)
        if ch == "[":
            self.advance()
            variants: list[Substructure] = []
            while True:
                children = self.parse_sublist("|]")
                variants.append(
                    children[0] if len(children) == 1 else Aggregation(None, tuple(children), loc=start)
                )
                self.skip_layout()
                if self.peek() == "|":
                    self.advance()
                    continue
                break
            self.expect("]")
            return Specialisation(None, tuple(variants), loc=start)
        got = ch or "end of input"
        raise self.error(f"expected '<', '{{' or '[', got '{got}'", start)

    def parse_sublist(self, closers: str) -> list[Substructure]:
        items = [self.parse_element()]
        while True:
            self.skip_layout()
            ch = self.peek()
            if ch == "+":
                self.advance()
                items.append(self.parse_element())
            elif ch in closers:
                return items
            else:
                got = ch or "end of input"
                raise self.error(f"expected '+' or one of '{closers}', got '{got}'")

    def parse_element(self) -> Substructure:
        self.skip_layout()
        if self.peek() in "<{[":
            return self.parse_complex()
        name, start = self.read_name("a substructure name")
        self.skip_layout()
        ch = self.peek()
        if ch == "=":
            self.advance()
            inner = self.parse_complex()
            return replace(inner, name=name, loc=start)
        if ch == ":":
            self.advance()
            return self.parse_field_tail(name, start)
        got = ch or "end of input"
        raise self.error(f"expected '=' or ':' after '{name}', got '{got}'")

    def parse_field_tail(self, name: str, start: SourceLoc) -> Field:
        op, op_loc = self.read_name("an acquisition operation (i, g or d)")
        if op not in ACQUISITION_OPS:
            raise self.error(f"unknown acquisition operation '{op}' (expected i, g or d)", op_loc)
        self.expect(":")
        domain = self.parse_domain()
        return Field(name=name, props=FieldProperties(op=op, domain=domain), loc=start)

    def parse_domain(self) -> DomainRef:
        self.skip_layout()
        if self.peek() == "[":
            start = self.loc()
            self.advance()
            tokens = [self.read_name("an enumeration value")[0]]
            while True:
                self.skip_layout()
                if self.peek() == "|":
                    self.advance()
                    tokens.append(self.read_name("an enumeration value")[0])
                    continue
                break
            self.expect("]")
            if len(tokens) < 2:
                raise self.error("an enumeration domain needs at least two values", start)
            return EnumDomain(tuple(tokens))
        name, _ = self.read_name("a domain name")
        return NamedDomain(name)

    def parse_prop_block(self) -> tuple[str, dict[str, object], SourceLoc]:
        """Parse ``{ key = value ... }`` after a ``field TARGET`` header.

        Returns the raw key/value mapping; the caller resolves the target.
        """
        start = self.loc()
        self.expect("{")
        props: dict[str, object] = {}
        while True:
            self.skip_layout()
            if self.peek() == "}":
                self.advance()
                return ("", props, start)
            key, key_loc = self.read_name("a property name")
            if key not in _PROP_KEYS:
                raise self.error(
                    f"unknown field property '{key}' (expected one of {', '.join(_PROP_KEYS)})",
                    key_loc,
                )
            if key in props:
                raise self.error(f"property '{key}' set twice", key_loc)
            self.expect("=")
            self.skip_layout()
            if key in ("mandatory", "visible"):
                word = self.read_word()
                if word not in ("true", "false"):
                    raise self.error(f"property '{key}' takes true or false", key_loc)
                props[key] = word == "true"
            else:
                props[key] = self.read_string()


def _apply_props(ms: MessageStructure, target: str, props: dict[str, object], loc: SourceLoc) -> None:
    paths = [p for p in _iter_field_paths(ms.root, (), allow_anonymous=True)]
    if "/" in target:
        wanted = tuple(seg.strip() for seg in target.split("/"))
        matches = [p for p in paths if p.segments == wanted]
    else:
        matches = [p for p in paths if p.field.name == target]
    if not matches:
        raise ParseError(f"no field named '{target}' in structure {ms.name}", loc)
    if len(matches) > 1:
        options = ", ".join(p.joined() for p in matches)
        raise ParseError(f"field '{target}' is ambiguous in {ms.name}; use a path ({options})", loc)
    fld = matches[0].field
    updates: dict[str, object] = {}
    for key, value in props.items():
        attr = {
            "link": "link_with_memory",
            "init": "init_formula",
            "formula": "derivation_formula",
        }.get(key, key)
        if getattr(fld.props, attr) is not None:
            raise ParseError(f"property '{key}' already set on field '{fld.name}'", loc)
        if attr in ("init_formula", "derivation_formula"):
            value = FormulaText(str(value))
        updates[attr] = value
    fld.props = replace(fld.props, **updates)


def _iter_field_paths(
    node: Substructure, prefix: tuple[str, ...], allow_anonymous: bool = False
) -> Iterator[FieldPath]:
    if isinstance(node, Field):
        yield FieldPath(prefix + (node.name,), node)
        return
    name = node.name
    if name is None:
        if not allow_anonymous:
            raise ValueError("anonymous substructure encountered; desugar first")
        segment: tuple[str, ...] = ()
    else:
        segment = (name,)
    if isinstance(node, Aggregation):
        for child in node.children:
            yield from _iter_field_paths(child, prefix + segment, allow_anonymous)
    elif isinstance(node, Iteration):
        yield from _iter_field_paths(node.body, prefix + segment, allow_anonymous)
    elif isinstance(node, Specialisation):
        for variant in node.variants:
            yield from _iter_field_paths(variant, prefix + segment, allow_anonymous)


def parse_msl_file(source: str, file: str = "<msl>") -> list[MessageStructure]:
    """Parse a full ``.msl`` file: structure blocks and ``field`` blocks.

    Root specialisations are accepted here so that validation can report
    them as findings; use :func:`parse_message_structure` for the strict
    single-structure entry point.
    """
    parser = _Parser(source, file)
    structures: list[MessageStructure] = []
    while True:
        parser.skip_layout()
        if parser.eof():
            return structures
        parser.skip_layout()
        name_start = parser.loc()
        name, _ = parser.read_name("a structure name")
        parser.skip_layout()
        if name.startswith("field ") and parser.peek() == "{":
            target = name[len("field ") :].strip()
            _, props, _ = parser.parse_prop_block()
            if not structures:
                raise ParseError("field block before any structure", name_start)
            _apply_props(structures[-1], target, props, name_start)
            continue
        if parser.peek() != "=":
            raise parser.error(f"expected '=' after '{name}'")
        parser.advance()
        root = parser.parse_complex()
        if getattr(root, "name", None) is None:
            root = replace(root, name=name)
        structures.append(MessageStructure(name=name, root=root, loc=name_start))


def parse_message_structure(source: str, file: str = "<msl>") -> MessageStructure:
    """Parse exactly one message structure from MSL text.

    Raises ``ParseError`` on malformed syntax, ``StructureError`` when the
    initial substructure is a specialisation or the text does not contain
    exactly one structure.
    """
    structures = parse_msl_file(source, file)
    if len(structures) != 1:
        raise StructureError(f"expected exactly one message structure, found {len(structures)}")
    ms = structures[0]
    if isinstance(ms.root, Specialisation):
        raise StructureError(
            f"initial substructure of {ms.name} cannot be a specialisation", ms.root.loc
        )
    return ms


# -- desugaring -------------------------------------------------------------


def desugar(ms: MessageStructure) -> MessageStructure:
    """Make the implicit structure explicit.

    Anonymous complex substructures receive synthesized names (parent name,
    underscore, 1-based sibling position); every iteration body and every
    specialisation variant becomes a named aggregation.  Idempotent.
    """
    root = _desugar_node(ms.root, parent_name=ms.name, position=1, sibling_names=frozenset())
    if isinstance(root, (Aggregation, Iteration, Specialisation)) and root.name is None:
        root = replace(root, name=ms.name)
    return MessageStructure(name=ms.name, root=root, loc=ms.loc)


def _synth_name(parent: str, position: int, taken: frozenset[str]) -> str:
    candidate = f"{parent}_{position}"
    while candidate in taken:
        candidate += "_"
    return candidate


def _desugar_node(
    node: Substructure, parent_name: str, position: int, sibling_names: frozenset[str]
) -> Substructure:
    if isinstance(node, Field):
        return node
    name = node.name or _synth_name(parent_name, position, sibling_names)
    if isinstance(node, Aggregation):
        taken = frozenset(c.name for c in node.children if getattr(c, "name", None))
        children = tuple(
            _desugar_node(child, name, idx, taken) for idx, child in enumerate(node.children, 1)
        )
        return Aggregation(name, children, loc=node.loc)
    if isinstance(node, Iteration):
        body = _ensure_aggregation(node.body, name, 1)
        return Iteration(name, body, loc=node.loc)
    if isinstance(node, Specialisation):
        taken = frozenset(v.name for v in node.variants if getattr(v, "name", None))
        variants = tuple(
            _ensure_aggregation(variant, name, idx, taken)
            for idx, variant in enumerate(node.variants, 1)
        )
        return Specialisation(name, variants, loc=node.loc)
    raise TypeError(f"unexpected node {node!r}")


def _ensure_aggregation(
    node: Substructure, parent_name: str, position: int, taken: frozenset[str] = frozenset()
) -> Substructure:
    """Wrap ``node`` into a named aggregation unless it already is one."""
    if isinstance(node, Aggregation):
        return _desugar_node(node, parent_name, position, taken)
    wrapper_name = _synth_name(parent_name, position, taken)
    inner = _desugar_node(node, wrapper_name, 1, frozenset())
    return Aggregation(wrapper_name, (inner,), loc=getattr(node, "loc", None))


# -- serialization ----------------------------------------------------------


_BRACKETS = {Aggregation: ("<", ">"), Iteration: ("{", "}"), Specialisation: ("[", "]")}


def serialize(ms: MessageStructure) -> str:
    """Render canonical MSL text: two-space indents, one substructure per
    line, extended field properties as trailing ``field`` blocks."""
    lines: list[str] = []
    _serialize_node(ms.root, lines, indent=0, top_name=ms.name)
    out = "\n".join(lines) + "\n"
    prop_lines = [_render_prop_block(path) for path in _collect_paths_lenient(ms) if _has_extended_props(path.field)]
    if prop_lines:
        out += "\n" + "\n".join(prop_lines) + "\n"
    return out


def _collect_paths_lenient(ms: MessageStructure) -> list[FieldPath]:
    return list(_iter_field_paths(ms.root, (), allow_anonymous=True))


def _has_extended_props(fld: Field) -> bool:
    p = fld.props
    return any(
        v is not None
        for v in (
            p.example,
            p.description,
            p.label,
            p.link_with_memory,
            p.mandatory,
            p.init_formula,
            p.visible,
            p.derivation_formula,
        )
    )


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _render_prop_block(path: FieldPath) -> str:
    p = path.field.props
    parts: list[str] = []
    if p.example is not None:
        parts.append(f"example = {_quote(p.example)}")
    if p.description is not None:
        parts.append(f"description = {_quote(p.description)}")
    if p.label is not None:
        parts.append(f"label = {_quote(p.label)}")
    if p.link_with_memory is not None:
        parts.append(f"link = {_quote(p.link_with_memory)}")
    if p.mandatory is not None:
        parts.append(f"mandatory = {'true' if p.mandatory else 'false'}")
    if p.init_formula is not None:
        parts.append(f"init = {_quote(p.init_formula.text)}")
    if p.visible is not None:
        parts.append(f"visible = {'true' if p.visible else 'false'}")
    if p.derivation_formula is not None:
        parts.append(f"formula = {_quote(p.derivation_formula.text)}")
    return f"field {path.joined()} {{ " + " ".join(parts) + " }"


def _render_field(fld: Field) -> str:
    return f"{fld.name} : {fld.props.op} : {fld.props.domain.render()}"


def _serialize_node(node: Substructure, lines: list[str], indent: int, top_name: str | None = None) -> None:
    pad = "  " * indent
    if isinstance(node, Field):
        lines.append(pad + _render_field(node))
        return
    open_ch, close_ch = _BRACKETS[type(node)]
    label = top_name if top_name is not None else node.name
    prefix = f"{label} = " if label else ""
    children = _node_children(node)
    if len(children) == 1 and isinstance(children[0], Field) and not isinstance(node, Specialisation):
        lines.append(f"{pad}{prefix}{open_ch} {_render_field(children[0])} {close_ch}")
        return
    lines.append(f"{pad}{prefix}{open_ch}")
    if isinstance(node, Specialisation):
        for idx, variant in enumerate(children):
            if idx:
                lines.append("  " * (indent + 1) + "|")
            _serialize_node(variant, lines, indent + 1)
    else:
        for idx, child in enumerate(children):
            _serialize_node(child, lines, indent + 1)
            if idx < len(children) - 1:
                lines[-1] += " +"
    lines.append(pad + close_ch)


def _node_children(node: ComplexSubstructure) -> tuple[Substructure, ...]:
    if isinstance(node, Aggregation):
        return node.children
    if isinstance(node, Iteration):
        if isinstance(node.body, Aggregation) and node.body.name is None:
            return node.body.children
        return (node.body,)
    return node.variants


# -- queries and validation --------------------------------------------------


def collect_fields(ms: MessageStructure) -> list[FieldPath]:
    """Every field with its path of enclosing substructure names, in
    document order.  Requires a desugared structure."""
    return list(_iter_field_paths(ms.root, ()))


def iter_substructures(node: Substructure) -> Iterator[Substructure]:
    yield node
    if isinstance(node, Aggregation):
        for child in node.children:
            yield from iter_substructures(child)
    elif isinstance(node, Iteration):
        yield from iter_substructures(node.body)
    elif isinstance(node, Specialisation):
        for variant in node.variants:
            yield from iter_substructures(variant)


def _loc_of(node: Substructure, ms: MessageStructure, file: str) -> SourceLoc:
    loc = getattr(node, "loc", None) or ms.loc
    if loc is None:
        return SourceLoc(file, 0, 0)
    return loc


def validate_structure(
    ms: MessageStructure, stage: str = "analysis", file: str = "<msl>"
) -> list[Diagnostic]:
    """Structural and stage-applicability checks on a desugared structure.

    Findings are returned, never raised: a specialisation root (CA-C08),
    duplicated sibling names (CA-C09/C10/C11), formulas bound to the wrong
    acquisition role (CA-C07), properties not recommended at the given
    stage (CA-S01) and unresolvable formula field references (CA-S02).
    """
    if stage not in STAGES:
        raise ValueError(f"unknown stage '{stage}' (expected one of {', '.join(STAGES)})")
    findings: list[Diagnostic] = []
    if isinstance(ms.root, Specialisation):
        findings.append(
            make(
                "CA-C08",
                f"initial substructure of {ms.name} is a specialisation",
                _loc_of(ms.root, ms, file),
                element=ms.name,
            )
        )

    for node in iter_substructures(ms.root):
        if isinstance(node, Aggregation):
            _check_sibling_names(node.children, ms, file, findings)
        elif isinstance(node, Specialisation):
            _check_sibling_names(node.variants, ms, file, findings)

    field_names = {path.field.name for path in _collect_paths_lenient(ms)}
    not_recommended = _STAGE_NOT_RECOMMENDED[stage]
    discouraged = _STAGE_DISCOURAGED[stage]
    for path in _collect_paths_lenient(ms):
        fld = path.field
        p = fld.props
        loc = _loc_of(fld, ms, file)
        element = f"{ms.name}:{fld.name}"

        set_properties = {}
        if p.op == "d":
            set_properties["derivation"] = "acquisition operation d"
        if p.label is not None:
            set_properties["label"] = "label"
        if p.link_with_memory is not None:
            set_properties["link_with_memory"] = "link with memory"
        if p.mandatory is not None:
            set_properties["mandatory"] = "compulsoriness"
        if p.init_formula is not None:
            set_properties["init_formula"] = "initialisation"
        if p.visible is not None:
            set_properties["visible"] = "visibility"
        for prop_key, prop_label in set_properties.items():
            if prop_key in discouraged:
                findings.append(
                    make(
                        "CA-S01",
                        f"property '{prop_label}' on field '{fld.name}' is discouraged at {stage} stage",
                        loc,
                        element=element,
                    )
                )
            elif prop_key in not_recommended:
                findings.append(
                    make(
                        "CA-S01",
                        f"property '{prop_label}' on field '{fld.name}' is not recommended at {stage} stage",
                        loc,
                        element=element,
                    )
                )

        if p.init_formula is not None and p.derivation_formula is not None:
            findings.append(
                make(
                    "CA-C07",
                    f"field '{fld.name}' binds one formula to several roles (initialisation and derivation)",
                    loc,
                    element=element,
                )
            )
        if p.derivation_formula is not None and p.op != "d":
            findings.append(
                make(
                    "CA-C07",
                    f"derivation formula on field '{fld.name}' whose acquisition operation is '{p.op}'",
                    loc,
                    element=element,
                )
            )
        if p.init_formula is not None and p.op == "d":
            findings.append(
                make(
                    "CA-C07",
                    f"initialisation formula on derived field '{fld.name}'",
                    loc,
                    element=element,
                )
            )

        for formula in (p.init_formula, p.derivation_formula):
            if formula is None:
                continue
            for ref in formula.field_refs:
                if ref not in field_names:
                    findings.append(
                        make(
                            "CA-S02",
                            f"formula on field '{fld.name}' references unknown field ':{ref}'",
                            loc,
                            element=element,
                        )
                    )
    return findings


def _check_sibling_names(
    siblings: tuple[Substructure, ...],
    ms: MessageStructure,
    file: str,
    findings: list[Diagnostic],
) -> None:
    seen: dict[str, Substructure] = {}
    for node in siblings:
        name = getattr(node, "name", None)
        if not name:
            continue
        if name in seen:
            if isinstance(node, Field):
                code, what = "CA-C09", "field"
            elif isinstance(node, Specialisation):
                code, what = "CA-C11", "specialisation"
            else:
                code, what = "CA-C10", "aggregation" if isinstance(node, Aggregation) else "iteration"
            findings.append(
                make(
                    code,
                    f"{what} '{name}' occurs more than once among siblings in {ms.name}",
                    _loc_of(node, ms, file),
                    element=f"{ms.name}:{name}",
                )
            )
        else:
            seen[name] = node
