"""Merging diagram views into the global precedence graph.

Diagrams are views of one business process model.  Merging resolves
out-of-scope references to their full definitions and deduplicates edges
asserted by several diagrams, keeping the set of asserting diagrams on
each merged edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .base import SourceLoc
from .ced import CommunicativeEvent, Diagram, ModelRepository, NodeKind
from .diagnostics import Diagnostic, make


@dataclass
class NodeInfo:
    key: str
    kind: NodeKind
    loc: SourceLoc
    event: CommunicativeEvent | None = None
    dangling: bool = False  # extern with no full definition anywhere


@dataclass
class MergedEdge:
    source: str
    target: str
    source_kind: NodeKind
    target_kind: NodeKind
    diagrams: tuple[str, ...]
    loc: SourceLoc
    loopback: bool | None = None


@dataclass
class MergedGraph:
    nodes: dict[str, NodeInfo] = field(default_factory=dict)
    edges: list[MergedEdge] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    _out: dict[str, list[MergedEdge]] | None = field(default=None, repr=False, compare=False)
    _in: dict[str, list[MergedEdge]] | None = field(default=None, repr=False, compare=False)

    def effective_event_key(self, key: str) -> str:
        """Collapse a variant key to the id of its owning event."""
        info = self.nodes.get(key)
        if info is not None and info.kind is NodeKind.VARIANT:
            return key.split(".", 1)[0]
        return key

    def _index(self) -> None:
        if self._out is None:
            self._out = {key: [] for key in self.nodes}
            self._in = {key: [] for key in self.nodes}
            for edge in self.edges:
                self._out[edge.source].append(edge)
                self._in[edge.target].append(edge)

    def outgoing(self, key: str) -> list[MergedEdge]:
        self._index()
        return self._out.get(key, [])

    def incoming(self, key: str) -> list[MergedEdge]:
        self._index()
        return self._in.get(key, [])


def merge_views(repo: ModelRepository) -> MergedGraph:
    """Union of all diagrams with out-of-scope references resolved.

    Extern nodes share their key with the full definition, so resolution is
    by identity: an extern whose event is defined in some diagram simply
    becomes that event's node.  References that resolve nowhere stay in the
    graph as dangling nodes and are reported as CA-P02.
    """
    graph = MergedGraph()
    events_by_id = repo.events_by_id()

    for diagram in repo.diagrams:
        for event in diagram.events:
            _add_node(graph, event.id, NodeKind.EVENT, event.loc, event)
            for variant in event.all_variants():
                _add_node(graph, variant.id, NodeKind.VARIANT, variant.loc, event)
        for node in diagram.logical.values():
            _add_node(graph, diagram.logical_key(node.node_id), node.kind, node.loc)
        if diagram.start_loc is not None:
            _add_node(graph, diagram.start_key(), NodeKind.START, diagram.start_loc)
        if diagram.end_loc is not None:
            _add_node(graph, diagram.end_key(), NodeKind.END, diagram.end_loc)

    for diagram in repo.diagrams:
        for extern_id, loc in sorted(diagram.externs.items()):
            if extern_id in graph.nodes:
                continue
            target = events_by_id.get(extern_id)
            owner = repo.variant_owner(extern_id)
            if target is not None:
                _add_node(graph, extern_id, NodeKind.EVENT, target.loc, target)
            elif owner is not None:
                _add_node(graph, extern_id, NodeKind.VARIANT, loc, owner)
            else:
                info = NodeInfo(extern_id, NodeKind.EXTERN, loc, dangling=True)
                graph.nodes[extern_id] = info
                graph.diagnostics.append(
                    make(
                        "CA-P02",
                        f"out-of-scope reference \"{extern_id}\" is not defined in any diagram",
                        loc,
                        element=extern_id,
                    )
                )

    by_pair: dict[tuple[str, str], MergedEdge] = {}
    for diagram in repo.diagrams:
        for edge in diagram.edges:
            pair = (edge.source, edge.target)
            merged = by_pair.get(pair)
            if merged is None:
                src = graph.nodes[edge.source]
                dst = graph.nodes[edge.target]
                merged = MergedEdge(
                    source=edge.source,
                    target=edge.target,
                    source_kind=src.kind if not src.dangling else NodeKind.EXTERN,
                    target_kind=dst.kind if not dst.dangling else NodeKind.EXTERN,
                    diagrams=(diagram.name,),
                    loc=edge.loc,
                )
                by_pair[pair] = merged
            elif diagram.name not in merged.diagrams:
                merged.diagrams = merged.diagrams + (diagram.name,)
            if graph.nodes[edge.source].dangling and graph.nodes[edge.target].dangling:
                graph.diagnostics.append(
                    make(
                        "CA-X03",
                        f"precedence between two out-of-scope references "
                        f"(\"{edge.source}\" -> \"{edge.target}\")",
                        edge.loc,
                    )
                )
    graph.edges = sorted(by_pair.values(), key=lambda e: (e.source, e.target))
    return graph


def _add_node(
    graph: MergedGraph,
    key: str,
    kind: NodeKind,
    loc: SourceLoc,
    event: CommunicativeEvent | None = None,
) -> None:
    if key not in graph.nodes:
        graph.nodes[key] = NodeInfo(key, kind, loc, event)


def check_partition(repo: ModelRepository, graph: MergedGraph | None = None) -> list[Diagnostic]:
    """Cross-diagram consistency of out-of-scope references.

    CA-P01 (error): an event's direct precedent, per the merged graph, is
    absent from the event's diagram both as a full definition and as an
    out-of-scope reference.  Precedents are traced through logical nodes.

    CA-P03 (info): an edge to an event defined in another diagram whose
    target is not referenced in this diagram.  Only directly asserted
    event-to-event edges are advised on; successors reached through logical
    nodes are not demanded.
    """
    from .graph import direct_precedents

    if graph is None:
        graph = merge_views(repo)
    findings = list(graph.diagnostics)
    for diagram in repo.diagrams:
        present = diagram.member_event_ids() | set(diagram.externs)
        for event in diagram.events:
            for precedent in direct_precedents(repo, event, graph):
                if precedent.id not in present:
                    findings.append(
                        make(
                            "CA-P01",
                            f"direct precedent {precedent.id} of {event.id} is not referenced "
                            f'in diagram "{diagram.name}"',
                            event.loc,
                            element=event.id,
                        )
                    )
            member_keys = {event.id} | {v.id for v in event.all_variants()}
            for key in sorted(member_keys):
                for edge in graph.outgoing(key):
                    info = graph.nodes[edge.target]
                    if info.kind not in (NodeKind.EVENT, NodeKind.VARIANT) or info.dangling:
                        continue
                    successor = info.event
                    if successor is None:
                        continue
                    successor_id = successor.id
                    if successor_id in present:
                        continue
                    findings.append(
                        make(
                            "CA-P03",
                            f"direct successor {successor_id} of {event.id} is not referenced "
                            f'in diagram "{diagram.name}"',
                            event.loc,
                            element=event.id,
                        )
                    )
    return findings
