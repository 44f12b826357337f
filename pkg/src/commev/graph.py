"""Precedence-graph analysis: depth, loopbacks, ordering, adjacency.

Depth is the shortest-path edge count from the initiatory layer, computed
by breadth-first search over all precedence edges.  Events adjacent to an
explicit start node and events with no incoming precedence at all sit at
depth 0.  An edge is a loopback when it does not move strictly deeper,
i.e. ``depth(target) <= depth(source)``; the remaining (non-loopback)
edges always form an acyclic graph unless the input contains a cycle that
is unreachable from any start, which is reported as pathological.

Variant nodes share the depth of their owning event, and edges incident
to a variant count as edges of that event for every graph query.
"""

from __future__ import annotations

import heapq
from collections import deque

from .base import CyclicResidue, UnknownEvent
from .ced import CommunicativeEvent, ModelRepository, NodeKind
from .diagnostics import Diagnostic, make
from .partition import MergedEdge, MergedGraph, merge_views

#: Depth value assigned to nodes with no path from any start node.
UNREACHABLE = None

_TERMINAL = (NodeKind.START, NodeKind.END)


def _effective(graph: MergedGraph, key: str) -> str:
    return graph.effective_event_key(key)


def event_depth(
    repo: ModelRepository, graph: MergedGraph | None = None
) -> tuple[dict[str, int | None], list[Diagnostic]]:
    """Depth per node key, plus info diagnostics for unreachable nodes.

    Start and end nodes are anchored at depth 0 and excluded from
    unreachability reporting; every other node unreachable from the
    initiatory layer maps to ``None``.
    """
    if graph is None:
        graph = merge_views(repo)
    depths: dict[str, int | None] = {}
    seeds: list[str] = []
    for key, info in graph.nodes.items():
        if info.kind in _TERMINAL:
            depths[key] = 0
            continue
        if info.kind is NodeKind.VARIANT:
            continue  # assigned from the owning event afterwards
        effective_in = [
            e for e in graph.incoming(key) if graph.nodes[e.source].kind is not NodeKind.END
        ]
        # edges into the owning event feed its variants and vice versa
        if info.kind is NodeKind.EVENT and info.event is not None:
            for variant in info.event.all_variants():
                effective_in.extend(
                    e
                    for e in graph.incoming(variant.id)
                    if graph.nodes[e.source].kind is not NodeKind.END
                )
        start_adjacent = any(
            graph.nodes[e.source].kind is NodeKind.START for e in effective_in
        )
        real_incoming = any(
            graph.nodes[e.source].kind is not NodeKind.START
            and _effective(graph, e.source) != _effective(graph, key)
            for e in effective_in
        )
        if start_adjacent or not real_incoming:
            seeds.append(key)
        else:
            depths[key] = UNREACHABLE

    queue: deque[str] = deque()
    for key in sorted(seeds):
        depths[key] = 0
        queue.append(key)
    while queue:
        key = queue.popleft()
        base = depths[key]
        assert base is not None
        sources = [key]
        info = graph.nodes[key]
        if info.kind is NodeKind.EVENT and info.event is not None:
            sources.extend(v.id for v in info.event.all_variants())
        for source in sources:
            for edge in graph.outgoing(source):
                target = _effective(graph, edge.target)
                if graph.nodes[target].kind in _TERMINAL:
                    continue
                current = depths.get(target, UNREACHABLE)
                if current is None or current > base + 1:
                    depths[target] = base + 1
                    queue.append(target)

    for key, info in graph.nodes.items():
        if info.kind is NodeKind.VARIANT:
            depths[key] = depths.get(_effective(graph, key), UNREACHABLE)

    diagnostics = [
        make(
            "CA-X01",
            f"node {key} is unreachable from any start node",
            graph.nodes[key].loc,
            element=key,
        )
        for key in sorted(depths)
        if depths[key] is None and graph.nodes[key].kind not in _TERMINAL
    ]
    return depths, diagnostics


def classify_precedences(
    repo: ModelRepository, graph: MergedGraph | None = None
) -> MergedGraph:
    """Flag loopback edges and assert the residue is acyclic.

    An edge is a loopback iff both effective endpoints are reachable and
    ``depth(target) <= depth(source)``.  Edges touching start or end nodes
    are never loopbacks.  Raises ``CyclicResidue`` when the non-loopback
    subgraph still contains a cycle (possible only through unreachable
    nodes, whose edges cannot be classified).
    """
    if graph is None:
        graph = merge_views(repo)
    depths, _ = event_depth(repo, graph)
    for edge in graph.edges:
        if edge.source_kind in _TERMINAL or edge.target_kind in _TERMINAL:
            edge.loopback = False
            continue
        ds = depths.get(_effective(graph, edge.source))
        dt = depths.get(_effective(graph, edge.target))
        if ds is None or dt is None:
            edge.loopback = None  # unclassifiable: unreachable endpoint
            continue
        edge.loopback = dt <= ds
    _propagate_flags(repo, graph)

    cycle = _find_cycle(graph)
    if cycle is not None:
        raise CyclicResidue(
            "precedence relations stay cyclic after loopback classification: "
            + " -> ".join(cycle)
        )
    return graph


def _propagate_flags(repo: ModelRepository, graph: MergedGraph) -> None:
    flags = {(e.source, e.target): e.loopback for e in graph.edges}
    for diagram in repo.diagrams:
        for edge in diagram.edges:
            edge.loopback = flags.get((edge.source, edge.target))


def _find_cycle(graph: MergedGraph) -> list[str] | None:
    """Depth-first cycle search over effective events and logical nodes,
    restricted to edges not flagged as loopbacks."""
    adjacency: dict[str, list[str]] = {}
    for edge in graph.edges:
        if edge.loopback is True:
            continue
        if edge.source_kind in _TERMINAL or edge.target_kind in _TERMINAL:
            continue
        source = _effective(graph, edge.source)
        target = _effective(graph, edge.target)
        if source == target:
            continue
        adjacency.setdefault(source, []).append(target)
    WHITE, GRAY, BLACK = 0, 1, 2
    state: dict[str, int] = {}
    for root in sorted(adjacency):
        if state.get(root, WHITE) is not WHITE:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        trace: list[str] = []
        state[root] = GRAY
        trace.append(root)
        while stack:
            node, idx = stack[-1]
            succs = adjacency.get(node, [])
            if idx < len(succs):
                stack[-1] = (node, idx + 1)
                succ = succs[idx]
                mark = state.get(succ, WHITE)
                if mark == GRAY:
                    return trace[trace.index(succ) :] + [succ]
                if mark == WHITE:
                    state[succ] = GRAY
                    trace.append(succ)
                    stack.append((succ, 0))
            else:
                state[node] = BLACK
                trace.pop()
                stack.pop()
    return None


def _event_sort_key(event: CommunicativeEvent) -> tuple[str, int]:
    return (event.process, event.number)


def _neighbour_events(
    repo: ModelRepository,
    graph: MergedGraph,
    event: CommunicativeEvent,
    forward: bool,
    loopback_free: bool = False,
) -> list[CommunicativeEvent]:
    """Events adjacent to ``event`` crossing only logical nodes."""
    start_keys = [event.id] + [v.id for v in event.all_variants()]
    result: dict[str, CommunicativeEvent] = {}
    seen: set[str] = set(start_keys)
    frontier = list(start_keys)
    while frontier:
        key = frontier.pop()
        edges = graph.outgoing(key) if forward else graph.incoming(key)
        for edge in edges:
            if loopback_free and edge.loopback is not False:
                continue
            nxt = edge.target if forward else edge.source
            info = graph.nodes[nxt]
            if info.kind in (NodeKind.EVENT, NodeKind.VARIANT):
                owner = info.event
                if owner is not None and owner.id != event.id:
                    result[owner.id] = owner
                continue
            if info.kind in (NodeKind.AND, NodeKind.OR):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
            # start/end and dangling externs block the walk
    return sorted(result.values(), key=_event_sort_key)


def direct_precedents(
    repo: ModelRepository, event: CommunicativeEvent, graph: MergedGraph | None = None
) -> list[CommunicativeEvent]:
    """Events reachable backwards crossing only logical nodes."""
    if graph is None:
        graph = merge_views(repo)
    return _neighbour_events(repo, graph, event, forward=False)


def direct_successors(
    repo: ModelRepository, event: CommunicativeEvent, graph: MergedGraph | None = None
) -> list[CommunicativeEvent]:
    """Events reachable forwards crossing only logical nodes."""
    if graph is None:
        graph = merge_views(repo)
    return _neighbour_events(repo, graph, event, forward=True)


def topological_order(
    repo: ModelRepository, graph: MergedGraph | None = None
) -> list[CommunicativeEvent]:
    """Events ordered by temporal precedence.

    Every non-loopback precedence between events (possibly through logical
    nodes) is respected; remaining ties break by (process acronym, number)
    ascending, which makes the order total and deterministic.
    """
    if graph is None:
        graph = merge_views(repo)
    classify_precedences(repo, graph)

    events = sorted(repo.events_by_id().values(), key=_event_sort_key)
    successors: dict[str, list[str]] = {e.id: [] for e in events}
    indegree: dict[str, int] = {e.id: 0 for e in events}
    for event in events:
        for succ in _neighbour_events(repo, graph, event, forward=True, loopback_free=True):
            if succ.id in indegree:
                successors[event.id].append(succ.id)
                indegree[succ.id] += 1

    by_id = repo.events_by_id()
    ready = [(_event_sort_key(e), e.id) for e in events if indegree[e.id] == 0]
    heapq.heapify(ready)
    order: list[CommunicativeEvent] = []
    while ready:
        _, event_id = heapq.heappop(ready)
        order.append(by_id[event_id])
        for succ_id in successors[event_id]:
            indegree[succ_id] -= 1
            if indegree[succ_id] == 0:
                heapq.heappush(ready, (_event_sort_key(by_id[succ_id]), succ_id))
    if len(order) != len(events):
        leftover = sorted(set(indegree) - {e.id for e in order})
        raise CyclicResidue(f"circular precedence among events: {', '.join(leftover)}")
    return order


def find_event(repo: ModelRepository, event_id: str) -> CommunicativeEvent:
    event = repo.event(event_id)
    if event is None:
        raise UnknownEvent(f"no event with id '{event_id}'")
    return event
