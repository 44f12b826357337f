"""Graphviz export of the merged precedence graph.

The arrow direction is normative: thick green edges carry messages into an
event, thick red edges inform receiver roles, thin open arrows are
precedence relations.  Colours are hints only; a legend comment block is
always emitted.
"""

from __future__ import annotations

from .ced import Direction, ModelRepository, NodeKind
from .graph import classify_precedences
from .partition import MergedGraph, merge_views

_LEGEND = [
    "  // legend:",
    "  //   rounded box            communicative event (variants nested in a cluster)",
    "  //   grey rounded box       out-of-scope event reference",
    "  //   diamond                logical node (and / or)",
    "  //   filled circle          start node; double circle: end node",
    "  //   thick solid edge       ingoing communicative interaction (actor -> event)",
    "  //   thick dashed edge      outgoing communicative interaction (event -> actor)",
    "  //   thin open arrow        precedence relation; dotted grey = loopback",
]


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(repo: ModelRepository, graph: MergedGraph | None = None) -> str:
    if graph is None:
        graph = merge_views(repo)
    classify_precedences(repo, graph)
    lines = ["digraph communicative_events {"]
    lines.extend(_LEGEND)
    lines.append("  rankdir=TB;")
    lines.append('  node [fontsize=10, fontname="Helvetica"];')

    events_by_id = repo.events_by_id()
    for key in sorted(graph.nodes):
        info = graph.nodes[key]
        if info.kind is NodeKind.EVENT:
            event = info.event
            label = f"{key}\\n{event.name}" if event else key
            if event and event.interface_roles():
                label += "\\n[" + ", ".join(event.interface_roles()) + "]"
            if event and event.variants:
                lines.append(f"  subgraph cluster_{key.replace(' ', '_').replace('.', '_')} {{")
                lines.append(f"    label={_q(label)}; fontsize=10; style=rounded;")
                for variant in event.all_variants():
                    lines.append(
                        f"    {_q(variant.id)} [shape=box, style=rounded, "
                        f"label={_q(variant.id + chr(92) + 'n' + variant.name)}];"
                    )
                lines.append("  }")
            else:
                lines.append(f"  {_q(key)} [shape=box, style=rounded, label={_q(label)}];")
        elif info.kind is NodeKind.EXTERN:
            lines.append(
                f"  {_q(key)} [shape=box, style=\"rounded,filled\", fillcolor=lightgrey, "
                f"label={_q(key)}];"
            )
        elif info.kind in (NodeKind.AND, NodeKind.OR):
            symbol = "&and;" if info.kind is NodeKind.AND else "&or;"
            lines.append(f"  {_q(key)} [shape=diamond, label=<{symbol}>];")
        elif info.kind is NodeKind.START:
            lines.append(f"  {_q(key)} [shape=circle, style=filled, fillcolor=black, label=\"\"];")
        elif info.kind is NodeKind.END:
            lines.append(f"  {_q(key)} [shape=doublecircle, style=filled, fillcolor=black, label=\"\"];")

    roles: set[str] = set()
    interaction_lines: list[str] = []
    for event_id in sorted(events_by_id):
        event = events_by_id[event_id]
        for interaction in sorted(
            event.interactions, key=lambda i: (i.direction.value, i.label)
        ):
            who = interaction.counterpart
            if who is None:
                continue
            roles.add(who)
            if interaction.direction is Direction.INGOING:
                interaction_lines.append(
                    f"  {_q('role:' + who)} -> {_q(event_id)} "
                    f"[label={_q(interaction.label)}, style=bold, color=darkgreen, "
                    "arrowhead=normal];"
                )
            else:
                interaction_lines.append(
                    f"  {_q(event_id)} -> {_q('role:' + who)} "
                    f"[label={_q(interaction.label)}, style=\"bold,dashed\", color=red3, "
                    "arrowhead=normal];"
                )
    for role in sorted(roles):
        lines.append(f"  {_q('role:' + role)} [shape=plaintext, label={_q(role)}];")
    lines.extend(interaction_lines)

    for edge in graph.edges:
        attrs = ["arrowhead=open"]
        if edge.loopback:
            attrs.append("style=dotted")
            attrs.append("color=grey40")
            attrs.append("constraint=false")
        lines.append(f"  {_q(edge.source)} -> {_q(edge.target)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
