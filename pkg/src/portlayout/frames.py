"""Frame planning: which boxes and arcs each visible frame contains.

A frame exists for the synthetic top level and for every planned-expanded
group.  Each graph edge is drawn inside exactly one frame: endpoints are
lifted along the containment hierarchy to their nearest visible
representations, and the edge lands in the deepest frame where both ends are
representable.  Edges buried entirely inside one collapsed box are dropped;
edges joining two ports of the same collapsed box become self-loops on it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .inner import ArcEnd, FrameArc, FrameSpec
from .model import TOP_FRAME_ID, Atom, CompoundGraph, ExpansionPlan, Group

_CHAR_WIDTH = 7.0
ATOM_HEIGHT = 30.0
GROUP_HEIGHT = 40.0
_PORT_SLOT = 14.0


def display_label(element: Group | Atom) -> str:
    return element.label or element.id


def box_size(graph: CompoundGraph, element_id: str) -> tuple[float, float]:
    """Collapsed box dimensions: wide enough for the label and the port row."""
    group = graph.groups_by_id.get(element_id)
    if group is not None:
        w = max(
            70.0,
            _CHAR_WIDTH * len(display_label(group)) + 20.0,
            _PORT_SLOT * max(len(group.in_ports), len(group.out_ports)) + 12.0,
        )
        return (w, GROUP_HEIGHT)
    atom = graph.atoms_by_id[element_id]
    return (max(50.0, _CHAR_WIDTH * len(display_label(atom)) + 14.0), ATOM_HEIGHT)


@dataclass(frozen=True)
class _Site:
    frame: str
    end: ArcEnd


def _site_chain(
    graph: CompoundGraph, visible: frozenset[str], endpoint: str
) -> list[_Site]:
    """Visible representations of an endpoint, deepest frame first."""
    chain: list[_Site] = []
    port = None
    if endpoint in graph.ports_by_id:
        owner = graph.ports_by_id[endpoint].owner
        if owner in visible:
            chain.append(_Site(owner, ArcEnd(endpoint, frame_port=True)))
        element = owner
        port = endpoint
    elif endpoint in graph.atoms_by_id or endpoint in graph.groups_by_id:
        element = endpoint
    else:
        return []

    while True:
        parent = graph.parent(element)
        level = parent if parent is not None else TOP_FRAME_ID
        if level == TOP_FRAME_ID or level in visible:
            chain.append(_Site(level, ArcEnd(element, port=port)))
            if level == TOP_FRAME_ID:
                return chain
            element, port = level, None
        else:
            element, port = level, None


def lift_edges(graph: CompoundGraph, plan: ExpansionPlan) -> dict[str, list[FrameArc]]:
    """Assign every flow edge to the deepest visible frame holding both ends."""
    visible = frozenset(plan.expanded) | {TOP_FRAME_ID}
    depth = {TOP_FRAME_ID: 0}
    for gid in visible:
        if gid != TOP_FRAME_ID:
            depth[gid] = len(graph.ancestors(gid)) + 1

    arcs: dict[str, list[FrameArc]] = {fid: [] for fid in visible}
    for edge in graph.edges:
        source_sites = _site_chain(graph, visible, edge.source)
        target_sites = _site_chain(graph, visible, edge.target)
        if not source_sites or not target_sites:
            continue
        by_frame = {site.frame: site for site in target_sites}
        best: tuple[int, _Site, _Site] | None = None
        for s in source_sites:
            t = by_frame.get(s.frame)
            if t is None:
                continue
            d = depth[s.frame]
            if best is None or d > best[0]:
                best = (d, s, t)
        if best is None:
            continue
        _, s, t = best
        if s.end.vertex == t.end.vertex:
            same_box_loop = (
                not s.end.frame_port
                and s.end.port is not None
                and t.end.port is not None
                and s.end.port != t.end.port
            )
            if not same_box_loop:
                continue  # hidden inside one collapsed box
        arcs[s.frame].append(FrameArc(edge.id, s.end, t.end, edge.arrow_at_source))
    return arcs


def build_frame_specs(graph: CompoundGraph, plan: ExpansionPlan) -> dict[str, FrameSpec]:
    """A FrameSpec for the top level and every planned-expanded group."""
    arcs = lift_edges(graph, plan)
    specs: dict[str, FrameSpec] = {}
    for fid in sorted(arcs):
        if fid == TOP_FRAME_ID:
            members = graph.top_level_ids()
            in_ports: tuple[str, ...] = ()
            out_ports: tuple[str, ...] = ()
        else:
            group = graph.groups_by_id[fid]
            members = tuple(
                c for c in group.children
                if c in graph.groups_by_id or c in graph.atoms_by_id
            )
            in_ports = tuple(p.id for p in group.in_ports)
            out_ports = tuple(p.id for p in group.out_ports)
        boxes = {m: box_size(graph, m) for m in members}
        box_in: dict[str, tuple[str, ...]] = {}
        box_out: dict[str, tuple[str, ...]] = {}
        for m in members:
            child = graph.groups_by_id.get(m)
            if child is not None:
                box_in[m] = tuple(p.id for p in child.in_ports)
                box_out[m] = tuple(p.id for p in child.out_ports)
        specs[fid] = FrameSpec(
            container=fid,
            boxes=boxes,
            box_in_ports=box_in,
            box_out_ports=box_out,
            in_ports=in_ports,
            out_ports=out_ports,
            arcs=tuple(arcs[fid]),
        )
    return specs
