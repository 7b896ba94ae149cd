"""Edge polylines in absolute coordinates, plus the crossing metric."""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import Point, nearest_boundary_points, segments_cross
from .inner import InnerLayout
from .model import TOP_FRAME_ID, CompoundGraph, ExpansionPlan
from .tree import LayoutTree

STYLE_FLOW = "flow"
STYLE_DUPLICATE = "duplicate-link"
STYLE_CONNECTOR = "connector"
STYLE_DIAGNOSTIC = "diagnostic"


@dataclass(frozen=True)
class RoutedEdge:
    edge_id: str
    points: tuple[Point, ...]
    style: str
    arrow_at: str  # "source" | "target" | "none"


def route_inner(
    graph: CompoundGraph,
    frame_id: str,
    layout: InnerLayout,
    origin: Point,
) -> list[RoutedEdge]:
    """Translate one frame's internal polylines into absolute coordinates.

    Edges that touch a synthesized port are styled as diagnostics so the
    offending wires stand out together with their red ports.
    """
    ox, oy = origin
    out: list[RoutedEdge] = []
    for edge in layout.edges:
        style = STYLE_FLOW
        graph_edge = graph.edges_by_id.get(edge.edge_id)
        if graph_edge is not None:
            for endpoint in (graph_edge.source, graph_edge.target):
                port = graph.ports_by_id.get(endpoint)
                if port is not None and port.synthesized:
                    style = STYLE_DIAGNOSTIC
                    break
        points = tuple((x + ox, y + oy) for x, y in edge.points)
        out.append(RoutedEdge(edge.edge_id, points, style, edge.arrow_at))
    return out


def route_connectors(
    graph: CompoundGraph,
    plan: ExpansionPlan,
    tree: LayoutTree,
    inner: dict[str, InnerLayout],
    *,
    suppress_duplicate_edges: bool = False,
) -> list[RoutedEdge]:
    """Connector stubs from anchors to frames, plus dashed duplicate links."""
    out: list[RoutedEdge] = []
    for gid in sorted(plan.expanded):
        node = tree.nodes[gid]
        if node.anchor_abs is None:
            continue
        a, b = nearest_boundary_points(node.anchor_abs, node.frame)
        out.append(RoutedEdge(f"connector:{gid}", (a, b), STYLE_CONNECTOR, "none"))
    if suppress_duplicate_edges:
        return out
    for link in plan.duplicate_links:
        parent = graph.parent(link.duplicate) or TOP_FRAME_ID
        parent_node = tree.nodes.get(parent)
        if parent_node is None:
            continue
        box = inner[parent].placements.get(link.duplicate)
        rep = tree.nodes.get(link.representative)
        if box is None or rep is None:
            continue
        box_abs = box.translated(parent_node.frame.x, parent_node.frame.y)
        a, b = nearest_boundary_points(box_abs, rep.frame)
        out.append(
            RoutedEdge(f"duplicate:{link.duplicate}", (a, b), STYLE_DUPLICATE, "none")
        )
    return out


def count_crossings(edges: list[RoutedEdge]) -> int:
    """Proper pairwise segment crossings over all polylines.

    Segment pairs sharing an endpoint, touching without crossing, or
    overlapping collinearly are not counted.
    """
    segments: list[tuple[Point, Point]] = []
    for edge in edges:
        segments.extend(zip(edge.points, edge.points[1:]))
    total = 0
    for i in range(len(segments)):
        p, q = segments[i]
        for j in range(i + 1, len(segments)):
            r, s = segments[j]
            if p in (r, s) or q in (r, s):
                continue
            if segments_cross(p, q, r, s):
                total += 1
    return total
