"""Scene assembly, canonical JSON/SVG serialization and layout metrics.

The scene is the renderable end product: absolutely positioned boxes, port
squares and polyline edges.  All coordinates are quantized to three decimals
when the scene is built, which makes serialization byte-stable across runs
and platforms and makes JSON round-trips exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .geometry import Point, Rect, polyline_length, rect_distance
from .inner import PORT_SIZE, InnerLayout, box_port_points
from .model import (
    TOP_FRAME_ID,
    CompoundGraph,
    ExpansionPlan,
    GroupKind,
    PortDirection,
)
from .routing import STYLE_DUPLICATE, RoutedEdge, count_crossings
from .tree import LayoutTree

SCENE_SCHEMA = "scene/1"

KIND_PALETTE = {
    "expression": "#aec7e8",
    "function": "#98df8a",
    "loop": "#ffbb78",
    "module": "#c5b0d5",
    "generic": "#d9d9d9",
    "atom": "#f5f5f5",
}
DIAGNOSTIC_FILL = "#d62728"
PORT_FILL = "#e8e8e8"

_EDGE_STROKE = {
    "flow": "#555555",
    "diagnostic": DIAGNOSTIC_FILL,
    "duplicate-link": "#888888",
    "connector": "#aaaaaa",
}


def _q(value: float) -> float:
    out = round(value, 3)
    return 0.0 if out == 0 else out


def _q_rect(rect: Rect) -> Rect:
    return Rect(_q(rect.x), _q(rect.y), _q(rect.width), _q(rect.height))


@dataclass(frozen=True)
class SceneBox:
    id: str
    group: str  # graph element behind this box
    rect: Rect
    kind: str
    label: str
    state: str  # "collapsed" | "expanded" | "frame"
    diagnostic: bool = False


@dataclass(frozen=True)
class ScenePort:
    id: str
    port: str  # graph port id
    x: float
    y: float
    direction: str
    synthesized: bool


@dataclass(frozen=True)
class SceneEdge:
    id: str
    points: tuple[Point, ...]
    style: str
    arrow_at: str


@dataclass(frozen=True)
class Scene:
    canvas: Rect
    boxes: tuple[SceneBox, ...]
    ports: tuple[ScenePort, ...]
    edges: tuple[SceneEdge, ...]
    expansion: tuple[str, ...] = ()


def build_scene(
    graph: CompoundGraph,
    plan: ExpansionPlan,
    tree: LayoutTree,
    inner: dict[str, InnerLayout],
    routed: list[RoutedEdge],
    expansion: tuple[str, ...] = (),
) -> Scene:
    boxes: list[SceneBox] = []
    ports: list[ScenePort] = []

    def emit_port(scene_id: str, port_id: str, point: Point) -> None:
        port = graph.ports_by_id.get(port_id)
        direction = port.direction.value if port else "in"
        synthesized = bool(port and port.synthesized)
        ports.append(
            ScenePort(
                scene_id, port_id, _q(point[0]), _q(point[1]), direction, synthesized
            )
        )

    for fid in sorted(tree.nodes):
        node = tree.nodes[fid]
        layout = inner[fid]
        group = graph.groups_by_id.get(fid)
        kind = group.kind.value if group else GroupKind.GENERIC.value
        label = (group.label or group.id) if group else ""
        boxes.append(
            SceneBox(
                id=f"frame:{fid}",
                group=fid,
                rect=_q_rect(node.frame),
                kind=kind,
                label=label,
                state="frame",
            )
        )
        ox, oy = node.frame.x, node.frame.y
        for member, rect in layout.placements.items():
            child_group = graph.groups_by_id.get(member)
            atom = graph.atoms_by_id.get(member)
            if child_group is not None:
                m_kind = child_group.kind.value
                m_label = child_group.label or child_group.id
                state = "expanded" if member in plan.expanded else "collapsed"
            elif atom is not None:
                m_kind = "atom"
                m_label = atom.label or atom.id
                state = "collapsed"
            else:
                continue
            abs_rect = rect.translated(ox, oy)
            boxes.append(
                SceneBox(
                    id=member,
                    group=member,
                    rect=_q_rect(abs_rect),
                    kind=m_kind,
                    label=m_label,
                    state=state,
                    diagnostic=bool(
                        child_group
                        and any(p.synthesized for p in child_group.ports())
                    ),
                )
            )
            if child_group is not None:
                squares = box_port_points(
                    abs_rect,
                    tuple(p.id for p in child_group.in_ports),
                    tuple(p.id for p in child_group.out_ports),
                )
                for pid, point in squares.items():
                    emit_port(pid, pid, point)
        for pid, anchor in layout.port_anchors.items():
            emit_port(f"{pid}@frame", pid, (anchor[0] + ox, anchor[1] + oy))

    edges = tuple(
        SceneEdge(
            e.edge_id,
            tuple((_q(x), _q(y)) for x, y in e.points),
            e.style,
            e.arrow_at,
        )
        for e in routed
    )

    half = PORT_SIZE / 2.0
    xs: list[float] = []
    ys: list[float] = []
    for b in boxes:
        xs.extend((b.rect.x, b.rect.x1))
        ys.extend((b.rect.y, b.rect.y1))
    for p in ports:
        xs.extend((p.x - half, p.x + half))
        ys.extend((p.y - half, p.y + half))
    for e in edges:
        for x, y in e.points:
            xs.append(x)
            ys.append(y)
    if xs:
        canvas = Rect(
            _q(min(xs)), _q(min(ys)), _q(max(xs) - min(xs)), _q(max(ys) - min(ys))
        )
    else:
        canvas = Rect(0.0, 0.0, 0.0, 0.0)

    return Scene(canvas, tuple(boxes), tuple(ports), edges, tuple(expansion))


def scene_to_dict(scene: Scene) -> dict[str, object]:
    return {
        "schema": SCENE_SCHEMA,
        "canvas": {
            "x": scene.canvas.x,
            "y": scene.canvas.y,
            "width": scene.canvas.width,
            "height": scene.canvas.height,
        },
        "expansion": list(scene.expansion),
        "boxes": [
            {
                "id": b.id,
                "group": b.group,
                "rect": {
                    "x": b.rect.x,
                    "y": b.rect.y,
                    "width": b.rect.width,
                    "height": b.rect.height,
                },
                "kind": b.kind,
                "label": b.label,
                "state": b.state,
                "diagnostic": b.diagnostic,
            }
            for b in scene.boxes
        ],
        "ports": [
            {
                "id": p.id,
                "port": p.port,
                "x": p.x,
                "y": p.y,
                "direction": p.direction,
                "synthesized": p.synthesized,
            }
            for p in scene.ports
        ],
        "edges": [
            {
                "id": e.id,
                "points": [[x, y] for x, y in e.points],
                "style": e.style,
                "arrow_at": e.arrow_at,
            }
            for e in scene.edges
        ],
    }


def to_json(scene: Scene) -> str:
    """Canonical serialization: sorted keys, compact separators, 3-decimal coords."""
    return json.dumps(scene_to_dict(scene), sort_keys=True, separators=(",", ":"))


def scene_from_dict(data: dict[str, object]) -> Scene:
    canvas = data["canvas"]
    boxes = tuple(
        SceneBox(
            id=b["id"],
            group=b["group"],
            rect=Rect(
                b["rect"]["x"], b["rect"]["y"], b["rect"]["width"], b["rect"]["height"]
            ),
            kind=b["kind"],
            label=b["label"],
            state=b["state"],
            diagnostic=b["diagnostic"],
        )
        for b in data["boxes"]
    )
    ports = tuple(
        ScenePort(
            id=p["id"],
            port=p["port"],
            x=p["x"],
            y=p["y"],
            direction=p["direction"],
            synthesized=p["synthesized"],
        )
        for p in data["ports"]
    )
    edges = tuple(
        SceneEdge(
            id=e["id"],
            points=tuple((x, y) for x, y in e["points"]),
            style=e["style"],
            arrow_at=e["arrow_at"],
        )
        for e in data["edges"]
    )
    return Scene(
        Rect(canvas["x"], canvas["y"], canvas["width"], canvas["height"]),
        boxes,
        ports,
        edges,
        tuple(data.get("expansion", ())),
    )


def from_json(text: str) -> Scene:
    return scene_from_dict(json.loads(text))


def to_svg(scene: Scene, theme: dict[str, str] | None = None) -> str:
    """Render the scene as standalone SVG 1.1.

    One element per box, port and edge; group kinds map to the categorical
    palette; synthesized ports are filled solid with the diagnostic colour;
    duplicate links are the only dashed strokes.
    """
    palette = dict(KIND_PALETTE)
    if theme:
        palette.update(theme)
    c = scene.canvas
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{c.x} {c.y} {c.width} {c.height}" '
        f'width="{c.width}" height="{c.height}">',
        "<defs>",
        '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" '
        'markerWidth="7" markerHeight="7" orient="auto">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="#555555"/></marker>',
        '<marker id="arrow-diag" viewBox="0 0 10 10" refX="9" refY="5" '
        'markerWidth="7" markerHeight="7" orient="auto">'
        f'<path d="M 0 0 L 10 5 L 0 10 z" fill="{DIAGNOSTIC_FILL}"/></marker>',
        "</defs>",
    ]

    for b in scene.boxes:
        fill = palette.get(b.kind, palette["generic"])
        if b.state == "frame":
            lines.append(
                f'<rect class="frame" x="{b.rect.x}" y="{b.rect.y}" '
                f'width="{b.rect.width}" height="{b.rect.height}" '
                f'fill="#ffffff" stroke="{fill}" stroke-width="2" rx="4"/>'
            )
            if b.label:
                lines.append(
                    f'<text x="{_q(b.rect.x + 5)}" y="{_q(b.rect.y + 13)}" '
                    f'font-family="sans-serif" font-size="10" fill="#666666">'
                    f"{escape(b.label)}</text>"
                )
        else:
            stroke = "#555555"
            width = 2 if b.state == "expanded" else 1
            lines.append(
                f'<rect class="box" x="{b.rect.x}" y="{b.rect.y}" '
                f'width="{b.rect.width}" height="{b.rect.height}" '
                f'fill="{fill}" stroke="{stroke}" stroke-width="{width}" rx="3"/>'
            )
            lines.append(
                f'<text x="{_q(b.rect.cx)}" y="{_q(b.rect.cy + 3.5)}" '
                f'font-family="sans-serif" font-size="10" text-anchor="middle" '
                f'fill="#222222">{escape(b.label)}</text>'
            )

    for e in scene.edges:
        stroke = _EDGE_STROKE.get(e.style, "#555555")
        points = e.points
        marker = ""
        if e.arrow_at == "source":
            points = tuple(reversed(points))  # cosmetic: arrowhead via marker-end
        if e.arrow_at in ("source", "target"):
            name = "arrow-diag" if e.style == "diagnostic" else "arrow"
            marker = f' marker-end="url(#{name})"'
        dash = ' stroke-dasharray="6 4"' if e.style == STYLE_DUPLICATE else ""
        pts = " ".join(f"{x},{y}" for x, y in points)
        lines.append(
            f'<polyline class="edge-{e.style}" points="{pts}" fill="none" '
            f'stroke="{stroke}" stroke-width="1.2"{dash}{marker}/>'
        )

    half = PORT_SIZE / 2.0
    for p in scene.ports:
        fill = DIAGNOSTIC_FILL if p.synthesized else PORT_FILL
        stroke = "#8b0000" if p.synthesized else "#444444"
        lines.append(
            f'<rect class="port" x="{_q(p.x - half)}" y="{_q(p.y - half)}" '
            f'width="{PORT_SIZE}" height="{PORT_SIZE}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="1"/>'
        )

    lines.append("</svg>")
    return "\n".join(lines)


@dataclass(frozen=True)
class Metrics:
    total_edge_length: float
    crossing_count: int
    anchor_frame_distances: dict[str, float]
    bounding_area: float
    frame_count: int

    def to_dict(self) -> dict[str, object]:
        return {
            "total_edge_length": _q(self.total_edge_length),
            "crossing_count": self.crossing_count,
            "anchor_frame_distances": {
                k: _q(v) for k, v in sorted(self.anchor_frame_distances.items())
            },
            "bounding_area": _q(self.bounding_area),
            "frame_count": self.frame_count,
        }


def compute_metrics(scene: Scene, tree: LayoutTree) -> Metrics:
    total = sum(polyline_length(e.points) for e in scene.edges)
    routed = [
        RoutedEdge(e.id, e.points, e.style, e.arrow_at) for e in scene.edges
    ]
    distances: dict[str, float] = {}
    for gid, node in tree.nodes.items():
        if node.anchor_abs is not None:
            distances[gid] = rect_distance(node.anchor_abs, node.frame)
    return Metrics(
        total_edge_length=total,
        crossing_count=count_crossings(routed),
        anchor_frame_distances=distances,
        bounding_area=scene.canvas.width * scene.canvas.height,
        frame_count=len(tree.nodes),
    )
