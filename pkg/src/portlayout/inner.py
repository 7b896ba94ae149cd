"""Layered layout for the direct children of one expanded group.

The children of a group are arranged top-to-bottom in layers: the group's own
in ports are pinned to the top boundary, out ports to the bottom boundary, and
a classic four-phase pipeline (cycle removal, layering, crossing reduction,
coordinate assignment) places everything in between.  Ports participate as
zero-height pseudo-vertices; long arcs are subdivided with dummy vertices so
every segment spans exactly one layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import Point, Rect

PORT_SIZE = 8.0
SEPARATOR_VERTEX = "__separator__"
_DUMMY_WIDTH = 1.0
_LOOP_MARGIN = 12.0


@dataclass(frozen=True)
class ArcEnd:
    """One endpoint of an arc inside a frame.

    ``vertex`` is a child element id, or a port id of the frame itself when
    ``frame_port`` is set.  ``port`` optionally names the attach port on the
    child box.
    """

    vertex: str
    port: str | None = None
    frame_port: bool = False


@dataclass(frozen=True)
class FrameArc:
    edge_id: str
    source: ArcEnd
    target: ArcEnd
    arrow_at_source: bool = False


@dataclass(frozen=True)
class FrameSpec:
    """Everything needed to lay out the inside of one frame."""

    container: str
    boxes: dict[str, tuple[float, float]]
    box_in_ports: dict[str, tuple[str, ...]]
    box_out_ports: dict[str, tuple[str, ...]]
    in_ports: tuple[str, ...] = ()
    out_ports: tuple[str, ...] = ()
    arcs: tuple[FrameArc, ...] = ()


@dataclass(frozen=True)
class InnerEdge:
    edge_id: str
    points: tuple[Point, ...]
    arrow_at: str  # "source" | "target"


@dataclass(frozen=True)
class InnerLayout:
    width: float
    height: float
    placements: dict[str, Rect]
    port_anchors: dict[str, Point]
    edges: tuple[InnerEdge, ...]
    layers: dict[str, int]
    orders: tuple[tuple[str, ...], ...]


def remove_cycles(
    vertices: list[str], arcs: list[tuple[str, str]]
) -> tuple[list[tuple[str, str]], set[tuple[str, str]]]:
    """Break directed cycles by reversing a small arc set (greedy heuristic).

    Sinks and sources are peeled repeatedly; of the remainder the vertex with
    the largest out-minus-in degree surplus goes next (smallest id on ties).
    Arcs pointing against the resulting order are reversed.  Reversing the
    returned set again reconstructs the input.
    """
    order = _greedy_ordering(vertices, arcs)
    pos = {v: i for i, v in enumerate(order)}
    reversed_set = {(u, v) for u, v in arcs if pos[u] > pos[v]}
    dag = [(v, u) if (u, v) in reversed_set else (u, v) for u, v in arcs]
    return dag, reversed_set


def _greedy_ordering(vertices: list[str], arcs: list[tuple[str, str]]) -> list[str]:
    active = set(vertices)
    out_deg = {v: 0 for v in vertices}
    in_deg = {v: 0 for v in vertices}
    succs: dict[str, list[str]] = {v: [] for v in vertices}
    preds: dict[str, list[str]] = {v: [] for v in vertices}
    for u, v in arcs:
        if u == v:
            continue
        out_deg[u] += 1
        in_deg[v] += 1
        succs[u].append(v)
        preds[v].append(u)

    head: list[str] = []
    tail: list[str] = []

    def drop(v: str) -> None:
        active.discard(v)
        for w in succs[v]:
            if w in active:
                in_deg[w] -= 1
        for w in preds[v]:
            if w in active:
                out_deg[w] -= 1

    while active:
        changed = True
        while changed:
            changed = False
            sinks = sorted(v for v in active if out_deg[v] == 0)
            for v in sinks:
                tail.append(v)
                drop(v)
                changed = True
            sources = sorted(v for v in active if in_deg[v] == 0)
            for v in sources:
                head.append(v)
                drop(v)
                changed = True
        if active:
            best = max(sorted(active), key=lambda v: out_deg[v] - in_deg[v])
            head.append(best)
            drop(best)
    tail.reverse()
    return head + tail


def assign_layers(
    vertices: list[str],
    arcs: list[tuple[str, str]],
    *,
    in_ports: tuple[str, ...] = (),
    out_ports: tuple[str, ...] = (),
) -> dict[str, int]:
    """Longest-path layering with boundary ports pinned to the extreme rows.

    In ports sit in layer 0 and out ports in the final layer.  When the frame
    holds nothing but ports, an explicit separator vertex keeps the two port
    rows apart.  Raises if the child arcs still contain a cycle.
    """
    port_set = set(in_ports) | set(out_ports)
    children = [v for v in vertices if v not in port_set]
    base = 1 if in_ports else 0

    layer: dict[str, int] = {p: 0 for p in in_ports}
    preds: dict[str, list[str]] = {v: [] for v in children}
    succs: dict[str, list[str]] = {v: [] for v in children}
    indeg = {v: 0 for v in children}
    for u, v in arcs:
        if v in out_ports or u in in_ports:
            continue  # port rows are pinned; these arcs cannot affect layering
        if u in children and v in children:
            preds[v].append(u)
            succs[u].append(v)
            indeg[v] += 1

    ready = [v for v in children if indeg[v] == 0]
    placed = 0
    while ready:
        v = ready.pop()
        placed += 1
        layer[v] = max([base] + [layer[u] + 1 for u in preds[v]])
        for w in succs[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if placed != len(children):
        raise ValueError("cycle detected in layered arcs; run remove_cycles first")

    if out_ports:
        below = [layer[v] for v in children]
        if in_ports:
            below.append(0)
        if children:
            out_layer = max(below) + 1
        elif in_ports:
            layer[SEPARATOR_VERTEX] = 1
            out_layer = 2
        else:
            out_layer = 0
        for p in out_ports:
            layer[p] = out_layer
    return layer


def count_layer_crossings(orders: list[list[str]], arcs: list[tuple[str, str]]) -> int:
    """Crossings between straight arcs of adjacent layers, by inversion count."""
    index = {v: (li, i) for li, row in enumerate(orders) for i, v in enumerate(row)}
    total = 0
    for li in range(len(orders) - 1):
        segs = []
        for u, v in arcs:
            pu = index.get(u)
            pv = index.get(v)
            if pu is None or pv is None:
                continue
            if pu[0] == li and pv[0] == li + 1:
                segs.append((pu[1], pv[1]))
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                a, b = segs[i], segs[j]
                if (a[0] - b[0]) * (a[1] - b[1]) < 0:
                    total += 1
    return total


def reduce_crossings(
    orders: list[list[str]], arcs: list[tuple[str, str]], max_rounds: int = 8
) -> list[list[str]]:
    """Barycenter sweeps (down then up) retaining the best ordering seen.

    Stable sorts keep ties in their prior order, which makes the result
    deterministic; the returned ordering never has more crossings than the
    input ordering.
    """
    orders = [list(row) for row in orders]
    preds: dict[str, list[str]] = {}
    succs: dict[str, list[str]] = {}
    for u, v in arcs:
        preds.setdefault(v, []).append(u)
        succs.setdefault(u, []).append(v)

    best = [list(row) for row in orders]
    best_count = count_layer_crossings(orders, arcs)

    for _ in range(max_rounds):
        for li in range(1, len(orders)):
            pos = {v: float(i) for i, v in enumerate(orders[li - 1])}
            prior = {v: float(i) for i, v in enumerate(orders[li])}
            orders[li].sort(key=lambda v: _barycenter(v, preds, pos, prior))
        for li in range(len(orders) - 2, -1, -1):
            pos = {v: float(i) for i, v in enumerate(orders[li + 1])}
            prior = {v: float(i) for i, v in enumerate(orders[li])}
            orders[li].sort(key=lambda v: _barycenter(v, succs, pos, prior))
        count = count_layer_crossings(orders, arcs)
        if count < best_count:
            best_count = count
            best = [list(row) for row in orders]
        else:
            break
    return best


def _barycenter(
    v: str, neighbours: dict[str, list[str]], pos: dict[str, float], prior: dict[str, float]
) -> float:
    weights = [pos[n] for n in neighbours.get(v, ()) if n in pos]
    if not weights:
        return prior[v]
    return sum(weights) / len(weights)


def _resolve_row(desired: list[float], min_gaps: list[float]) -> list[float]:
    """Closest positions to ``desired`` keeping consecutive min-gap constraints.

    Classic pool-adjacent-violators on the gap-normalised coordinates; exact
    for the L2 objective and deterministic.
    """
    prefix = [0.0]
    for g in min_gaps:
        prefix.append(prefix[-1] + g)
    targets = [d - p for d, p in zip(desired, prefix)]

    blocks: list[tuple[float, int]] = []  # (mean, count)
    for t in targets:
        mean, count = t, 1
        while blocks and blocks[-1][0] >= mean:
            pm, pc = blocks.pop()
            mean = (mean * count + pm * pc) / (count + pc)
            count += pc
        blocks.append((mean, count))

    out: list[float] = []
    for mean, count in blocks:
        out.extend([mean] * count)
    return [z + p for z, p in zip(out, prefix)]


def _box_port_point(rect: Rect, ports: tuple[str, ...], port_id: str, top: bool) -> Point:
    i = ports.index(port_id)
    x = rect.x + rect.width * (i + 1) / (len(ports) + 1)
    return (x, rect.y if top else rect.y1)


def box_port_points(
    rect: Rect, in_ports: tuple[str, ...], out_ports: tuple[str, ...]
) -> dict[str, Point]:
    """Port square centres along the top (in) and bottom (out) box edges."""
    points: dict[str, Point] = {}
    for p in in_ports:
        points[p] = _box_port_point(rect, in_ports, p, top=True)
    for p in out_ports:
        points[p] = _box_port_point(rect, out_ports, p, top=False)
    return points


@dataclass
class _Arc:
    edge_id: str
    upper: ArcEnd
    lower: ArcEnd
    flipped: bool
    arrow_at_source: bool
    chain: list[str] = field(default_factory=list)


def compute_inner_layout(spec: FrameSpec, *, node_spacing: float = 20.0,
                         layer_spacing: float = 40.0, frame_padding: float = 15.0) -> InnerLayout:
    """Run the full layered pipeline for one frame."""
    children = list(spec.boxes)
    in_set = set(spec.in_ports)
    out_set = set(spec.out_ports)

    plain: list[_Arc] = []
    loops: list[FrameArc] = []
    flats: list[FrameArc] = []
    for arc in spec.arcs:
        vs, vt = arc.source.vertex, arc.target.vertex
        if vs == vt:
            loops.append(arc)
            continue
        both_ports = arc.source.frame_port and arc.target.frame_port
        if both_ports and ((vs in in_set) == (vt in in_set)):
            flats.append(arc)  # same boundary row; routed directly
            continue
        flip = (arc.source.frame_port and vs in out_set) or (
            arc.target.frame_port and vt in in_set
        )
        upper, lower = (arc.target, arc.source) if flip else (arc.source, arc.target)
        plain.append(_Arc(arc.edge_id, upper, lower, flip, arc.arrow_at_source))

    child_arcs = [
        (a.upper.vertex, a.lower.vertex)
        for a in plain
        if not a.upper.frame_port and not a.lower.frame_port
    ]
    _, reversed_pairs = remove_cycles(children, child_arcs)
    for a in plain:
        pair = (a.upper.vertex, a.lower.vertex)
        if pair in reversed_pairs:
            a.upper, a.lower = a.lower, a.upper
            a.flipped = not a.flipped

    vertices = list(spec.in_ports) + children + list(spec.out_ports)
    layer = assign_layers(
        vertices,
        [(a.upper.vertex, a.lower.vertex) for a in plain],
        in_ports=spec.in_ports,
        out_ports=spec.out_ports,
    )

    # Subdivide long arcs with one dummy vertex per intermediate layer.
    dummy_count = 0
    seg_arcs: list[tuple[str, str]] = []
    for a in plain:
        lu, lv = layer[a.upper.vertex], layer[a.lower.vertex]
        a.chain = [a.upper.vertex]
        for li in range(lu + 1, lv):
            dummy = f"__dummy__{dummy_count}"
            dummy_count += 1
            layer[dummy] = li
            a.chain.append(dummy)
        a.chain.append(a.lower.vertex)
        seg_arcs.extend(zip(a.chain, a.chain[1:]))

    n_layers = max(layer.values()) + 1 if layer else 0
    rows: list[list[str]] = [[] for _ in range(n_layers)]
    ordered_vertices = list(spec.in_ports) + children + list(spec.out_ports)
    if SEPARATOR_VERTEX in layer:
        ordered_vertices.append(SEPARATOR_VERTEX)
    ordered_vertices.extend(
        v for v in layer if v.startswith("__dummy__")
    )
    for v in ordered_vertices:
        rows[layer[v]].append(v)

    orders = reduce_crossings(rows, seg_arcs)

    widths: dict[str, float] = {}
    heights: dict[str, float] = {}
    for v in layer:
        if v in spec.boxes:
            widths[v], heights[v] = spec.boxes[v]
        elif v in in_set or v in out_set:
            widths[v], heights[v] = PORT_SIZE, 0.0
        else:
            widths[v], heights[v] = _DUMMY_WIDTH, 0.0

    centers = _assign_x(orders, seg_arcs, widths, node_spacing)

    row_heights = [
        max([heights[v] for v in row], default=0.0) for row in orders
    ]
    row_tops: list[float] = []
    y = frame_padding
    for h in row_heights:
        row_tops.append(y)
        y += h + layer_spacing
    content_bottom = y - layer_spacing if row_heights else frame_padding

    min_x = min(
        (centers[v] - widths[v] / 2.0 for row in orders for v in row),
        default=frame_padding,
    )
    shift = frame_padding - min_x
    max_x = max(
        (centers[v] + widths[v] / 2.0 + shift for row in orders for v in row),
        default=frame_padding,
    )

    width = max_x + frame_padding
    height = content_bottom + frame_padding

    placements: dict[str, Rect] = {}
    port_anchors: dict[str, Point] = {}
    vertex_point: dict[str, Point] = {}
    for li, row in enumerate(orders):
        for v in row:
            cx = centers[v] + shift
            if v in spec.boxes:
                w, h = spec.boxes[v]
                top = row_tops[li] + (row_heights[li] - h) / 2.0
                placements[v] = Rect(cx - w / 2.0, top, w, h)
            elif v in in_set:
                port_anchors[v] = (cx, 0.0)
            elif v in out_set:
                port_anchors[v] = (cx, height)
            else:
                vertex_point[v] = (cx, row_tops[li] + row_heights[li] / 2.0)

    def attach(end: ArcEnd, *, upper: bool) -> Point:
        if end.frame_port:
            return port_anchors[end.vertex]
        rect = placements[end.vertex]
        if end.port is not None:
            ins = spec.box_in_ports.get(end.vertex, ())
            outs = spec.box_out_ports.get(end.vertex, ())
            if end.port in ins:
                return _box_port_point(rect, ins, end.port, top=True)
            if end.port in outs:
                return _box_port_point(rect, outs, end.port, top=False)
        return (rect.cx, rect.y1 if upper else rect.y)

    edges: list[InnerEdge] = []
    for a in plain:
        points = [attach(a.upper, upper=True)]
        points.extend(vertex_point[d] for d in a.chain[1:-1])
        points.append(attach(a.lower, upper=False))
        target_end = "source" if a.flipped else "target"
        if a.arrow_at_source:
            arrow = "target" if target_end == "source" else "source"
        else:
            arrow = target_end
        edges.append(InnerEdge(a.edge_id, tuple(points), arrow))

    for arc in loops:
        rect = placements.get(arc.source.vertex)
        if rect is None:
            continue
        start = attach(arc.source, upper=True)
        end = attach(arc.target, upper=False)
        side = rect.x1 + _LOOP_MARGIN
        points = (
            start,
            (start[0], rect.y1 + _LOOP_MARGIN / 2.0),
            (side, rect.y1 + _LOOP_MARGIN / 2.0),
            (side, rect.y - _LOOP_MARGIN / 2.0),
            (end[0], rect.y - _LOOP_MARGIN / 2.0),
            end,
        )
        arrow = "source" if arc.arrow_at_source else "target"
        edges.append(InnerEdge(arc.edge_id, points, arrow))

    for arc in flats:
        src = port_anchors.get(arc.source.vertex)
        tgt = port_anchors.get(arc.target.vertex)
        if src is None or tgt is None:
            continue
        arrow = "source" if arc.arrow_at_source else "target"
        edges.append(InnerEdge(arc.edge_id, (src, tgt), arrow))

    return InnerLayout(
        width=width,
        height=height,
        placements=placements,
        port_anchors=port_anchors,
        edges=tuple(edges),
        layers=layer,
        orders=tuple(tuple(row) for row in orders),
    )


def _assign_x(
    orders: list[list[str]],
    seg_arcs: list[tuple[str, str]],
    widths: dict[str, float],
    node_spacing: float,
) -> dict[str, float]:
    """Iterated barycenter alignment of layer rows with min-gap enforcement."""
    preds: dict[str, list[str]] = {}
    succs: dict[str, list[str]] = {}
    for u, v in seg_arcs:
        preds.setdefault(v, []).append(u)
        succs.setdefault(u, []).append(v)

    centers: dict[str, float] = {}
    for row in orders:
        x = 0.0
        for v in row:
            centers[v] = x + widths[v] / 2.0
            x += widths[v] + node_spacing

    def sweep(row: list[str], neighbours: dict[str, list[str]]) -> None:
        if not row:
            return
        desired = []
        for v in row:
            ns = [centers[n] for n in neighbours.get(v, ()) if n in centers]
            desired.append(sum(ns) / len(ns) if ns else centers[v])
        gaps = [
            widths[a] / 2.0 + node_spacing + widths[b] / 2.0
            for a, b in zip(row, row[1:])
        ]
        for v, x in zip(row, _resolve_row(desired, gaps)):
            centers[v] = x

    for _ in range(3):
        for li in range(1, len(orders)):
            sweep(orders[li], preds)
        for li in range(len(orders) - 2, -1, -1):
            sweep(orders[li], succs)
    return centers
