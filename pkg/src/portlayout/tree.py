"""Placement of detail frames near their collapsed counterparts.

Every expanded group gets its own detail frame.  Frames form a tree (a frame's
parent is the frame whose layout holds the group's collapsed box), and are
placed bottom-up: each child frame starts aligned with its collapsed box and
grows the drawing either rightward or downward, whichever boundary the box
sits closest to.  Sibling subtrees in the same direction are separated by
contour scanning; the right-growing and down-growing sets are then separated
from each other by the cheaper of a single y-shift or x-shift; finally the
parent absorbs the average child displacement, which pulls the collapsed
boxes back toward their detail frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .contour import Contour, max_feasible_shift, min_separation_shift
from .geometry import EPS, Rect
from .inner import InnerLayout
from .model import TOP_FRAME_ID, CompoundGraph, ExpansionPlan

DIR_ROOT = "root"
DIR_RIGHT = "right"
DIR_DOWN = "down"


@dataclass
class LayoutTreeNode:
    group_id: str
    size: tuple[float, float]
    anchor: Rect | None = None  # collapsed box, local to the parent frame
    direction: str = DIR_ROOT
    children: list[LayoutTreeNode] = field(default_factory=list)
    offset: tuple[float, float] = (0.0, 0.0)  # relative to parent frame origin
    displacement: tuple[float, float] = (0.0, 0.0)  # applied during separation
    contour: Contour = Contour()
    cross_axis: str | None = None  # axis chosen when separating the two sets
    cross_shift: float = 0.0
    recenter_delta: tuple[float, float] = (0.0, 0.0)
    frame: Rect = Rect(0.0, 0.0, 0.0, 0.0)  # absolute, set by the final pass
    anchor_abs: Rect | None = None


@dataclass
class LayoutTree:
    root: LayoutTreeNode
    nodes: dict[str, LayoutTreeNode]

    def frames(self) -> dict[str, Rect]:
        return {gid: node.frame for gid, node in self.nodes.items()}


def choose_direction(anchor: Rect, parent_frame: Rect, metric: str = "edge") -> str:
    """Pick the growth direction by the anchor's proximity to the boundaries.

    ``edge`` compares the anchor's right/bottom edges against the frame's
    right/bottom boundaries; ``center`` compares from the anchor centre.
    Ties go right.
    """
    if not parent_frame.contains_rect(anchor):
        raise ValueError(
            f"anchor {anchor} lies outside the parent frame {parent_frame}"
        )
    if metric == "center":
        gap_right = parent_frame.x1 - anchor.cx
        gap_down = parent_frame.y1 - anchor.cy
    else:
        gap_right = parent_frame.x1 - anchor.x1
        gap_down = parent_frame.y1 - anchor.y1
    return DIR_RIGHT if gap_right <= gap_down + EPS else DIR_DOWN


def initialize_child(
    size: tuple[float, float],
    anchor: Rect,
    direction: str,
    parent_frame: Rect,
    sibling_gap: float,
) -> tuple[float, float]:
    """Initial frame offset: beyond the boundary, centre-aligned with the anchor."""
    w, h = size
    if direction == DIR_RIGHT:
        return (parent_frame.width + sibling_gap, anchor.cy - h / 2.0)
    return (anchor.cx - w / 2.0, parent_frame.height + sibling_gap)


def separate_same_direction(
    subtrees: list[Contour],
    axis: str,
    sibling_gap: float,
    obstacle: Contour | None = None,
) -> list[tuple[float, float]]:
    """Scan same-direction siblings, pushing each just clear of the placed ones.

    Subtrees must already sit at their initialised positions, listed in scan
    order.  Each is pushed along +axis by the minimal non-negative amount
    that leaves its contour at least ``sibling_gap`` from everything placed
    before it (plus the optional obstacle), so the scan order is preserved.
    """
    placed = obstacle if obstacle is not None else Contour()
    displacements: list[tuple[float, float]] = []
    for contour in subtrees:
        t = min_separation_shift(contour, placed, axis, sibling_gap)
        moved = contour.translated(t, 0.0) if axis == "x" else contour.translated(0.0, t)
        placed = placed.union(moved)
        displacements.append((t, 0.0) if axis == "x" else (0.0, t))
    return displacements


def separate_cross_direction(
    right_contour: Contour, down_contour: Contour, sibling_gap: float
) -> tuple[str | None, float]:
    """Clear overlap between the right-growing and down-growing sets.

    Compares moving the down set along +y against moving the right set along
    +x and returns the cheaper single shift (ties choose y).  Returns
    ``(None, 0.0)`` when the contours are already clear.
    """
    if not right_contour.rects or not down_contour.rects:
        return (None, 0.0)
    t_y = min_separation_shift(down_contour, right_contour, "y", sibling_gap)
    t_x = min_separation_shift(right_contour, down_contour, "x", sibling_gap)
    if t_y <= EPS and t_x <= EPS:
        return (None, 0.0)
    if t_y <= t_x + EPS:
        return ("y", t_y)
    return ("x", t_x)


def recenter_parent(displacements: list[tuple[float, float]]) -> tuple[float, float]:
    """Component-wise mean of the child displacement vectors (empty mean is zero)."""
    if not displacements:
        return (0.0, 0.0)
    n = float(len(displacements))
    return (
        sum(d[0] for d in displacements) / n,
        sum(d[1] for d in displacements) / n,
    )


def layout_tree(
    graph: CompoundGraph,
    plan: ExpansionPlan,
    inner: dict[str, InnerLayout],
    *,
    sibling_gap: float = 30.0,
    proximity_metric: str = "edge",
) -> LayoutTree:
    """Two-direction bottom-up placement of all detail frames (absolute coords)."""
    return _layout(
        graph, plan, inner, sibling_gap=sibling_gap,
        proximity_metric=proximity_metric, baseline=False,
    )


def layout_tree_baseline(
    graph: CompoundGraph,
    plan: ExpansionPlan,
    inner: dict[str, InnerLayout],
    *,
    sibling_gap: float = 30.0,
    proximity_metric: str = "edge",
) -> LayoutTree:
    """Comparison variant: always grow right, centring children on the parent."""
    return _layout(
        graph, plan, inner, sibling_gap=sibling_gap,
        proximity_metric=proximity_metric, baseline=True,
    )


def _layout(
    graph: CompoundGraph,
    plan: ExpansionPlan,
    inner: dict[str, InnerLayout],
    *,
    sibling_gap: float,
    proximity_metric: str,
    baseline: bool,
) -> LayoutTree:
    if TOP_FRAME_ID not in inner:
        raise ValueError("missing inner layout for the top-level frame")

    nodes: dict[str, LayoutTreeNode] = {}
    il = inner[TOP_FRAME_ID]
    root = LayoutTreeNode(TOP_FRAME_ID, (il.width, il.height))
    nodes[TOP_FRAME_ID] = root

    for gid in sorted(plan.expanded):
        if gid not in graph.groups_by_id:
            raise ValueError(f"planned expansion of unknown group {gid!r}")
        if gid not in inner:
            raise ValueError(f"missing inner layout for planned group {gid!r}")
        parent = graph.parent(gid)
        if parent is not None and parent not in plan.expanded:
            raise ValueError(f"expansion plan is not ancestor-closed at {gid!r}")
        lay = inner[gid]
        nodes[gid] = LayoutTreeNode(gid, (lay.width, lay.height))

    for gid in sorted(plan.expanded):
        parent = graph.parent(gid) or TOP_FRAME_ID
        node = nodes[gid]
        placements = inner[parent].placements
        if gid not in placements:
            raise ValueError(f"group {gid!r} has no collapsed box in frame {parent!r}")
        node.anchor = placements[gid]
        nodes[parent].children.append(node)

    _combine(root, sibling_gap, proximity_metric, baseline, is_root=True)

    def place(
        node: LayoutTreeNode, ox: float, oy: float, parent_xy: tuple[float, float] | None
    ) -> None:
        w, h = node.size
        node.frame = Rect(ox, oy, w, h)
        if node.anchor is not None and parent_xy is not None:
            node.anchor_abs = node.anchor.translated(parent_xy[0], parent_xy[1])
        for c in node.children:
            place(c, ox + c.offset[0], oy + c.offset[1], (ox, oy))

    place(root, 0.0, 0.0, None)
    return LayoutTree(root, nodes)


def _combine(
    node: LayoutTreeNode, gap: float, metric: str, baseline: bool, is_root: bool = False
) -> None:
    for c in node.children:
        _combine(c, gap, metric, baseline)

    w, h = node.size
    parent_rect = Rect(0.0, 0.0, w, h)
    node.contour = Contour.of(parent_rect)
    if not node.children:
        return

    for c in node.children:
        assert c.anchor is not None
        if baseline:
            c.direction = DIR_RIGHT
            c.offset = (w + gap, (h - c.size[1]) / 2.0)
        else:
            c.direction = choose_direction(c.anchor, parent_rect, metric)
            c.offset = initialize_child(c.size, c.anchor, c.direction, parent_rect, gap)
        # The drawing must only ever grow right and down from the root, so a
        # frame never starts above or left of its parent frame's origin; a
        # child too large to stay anchor-aligned gets floored at the origin.
        c.offset = (max(c.offset[0], 0.0), max(c.offset[1], 0.0))
        c.displacement = (0.0, 0.0)
        if is_root:
            b = c.contour.bounds()
            c.offset = (max(c.offset[0], -b.x), max(c.offset[1], -b.y))
        # A subtree may overhang its own frame (descendants grown toward the
        # other axis), so push it out along its growth axis until it clears
        # the parent frame; that keeps the anchor-aligned coordinate intact.
        axis = "x" if c.direction == DIR_RIGHT else "y"
        t = min_separation_shift(
            c.contour.translated(*c.offset), Contour.of(parent_rect), axis, gap
        )
        if t > 0.0:
            if axis == "x":
                c.offset = (c.offset[0] + t, c.offset[1])
                c.displacement = (t, 0.0)
            else:
                c.offset = (c.offset[0], c.offset[1] + t)
                c.displacement = (0.0, t)

    rights = sorted(
        (c for c in node.children if c.direction == DIR_RIGHT),
        key=lambda c: (c.anchor.cy, c.group_id),
    )
    downs = sorted(
        (c for c in node.children if c.direction == DIR_DOWN),
        key=lambda c: (c.anchor.cx, c.group_id),
    )

    obstacle = Contour.of(parent_rect)
    right_disp = separate_same_direction(
        [c.contour.translated(*c.offset) for c in rights], "y", gap, obstacle
    )
    for c, (dx, dy) in zip(rights, right_disp):
        c.offset = (c.offset[0] + dx, c.offset[1] + dy)
        c.displacement = (c.displacement[0] + dx, c.displacement[1] + dy)
    down_disp = separate_same_direction(
        [c.contour.translated(*c.offset) for c in downs], "x", gap, obstacle
    )
    for c, (dx, dy) in zip(downs, down_disp):
        c.offset = (c.offset[0] + dx, c.offset[1] + dy)
        c.displacement = (c.displacement[0] + dx, c.displacement[1] + dy)

    right_union = Contour()
    for c in rights:
        right_union = right_union.union(c.contour.translated(*c.offset))
    down_union = Contour()
    for c in downs:
        down_union = down_union.union(c.contour.translated(*c.offset))

    axis, shift = separate_cross_direction(right_union, down_union, gap)
    node.cross_axis = axis
    node.cross_shift = shift
    if axis == "y":
        for c in downs:
            c.offset = (c.offset[0], c.offset[1] + shift)
            c.displacement = (c.displacement[0], c.displacement[1] + shift)
    elif axis == "x":
        for c in rights:
            c.offset = (c.offset[0] + shift, c.offset[1])
            c.displacement = (c.displacement[0] + shift, c.displacement[1])

    node.recenter_delta = _apply_recenter(node, parent_rect, gap, is_root)

    contour = Contour.of(parent_rect)
    for c in node.children:
        contour = contour.union(c.contour.translated(*c.offset))
    node.contour = contour


def _apply_recenter(
    node: LayoutTreeNode, parent_rect: Rect, gap: float, is_root: bool
) -> tuple[float, float]:
    """Shift the parent toward the mean child displacement, capped for safety.

    The raw mean can drive the parent frame into a child that was never
    displaced, flip a child to the wrong side of the parent, or (at the
    root) push content above the origin, so the translation is capped to
    the largest conflict-free amount on each axis before being applied.
    """
    delta = recenter_parent([c.displacement for c in node.children])
    children_contour = Contour()
    for c in node.children:
        children_contour = children_contour.union(c.contour.translated(*c.offset))

    dy = max_feasible_shift(
        Contour.of(parent_rect), children_contour, "y", gap, delta[1]
    )
    for c in node.children:
        if c.direction == DIR_DOWN:
            dy = min(dy, c.offset[1] - parent_rect.height - gap)
        if is_root:
            dy = min(dy, c.offset[1] + c.contour.bounds().y)
    dy = max(dy, 0.0)

    shifted = Contour.of(parent_rect.translated(0.0, dy))
    dx = max_feasible_shift(shifted, children_contour, "x", gap, delta[0])
    for c in node.children:
        if c.direction == DIR_RIGHT:
            dx = min(dx, c.offset[0] - parent_rect.width - gap)
        if is_root:
            dx = min(dx, c.offset[0] + c.contour.bounds().x)
    dx = max(dx, 0.0)

    if dx != 0.0 or dy != 0.0:
        for c in node.children:
            c.offset = (c.offset[0] - dx, c.offset[1] - dy)
    return (dx, dy)
