"""The one pipeline behind both the CLI and the HTTP service.

validate -> close expansion -> resolve duplicates -> inner layouts ->
frame placement -> routing -> scene.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .frames import build_frame_specs
from .inner import InnerLayout, compute_inner_layout
from .model import (
    CompoundGraph,
    Diagnostic,
    DuplicateMode,
    ExpansionPlan,
    close_expansion,
    resolve_duplicates,
    validate,
)
from .routing import RoutedEdge, route_connectors, route_inner
from .scene import Scene, build_scene
from .tree import LayoutTree, layout_tree, layout_tree_baseline


@dataclass(frozen=True)
class LayoutConfig:
    sibling_gap: float = 30.0
    node_spacing: float = 20.0
    layer_spacing: float = 40.0
    frame_padding: float = 15.0
    proximity_metric: str = "edge"  # or "center"
    duplicate_mode: str = "each"  # or "single"
    suppress_duplicate_edges: bool = False
    baseline: bool = False
    reverse_arrows: bool = True

    @staticmethod
    def from_dict(data: dict[str, object]) -> LayoutConfig:
        known = {f.name: f.type for f in fields(LayoutConfig)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        if "proximity_metric" in data and data["proximity_metric"] not in ("edge", "center"):
            raise ValueError("proximity_metric must be 'edge' or 'center'")
        if "duplicate_mode" in data and data["duplicate_mode"] not in ("each", "single"):
            raise ValueError("duplicate_mode must be 'each' or 'single'")
        return LayoutConfig(**data)  # type: ignore[arg-type]


class FatalDiagnosticsError(Exception):
    """The graph is structurally broken; layout cannot proceed."""

    def __init__(self, diagnostics: tuple[Diagnostic, ...]):
        super().__init__("; ".join(d.message for d in diagnostics if d.fatal))
        self.diagnostics = diagnostics


@dataclass
class PipelineResult:
    scene: Scene
    diagnostics: tuple[Diagnostic, ...]
    tree: LayoutTree
    plan: ExpansionPlan
    inner: dict[str, InnerLayout]
    routed: list[RoutedEdge]
    expansion: tuple[str, ...]  # requested set after ancestor closure, sorted


def run_pipeline(
    graph: CompoundGraph,
    expand: set[str] | frozenset[str],
    config: LayoutConfig = LayoutConfig(),
) -> PipelineResult:
    """Lay out one graph deterministically.

    Raises FatalDiagnosticsError for structurally broken graphs and
    ValueError for unknown expansion ids.
    """
    result = validate(graph)
    if result.fatal:
        raise FatalDiagnosticsError(result.diagnostics)
    g = result.graph

    state = close_expansion(g, expand)
    plan = resolve_duplicates(g, state, DuplicateMode(config.duplicate_mode))

    specs = build_frame_specs(g, plan)
    inner = {
        fid: compute_inner_layout(
            spec,
            node_spacing=config.node_spacing,
            layer_spacing=config.layer_spacing,
            frame_padding=config.frame_padding,
        )
        for fid, spec in specs.items()
    }

    arrange = layout_tree_baseline if config.baseline else layout_tree
    tree = arrange(
        g,
        plan,
        inner,
        sibling_gap=config.sibling_gap,
        proximity_metric=config.proximity_metric,
    )

    routed: list[RoutedEdge] = []
    for fid in sorted(tree.nodes):
        node = tree.nodes[fid]
        routed.extend(
            route_inner(g, fid, inner[fid], (node.frame.x, node.frame.y))
        )
    routed.extend(
        route_connectors(
            g,
            plan,
            tree,
            inner,
            suppress_duplicate_edges=config.suppress_duplicate_edges,
        )
    )

    expansion = tuple(sorted(state.expanded))
    scene = build_scene(g, plan, tree, inner, routed, expansion)
    return PipelineResult(
        scene=scene,
        diagnostics=result.diagnostics,
        tree=tree,
        plan=plan,
        inner=inner,
        routed=routed,
        expansion=expansion,
    )
