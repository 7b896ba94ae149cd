"""Scene serialization, SVG emission and metrics."""

from __future__ import annotations

import json

import pytest

from portlayout.geometry import Rect
from portlayout.model import Atom, CompoundGraph, Edge, Group
from portlayout.pipeline import LayoutConfig, run_pipeline
from portlayout.scene import (
    DIAGNOSTIC_FILL,
    Metrics,
    Scene,
    SceneEdge,
    ScenePort,
    compute_metrics,
    from_json,
    to_json,
    to_svg,
)
from portlayout.tree import LayoutTree, LayoutTreeNode

from corpus import brute_force_crossings


def _empty_scene() -> Scene:
    return Scene(Rect(0, 0, 0, 0), (), (), ())


def _pipeline_scene():
    graph = CompoundGraph(
        groups=(Group("A", children=("a1", "a2")),),
        atoms=(Atom("a1", "x"), Atom("a2", "y")),
        edges=(Edge("e1", "a1", "a2"),),
    )
    return run_pipeline(graph, {"A"}, LayoutConfig())


class TestJson:
    def test_empty_scene_serializes_all_sections(self):
        text = to_json(_empty_scene())
        data = json.loads(text)
        assert data["boxes"] == []
        assert data["ports"] == []
        assert data["edges"] == []
        assert data["schema"] == "scene/1"
        assert set(data["canvas"]) == {"x", "y", "width", "height"}

    def test_same_scene_serializes_to_identical_bytes(self):
        scene = _pipeline_scene().scene
        assert to_json(scene).encode() == to_json(scene).encode()

    def test_round_trip_is_identity(self):
        scene = _pipeline_scene().scene
        assert from_json(to_json(scene)) == scene

    def test_coordinates_are_quantized_to_three_decimals(self):
        scene = _pipeline_scene().scene
        data = json.loads(to_json(scene))

        def walk(value):
            if isinstance(value, float):
                assert value == round(value, 3)
            elif isinstance(value, list):
                for v in value:
                    walk(v)
            elif isinstance(value, dict):
                for v in value.values():
                    walk(v)

        walk(data)

    def test_repeated_pipeline_runs_are_byte_identical(self):
        first = to_json(_pipeline_scene().scene)
        second = to_json(_pipeline_scene().scene)
        third = to_json(_pipeline_scene().scene)
        assert first == second == third


class TestSvg:
    def test_empty_scene_is_still_valid_svg(self):
        svg = to_svg(_empty_scene())
        assert svg.startswith("<?xml")
        assert "<svg" in svg and svg.rstrip().endswith("</svg>")

    def test_synthesized_port_uses_the_diagnostic_fill_exactly_once(self):
        graph = CompoundGraph(
            groups=(Group("A", children=("a1",)),),
            atoms=(Atom("a1"),),
            edges=(Edge("e1", "a1", "ghost", target_owner_hint="A"),),
        )
        # A stays collapsed, so its synthesized port renders on one box only.
        result = run_pipeline(graph, set(), LayoutConfig())
        svg = to_svg(result.scene)
        diagnostic_rects = [
            line
            for line in svg.splitlines()
            if 'class="port"' in line and DIAGNOSTIC_FILL in line
        ]
        assert len(diagnostic_rects) == 1

    def test_expanded_owner_shows_the_synthesized_port_in_both_views(self):
        graph = CompoundGraph(
            groups=(Group("A", children=("a1",)),),
            atoms=(Atom("a1"),),
            edges=(Edge("e1", "a1", "ghost", target_owner_hint="A"),),
        )
        result = run_pipeline(graph, {"A"}, LayoutConfig())
        svg = to_svg(result.scene)
        diagnostic_rects = [
            line
            for line in svg.splitlines()
            if 'class="port"' in line and DIAGNOSTIC_FILL in line
        ]
        assert len(diagnostic_rects) == 2  # collapsed box copy + frame boundary copy

    def test_dasharray_only_on_duplicate_links(self):
        graph = CompoundGraph(
            groups=(
                Group("P", children=("g1", "g2")),
                Group("g1", definition_id="f"),
                Group("g2", definition_id="f"),
            ),
        )
        result = run_pipeline(
            graph, {"g1"}, LayoutConfig(duplicate_mode="single")
        )
        svg = to_svg(result.scene)
        for line in svg.splitlines():
            if "stroke-dasharray" in line:
                assert "edge-duplicate-link" in line
        assert svg.count("stroke-dasharray") == 1

    def test_viewbox_matches_canvas(self):
        result = _pipeline_scene()
        c = result.scene.canvas
        assert f'viewBox="{c.x} {c.y} {c.width} {c.height}"' in to_svg(result.scene)

    def test_labels_are_escaped(self):
        scene = Scene(
            Rect(0, 0, 100, 100),
            (
                # Direct construction: a label with markup characters.
                *(),
            ),
            (),
            (),
        )
        from portlayout.scene import SceneBox

        scene = Scene(
            Rect(0, 0, 100, 100),
            (SceneBox("b", "b", Rect(0, 0, 50, 30), "atom", "a<&>b", "collapsed"),),
            (),
            (),
        )
        svg = to_svg(scene)
        assert "a&lt;&amp;&gt;b" in svg


class TestMetrics:
    def _tree_with_one_frame(self) -> LayoutTree:
        node = LayoutTreeNode("__top__", (100.0, 100.0))
        node.frame = Rect(0, 0, 100, 100)
        return LayoutTree(node, {"__top__": node})

    def test_three_four_five_edge_length(self):
        scene = Scene(
            Rect(0, 0, 10, 10),
            (),
            (),
            (SceneEdge("e", ((0.0, 0.0), (3.0, 4.0)), "flow", "target"),),
        )
        metrics = compute_metrics(scene, self._tree_with_one_frame())
        assert metrics.total_edge_length == pytest.approx(5.0)

    def test_touching_anchor_has_zero_distance(self):
        parent = LayoutTreeNode("__top__", (100.0, 100.0))
        parent.frame = Rect(0, 0, 100, 100)
        child = LayoutTreeNode("g", (50.0, 50.0))
        child.frame = Rect(100, 20, 50, 50)
        child.anchor_abs = Rect(80, 20, 20, 20)  # touches the frame edge
        tree = LayoutTree(parent, {"__top__": parent, "g": child})
        metrics = compute_metrics(_empty_scene(), tree)
        assert metrics.anchor_frame_distances["g"] == 0.0
        assert metrics.frame_count == 2

    def test_crossings_match_brute_force(self):
        import random

        rng = random.Random(4)
        edges = tuple(
            SceneEdge(
                f"e{i}",
                tuple(
                    (float(rng.randint(0, 60)), float(rng.randint(0, 60)))
                    for _ in range(3)
                ),
                "flow",
                "target",
            )
            for i in range(15)
        )
        scene = Scene(Rect(0, 0, 60, 60), (), (), edges)
        metrics = compute_metrics(scene, self._tree_with_one_frame())
        assert metrics.crossing_count == brute_force_crossings(
            [e.points for e in edges]
        )

    def test_metrics_are_translation_invariant(self):
        result = _pipeline_scene()
        scene = result.scene
        tree = result.tree
        base = compute_metrics(scene, tree)

        dx, dy = 40.0, 70.0
        moved_scene = Scene(
            scene.canvas.translated(dx, dy),
            tuple(
                b.__class__(
                    b.id, b.group, b.rect.translated(dx, dy), b.kind, b.label,
                    b.state, b.diagnostic,
                )
                for b in scene.boxes
            ),
            tuple(
                ScenePort(p.id, p.port, p.x + dx, p.y + dy, p.direction, p.synthesized)
                for p in scene.ports
            ),
            tuple(
                SceneEdge(
                    e.id,
                    tuple((x + dx, y + dy) for x, y in e.points),
                    e.style,
                    e.arrow_at,
                )
                for e in scene.edges
            ),
            scene.expansion,
        )
        moved_nodes = {}
        for gid, node in tree.nodes.items():
            clone = LayoutTreeNode(node.group_id, node.size)
            clone.frame = node.frame.translated(dx, dy)
            clone.anchor_abs = (
                node.anchor_abs.translated(dx, dy) if node.anchor_abs else None
            )
            moved_nodes[gid] = clone
        moved_tree = LayoutTree(moved_nodes[tree.root.group_id], moved_nodes)

        moved = compute_metrics(moved_scene, moved_tree)
        assert moved.total_edge_length == pytest.approx(base.total_edge_length)
        assert moved.crossing_count == base.crossing_count
        assert moved.bounding_area == pytest.approx(base.bounding_area)
        assert moved.anchor_frame_distances == base.anchor_frame_distances

    def test_metrics_dict_is_json_ready(self):
        result = _pipeline_scene()
        metrics = compute_metrics(result.scene, result.tree)
        text = json.dumps(metrics.to_dict(), sort_keys=True)
        assert "total_edge_length" in text
        assert "anchor_frame_distances" in text
