"""Edge routing: polylines, connectors, duplicate links and crossings."""

from __future__ import annotations

import random

from portlayout.geometry import Rect
from portlayout.model import (
    Atom,
    CompoundGraph,
    Edge,
    Group,
    Port,
    PortDirection,
)
from portlayout.pipeline import LayoutConfig, run_pipeline
from portlayout.routing import RoutedEdge, count_crossings

from corpus import brute_force_crossings


def _ported_graph() -> CompoundGraph:
    return CompoundGraph(
        groups=(
            Group(
                "A",
                children=("B", "a1"),
                in_ports=(Port("p1", "A", PortDirection.IN),),
                out_ports=(Port("p2", "A", PortDirection.OUT),),
            ),
            Group(
                "B",
                children=("a2",),
                in_ports=(Port("q1", "B", PortDirection.IN),),
                out_ports=(Port("q2", "B", PortDirection.OUT),),
            ),
        ),
        atoms=(Atom("a1"), Atom("a2")),
        edges=(
            Edge("e1", "p1", "q1"),
            Edge("e2", "q2", "a1"),
            Edge("e3", "a1", "p2"),
            Edge("e4", "q1", "a2"),
        ),
    )


class TestRouteInner:
    def test_straight_arc_is_box_clipped(self):
        result = run_pipeline(_ported_graph(), {"A", "B"}, LayoutConfig())
        scene_edges = {e.edge_id: e for e in result.routed}
        e2 = scene_edges["e2"]
        boxes = result.inner["A"].placements
        frame_a = result.tree.nodes["A"].frame
        b_rect = boxes["B"].translated(frame_a.x, frame_a.y)
        a1_rect = boxes["a1"].translated(frame_a.x, frame_a.y)
        # Starts on B's bottom edge (at its out-port square) and ends on a1's top.
        assert e2.points[0][1] == b_rect.y1
        assert e2.points[-1][1] == a1_rect.y

    def test_edge_into_child_group_port_ends_at_the_port_square(self):
        result = run_pipeline(_ported_graph(), {"A", "B"}, LayoutConfig())
        edge = next(e for e in result.routed if e.edge_id == "e1")
        frame_a = result.tree.nodes["A"].frame
        b_rect = result.inner["A"].placements["B"].translated(frame_a.x, frame_a.y)
        end = edge.points[-1]
        assert end[1] == b_rect.y  # on the top edge of B's collapsed box
        assert b_rect.x < end[0] < b_rect.x1

    def test_frame_port_edges_start_on_the_boundary(self):
        result = run_pipeline(_ported_graph(), {"A", "B"}, LayoutConfig())
        edge = next(e for e in result.routed if e.edge_id == "e1")
        frame_a = result.tree.nodes["A"].frame
        assert edge.points[0][1] == frame_a.y  # top boundary of A's frame

    def test_synthesized_port_edges_are_diagnostic_styled(self):
        graph = CompoundGraph(
            groups=(Group("A", children=("a1",)),),
            atoms=(Atom("a1"),),
            edges=(Edge("e1", "a1", "missing", target_owner_hint="A"),),
        )
        result = run_pipeline(graph, {"A"}, LayoutConfig())
        styles = {e.edge_id: e.style for e in result.routed}
        assert styles["e1"] == "diagnostic"


class TestConnectors:
    def test_right_direction_connector_joins_facing_edges(self):
        result = run_pipeline(_ported_graph(), {"A", "B"}, LayoutConfig())
        connector = next(
            e for e in result.routed if e.edge_id == "connector:B"
        )
        node = result.tree.nodes["B"]
        (x0, y0), (x1, y1) = connector.points
        assert node.direction == "right"
        assert x0 == node.anchor_abs.x1
        assert x1 == node.frame.x
        assert y0 == y1

    def test_duplicates_get_one_frame_and_dashed_links(self):
        graph = CompoundGraph(
            groups=(
                Group("P", children=("g1", "g2")),
                Group("g1", children=("a1",), definition_id="f"),
                Group("g2", children=("a2",), definition_id="f"),
            ),
            atoms=(Atom("a1"), Atom("a2")),
        )
        config = LayoutConfig(duplicate_mode="single")
        result = run_pipeline(graph, {"g1", "g2"}, config)
        assert "g1" in result.tree.nodes
        assert "g2" not in result.tree.nodes
        links = [e for e in result.routed if e.style == "duplicate-link"]
        connectors = [e for e in result.routed if e.style == "connector"]
        assert len(links) == 1
        assert len(connectors) == 2  # frames for P and g1

    def test_suppress_flag_removes_duplicate_links(self):
        graph = CompoundGraph(
            groups=(
                Group("P", children=("g1", "g2")),
                Group("g1", definition_id="f"),
                Group("g2", definition_id="f"),
            ),
        )
        config = LayoutConfig(duplicate_mode="single", suppress_duplicate_edges=True)
        result = run_pipeline(graph, {"g1"}, config)
        assert [e for e in result.routed if e.style == "duplicate-link"] == []


class TestCountCrossings:
    def test_x_crossing_pair(self):
        edges = [
            RoutedEdge("a", ((0, 0), (10, 10)), "flow", "target"),
            RoutedEdge("b", ((0, 10), (10, 0)), "flow", "target"),
        ]
        assert count_crossings(edges) == 1

    def test_parallel_segments(self):
        edges = [
            RoutedEdge("a", ((0, 0), (10, 0)), "flow", "target"),
            RoutedEdge("b", ((0, 5), (10, 5)), "flow", "target"),
        ]
        assert count_crossings(edges) == 0

    def test_shared_endpoints_are_excluded(self):
        edges = [
            RoutedEdge("a", ((0, 0), (10, 10)), "flow", "target"),
            RoutedEdge("b", ((10, 10), (20, 0)), "flow", "target"),
        ]
        assert count_crossings(edges) == 0

    def test_matches_brute_force_on_random_scenes(self):
        rng = random.Random(99)
        for _ in range(20):
            edges = []
            for i in range(20):
                points = tuple(
                    (float(rng.randint(0, 100)), float(rng.randint(0, 100)))
                    for _ in range(rng.randint(2, 4))
                )
                edges.append(RoutedEdge(f"e{i}", points, "flow", "target"))
            expected = brute_force_crossings([e.points for e in edges])
            assert count_crossings(edges) == expected


class TestPortBoundaryDiscipline:
    def test_no_flow_edge_crosses_a_frame_boundary_off_port(self):
        from corpus import random_expansion, random_graph

        from portlayout.geometry import segments_cross

        for seed in range(10):
            graph = random_graph(seed, max_atoms=40, max_depth=4, max_fanout=4)
            rng = random.Random(seed)
            result = run_pipeline(
                graph, random_expansion(rng, graph), LayoutConfig()
            )
            frames = [n.frame for n in result.tree.nodes.values()]
            for edge in result.routed:
                if edge.style not in ("flow", "diagnostic"):
                    continue
                for a, b in zip(edge.points, edge.points[1:]):
                    for f in frames:
                        for s0, s1 in (
                            ((f.x, f.y), (f.x1, f.y)),
                            ((f.x1, f.y), (f.x1, f.y1)),
                            ((f.x1, f.y1), (f.x, f.y1)),
                            ((f.x, f.y1), (f.x, f.y)),
                        ):
                            assert not segments_cross(a, b, s0, s1), (
                                seed,
                                edge.edge_id,
                            )
