"""Core model: validation, expansion closure and duplicate resolution."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from portlayout.model import (
    Atom,
    CompoundGraph,
    DuplicateMode,
    Edge,
    ExpansionState,
    Group,
    GroupKind,
    Port,
    PortDirection,
    close_expansion,
    resolve_duplicates,
    validate,
)

from corpus import random_graph


def _group(gid: str, children: tuple[str, ...] = (), **kw) -> Group:
    return Group(id=gid, label=gid, children=children, **kw)


def _two_group_graph() -> CompoundGraph:
    return CompoundGraph(
        groups=(
            _group("A", ("B", "a1"), in_ports=(Port("p1", "A", PortDirection.IN),)),
            _group("B", ("a2",), out_ports=(Port("q1", "B", PortDirection.OUT),)),
        ),
        atoms=(Atom("a1"), Atom("a2")),
        edges=(Edge("e1", "p1", "a1"), Edge("e2", "q1", "a1")),
    )


class TestValidate:
    def test_well_formed_graph_has_no_diagnostics(self):
        result = validate(_two_group_graph())
        assert result.diagnostics == ()
        assert result.graph == _two_group_graph()

    def test_undefined_port_reference_synthesizes_red_port(self):
        graph = CompoundGraph(
            groups=(_group("A", ("a1",)),),
            atoms=(Atom("a1"),),
            edges=(Edge("e1", "a1", "p9", target_owner_hint="A"),),
        )
        result = validate(graph)
        assert [d.code for d in result.diagnostics] == ["undefined-port"]
        assert result.diagnostics[0].subject == "p9"
        assert not result.fatal
        port = result.graph.ports_by_id["p9"]
        assert port.synthesized
        assert port.owner == "A"
        assert port.direction is PortDirection.IN

    def test_undefined_source_becomes_out_port(self):
        graph = CompoundGraph(
            groups=(_group("A", ("a1",)),),
            atoms=(Atom("a1"),),
            edges=(Edge("e1", "p9", "a1", source_owner_hint="A"),),
        )
        result = validate(graph)
        assert result.graph.ports_by_id["p9"].direction is PortDirection.OUT

    def test_unknown_owner_gets_floating_diagnostics_group(self):
        graph = CompoundGraph(
            groups=(_group("A", ("a1",)),),
            atoms=(Atom("a1"),),
            edges=(Edge("e1", "a1", "p9"),),
        )
        result = validate(graph)
        assert result.graph.ports_by_id["p9"].owner == "__diagnostics__"
        assert "__diagnostics__" in result.graph.groups_by_id

    def test_hierarchy_cycle_is_fatal_and_unrepaired(self):
        graph = CompoundGraph(
            groups=(_group("A", ("B",)), _group("B", ("A",))),
        )
        result = validate(graph)
        assert any(d.code == "hierarchy-cycle" and d.fatal for d in result.diagnostics)
        assert result.fatal
        assert result.graph is graph

    def test_duplicate_id_is_fatal(self):
        graph = CompoundGraph(
            groups=(_group("A"),),
            atoms=(Atom("A"),),
        )
        result = validate(graph)
        assert any(d.code == "duplicate-id" for d in result.diagnostics)
        assert result.fatal

    def test_validate_only_appends_never_removes(self):
        graph = CompoundGraph(
            groups=(_group("A", ("a1",)),),
            atoms=(Atom("a1"),),
            edges=(Edge("e1", "a1", "zzz"), Edge("e2", "zzz", "a1")),
        )
        result = validate(graph)
        assert result.graph.atoms == graph.atoms
        assert result.graph.edges == graph.edges
        for g in graph.groups:
            repaired = result.graph.groups_by_id[g.id]
            assert set(g.in_ports) <= set(repaired.in_ports)
            assert set(g.out_ports) <= set(repaired.out_ports)
            assert repaired.children == g.children

    def test_one_diagnostic_per_violation_single_port_synthesized(self):
        graph = CompoundGraph(
            groups=(_group("A", ("a1",)),),
            atoms=(Atom("a1"),),
            edges=(Edge("e1", "a1", "p9"), Edge("e2", "a1", "p9")),
        )
        result = validate(graph)
        assert sum(1 for d in result.diagnostics if d.code == "undefined-port") == 2
        synthesized = [p for p in result.graph.ports_by_id.values() if p.synthesized]
        assert len(synthesized) == 1


class TestCloseExpansion:
    def _chain(self) -> CompoundGraph:
        return CompoundGraph(
            groups=(
                _group("root", ("A",)),
                _group("A", ("B",)),
                _group("B", ()),
            )
        )

    def test_ancestors_are_added(self):
        state = close_expansion(self._chain(), {"B"})
        assert state.expanded == {"root", "A", "B"}

    def test_empty_request_stays_empty(self):
        assert close_expansion(self._chain(), set()).expanded == frozenset()

    def test_root_needs_no_ancestors(self):
        assert close_expansion(self._chain(), {"root"}).expanded == {"root"}

    def test_unknown_id_raises_with_the_id(self):
        with pytest.raises(ValueError, match="nope"):
            close_expansion(self._chain(), {"nope"})

    def test_atom_id_is_rejected(self):
        graph = CompoundGraph(groups=(_group("A", ("a1",)),), atoms=(Atom("a1"),))
        with pytest.raises(ValueError, match="a1"):
            close_expansion(graph, {"a1"})

    @given(st.integers(min_value=0, max_value=40), st.data())
    @settings(max_examples=30, deadline=None)
    def test_idempotent_on_random_hierarchies(self, seed, data):
        graph = random_graph(seed, max_atoms=20, max_depth=4, max_fanout=4)
        ids = [g.id for g in graph.groups]
        requested = set(
            data.draw(st.lists(st.sampled_from(ids), max_size=5)) if ids else []
        )
        once = close_expansion(graph, requested)
        twice = close_expansion(graph, set(once.expanded))
        assert once.expanded == twice.expanded
        assert requested <= once.expanded
        for gid in once.expanded:
            parent = graph.parent(gid)
            assert parent is None or parent in once.expanded


class TestResolveDuplicates:
    def _dup_graph(self) -> CompoundGraph:
        return CompoundGraph(
            groups=(
                _group("parent", ("g1", "g2")),
                Group(id="g1", children=("a1",), definition_id="f"),
                Group(id="g2", children=("a2",), definition_id="f"),
            ),
            atoms=(Atom("a1"), Atom("a2")),
        )

    def test_single_expansion_keeps_lowest_id(self):
        graph = self._dup_graph()
        state = close_expansion(graph, {"g1", "g2"})
        plan = resolve_duplicates(graph, state, DuplicateMode.SINGLE_EXPANSION)
        assert plan.expanded == {"parent", "g1"}
        assert len(plan.duplicate_links) == 1
        link = plan.duplicate_links[0]
        assert (link.duplicate, link.representative) == ("g2", "g1")

    def test_expand_each_is_passthrough(self):
        graph = self._dup_graph()
        state = close_expansion(graph, {"g1", "g2"})
        plan = resolve_duplicates(graph, state, DuplicateMode.EXPAND_EACH)
        assert plan.expanded == state.expanded
        assert plan.duplicate_links == ()

    def test_no_shared_definition_means_no_links(self):
        graph = CompoundGraph(
            groups=(
                _group("parent", ("g1", "g2")),
                Group(id="g1", definition_id="f"),
                Group(id="g2", definition_id="h"),
            ),
        )
        state = close_expansion(graph, {"g1", "g2"})
        plan = resolve_duplicates(graph, state, DuplicateMode.SINGLE_EXPANSION)
        assert plan.expanded == state.expanded
        assert plan.duplicate_links == ()

    def test_descendants_of_demoted_duplicates_leave_the_plan(self):
        graph = CompoundGraph(
            groups=(
                _group("parent", ("g1", "g2")),
                Group(id="g1", children=(), definition_id="f"),
                Group(id="g2", children=("inner",), definition_id="f"),
                Group(id="inner", children=()),
            ),
        )
        state = close_expansion(graph, {"g2", "inner"})
        plan = resolve_duplicates(graph, state, DuplicateMode.SINGLE_EXPANSION)
        assert plan.expanded == {"parent", "g1"}

    def test_at_most_one_expanded_member_per_slot_on_random_graphs(self):
        for seed in range(25):
            graph = random_graph(seed, max_atoms=40, max_depth=4, max_fanout=5)
            rng = random.Random(seed * 7 + 1)
            requested = {g.id for g in graph.groups if rng.random() < 0.5}
            state = close_expansion(graph, requested)
            plan = resolve_duplicates(graph, state, DuplicateMode.SINGLE_EXPANSION)
            slots: dict[tuple[str | None, str], int] = {}
            for gid in plan.expanded:
                group = graph.groups_by_id[gid]
                if group.definition_id is None:
                    continue
                key = (graph.parent(gid), group.definition_id)
                slots[key] = slots.get(key, 0) + 1
            assert all(count <= 1 for count in slots.values())
            for gid in plan.expanded:
                parent = graph.parent(gid)
                assert parent is None or parent in plan.expanded


def test_expansion_state_contains():
    state = ExpansionState(frozenset({"a"}))
    assert "a" in state
    assert "b" not in state
