"""Compound graph data model: groups, atoms, ports, edges and expansion state.

All types are immutable after construction; the operations in this module are
pure functions, so shared graphs can be used concurrently without locking.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

TOP_FRAME_ID = "__top__"
DIAGNOSTIC_GROUP_ID = "__diagnostics__"


class PortDirection(str, enum.Enum):
    IN = "in"
    OUT = "out"


class GroupKind(str, enum.Enum):
    EXPRESSION = "expression"
    FUNCTION = "function"
    LOOP = "loop"
    MODULE = "module"
    GENERIC = "generic"


class EdgeStyle(str, enum.Enum):
    FLOW = "flow"
    DUPLICATE_LINK = "duplicate-link"
    CONNECTOR = "connector"


@dataclass(frozen=True)
class Port:
    id: str
    owner: str
    direction: PortDirection
    label: str | None = None
    synthesized: bool = False


@dataclass(frozen=True)
class Atom:
    id: str
    label: str = ""


@dataclass(frozen=True)
class Group:
    id: str
    label: str = ""
    kind: GroupKind = GroupKind.GENERIC
    children: tuple[str, ...] = ()
    in_ports: tuple[Port, ...] = ()
    out_ports: tuple[Port, ...] = ()
    definition_id: str | None = None

    def ports(self) -> tuple[Port, ...]:
        return self.in_ports + self.out_ports


@dataclass(frozen=True)
class Edge:
    """Directed edge between two endpoint ids (atom or port ids).

    ``arrow_at_source`` records that the rendered arrowhead belongs at the
    flow source rather than the flow target; ingestion sets it when it flips
    wires whose native convention points at a value's origin.  The owner
    hints name the box a dangling endpoint was declared against, so
    validation can attach a synthesized port to the right group.
    """

    id: str
    source: str
    target: str
    style: EdgeStyle = EdgeStyle.FLOW
    arrow_at_source: bool = False
    source_owner_hint: str | None = None
    target_owner_hint: str | None = None


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    subject: str | None = None
    fatal: bool = False

    def to_dict(self) -> dict[str, object]:
        return {
            "code": self.code,
            "message": self.message,
            "subject": self.subject,
            "fatal": self.fatal,
        }


class CompoundGraph:
    """Immutable compound graph with lookup tables built at construction."""

    def __init__(
        self,
        groups: tuple[Group, ...] = (),
        atoms: tuple[Atom, ...] = (),
        edges: tuple[Edge, ...] = (),
        roots: tuple[str, ...] | None = None,
    ) -> None:
        self.groups = tuple(groups)
        self.atoms = tuple(atoms)
        self.edges = tuple(edges)
        self.groups_by_id: dict[str, Group] = {g.id: g for g in self.groups}
        self.atoms_by_id: dict[str, Atom] = {a.id: a for a in self.atoms}
        self.edges_by_id: dict[str, Edge] = {e.id: e for e in self.edges}
        self.ports_by_id: dict[str, Port] = {}
        for g in self.groups:
            for p in g.ports():
                self.ports_by_id[p.id] = p
        self.parent_of: dict[str, str] = {}
        for g in self.groups:
            for child in g.children:
                # First declaration wins; validate() reports double parents.
                self.parent_of.setdefault(child, g.id)
        if roots is None:
            roots = tuple(g.id for g in self.groups if g.id not in self.parent_of)
        self.roots = tuple(roots)

    def top_level_ids(self) -> tuple[str, ...]:
        """Ids of all parentless elements, groups first, in declaration order."""
        out = [g.id for g in self.groups if g.id not in self.parent_of]
        out.extend(a.id for a in self.atoms if a.id not in self.parent_of)
        return tuple(out)

    def parent(self, element_id: str) -> str | None:
        return self.parent_of.get(element_id)

    def is_group(self, element_id: str) -> bool:
        return element_id in self.groups_by_id

    def ancestors(self, group_id: str) -> list[str]:
        out: list[str] = []
        cur = self.parent_of.get(group_id)
        seen = set()
        while cur is not None and cur not in seen:
            seen.add(cur)
            out.append(cur)
            cur = self.parent_of.get(cur)
        return out

    def with_groups(self, groups: tuple[Group, ...]) -> CompoundGraph:
        return CompoundGraph(groups, self.atoms, self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompoundGraph):
            return NotImplemented
        return (
            self.groups == other.groups
            and self.atoms == other.atoms
            and self.edges == other.edges
            and self.roots == other.roots
        )

    def __repr__(self) -> str:
        return (
            f"CompoundGraph(groups={len(self.groups)}, atoms={len(self.atoms)}, "
            f"edges={len(self.edges)})"
        )


@dataclass(frozen=True)
class ExpansionState:
    """Ancestor-closed set of expanded group ids."""

    expanded: frozenset[str] = frozenset()

    def __contains__(self, group_id: str) -> bool:
        return group_id in self.expanded


@dataclass(frozen=True)
class DuplicateDecision:
    duplicate: str
    representative: str


class DuplicateMode(str, enum.Enum):
    EXPAND_EACH = "each"
    SINGLE_EXPANSION = "single"


@dataclass(frozen=True)
class ExpansionPlan:
    """Expansion state after duplicate resolution, plus the dashed links."""

    expanded: frozenset[str] = frozenset()
    duplicate_links: tuple[DuplicateDecision, ...] = ()


@dataclass(frozen=True)
class ValidationResult:
    """Graph with synthesized repairs applied, plus every finding.

    The graph is returned (rather than mutated in place) because the model
    is immutable; for fatal structural findings the original graph comes
    back unrepaired.
    """

    graph: CompoundGraph
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def fatal(self) -> bool:
        return any(d.fatal for d in self.diagnostics)


def _structural_diagnostics(graph: CompoundGraph) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    seen: dict[str, str] = {}
    for kind, ids in (
        ("group", [g.id for g in graph.groups]),
        ("atom", [a.id for a in graph.atoms]),
        ("port", [p.id for g in graph.groups for p in g.ports()]),
        ("edge", [e.id for e in graph.edges]),
    ):
        for i in ids:
            if i in seen:
                diags.append(
                    Diagnostic(
                        "duplicate-id",
                        f"id {i!r} declared as both {seen[i]} and {kind}",
                        subject=i,
                        fatal=True,
                    )
                )
            else:
                seen[i] = kind

    claimed: dict[str, str] = {}
    for g in graph.groups:
        for child in g.children:
            if child in claimed and claimed[child] != g.id:
                diags.append(
                    Diagnostic(
                        "multiple-parents",
                        f"element {child!r} is a child of both {claimed[child]!r} and {g.id!r}",
                        subject=child,
                        fatal=True,
                    )
                )
            else:
                claimed[child] = g.id
            if child not in graph.groups_by_id and child not in graph.atoms_by_id:
                diags.append(
                    Diagnostic(
                        "unknown-child",
                        f"group {g.id!r} lists unknown child {child!r}",
                        subject=child,
                    )
                )

    # Cycle check over the containment relation between groups.
    state: dict[str, int] = {}

    def visit(gid: str) -> bool:
        if state.get(gid) == 1:
            return True
        if state.get(gid) == 2:
            return False
        state[gid] = 1
        group = graph.groups_by_id.get(gid)
        if group is not None:
            for child in group.children:
                if child in graph.groups_by_id and visit(child):
                    state[gid] = 2
                    return True
        state[gid] = 2
        return False

    for g in graph.groups:
        if g.id not in state and visit(g.id):
            diags.append(
                Diagnostic(
                    "hierarchy-cycle",
                    f"containment cycle through group {g.id!r}",
                    subject=g.id,
                    fatal=True,
                )
            )

    for g in graph.groups:
        in_ids = {p.id for p in g.in_ports}
        for p in g.out_ports:
            if p.id in in_ids:
                diags.append(
                    Diagnostic(
                        "duplicate-id",
                        f"port {p.id!r} listed as both in and out port of {g.id!r}",
                        subject=p.id,
                        fatal=True,
                    )
                )
        for p, expected in [(p, PortDirection.IN) for p in g.in_ports] + [
            (p, PortDirection.OUT) for p in g.out_ports
        ]:
            if p.direction is not expected:
                diags.append(
                    Diagnostic(
                        "port-direction",
                        f"port {p.id!r} direction {p.direction.value!r} does not match "
                        f"its declaring list on {g.id!r}",
                        subject=p.id,
                    )
                )
    return diags


def validate(graph: CompoundGraph) -> ValidationResult:
    """Check structure, then synthesize ports for dangling edge endpoints.

    Structural problems (containment cycles, duplicate ids, double parents)
    are fatal and leave the graph untouched.  An edge endpoint that resolves
    to nothing yields one diagnostic per occurrence and a synthesized port
    carrying the dangling id, attached to the hinted owner group when the
    edge supplies one, otherwise to a floating diagnostics group.  User data
    is never removed or rewritten.
    """
    diags = _structural_diagnostics(graph)
    if any(d.fatal for d in diags):
        return ValidationResult(graph, tuple(diags))

    synth: dict[str, tuple[str | None, PortDirection]] = {}
    for edge in graph.edges:
        for endpoint, hint, role in (
            (edge.source, edge.source_owner_hint, "source"),
            (edge.target, edge.target_owner_hint, "target"),
        ):
            if endpoint in graph.atoms_by_id or endpoint in graph.ports_by_id:
                continue
            if endpoint in graph.groups_by_id:
                diags.append(
                    Diagnostic(
                        "group-endpoint",
                        f"edge {edge.id!r} {role} names group {endpoint!r} directly; "
                        "attaching at the box boundary",
                        subject=endpoint,
                    )
                )
                continue
            direction = PortDirection.OUT if role == "source" else PortDirection.IN
            owner = hint if hint in graph.groups_by_id else None
            diags.append(
                Diagnostic(
                    "undefined-port",
                    f"edge {edge.id!r} {role} references undefined port {endpoint!r}",
                    subject=endpoint,
                )
            )
            if endpoint not in synth:
                synth[endpoint] = (owner, direction)

    if not synth:
        return ValidationResult(graph, tuple(diags))

    new_ports: dict[str, list[Port]] = {}
    floating: list[Port] = []
    for port_id, (owner, direction) in synth.items():
        if owner is None:
            floating.append(
                Port(port_id, DIAGNOSTIC_GROUP_ID, direction, synthesized=True)
            )
        else:
            new_ports.setdefault(owner, []).append(
                Port(port_id, owner, direction, synthesized=True)
            )

    groups = []
    for g in graph.groups:
        extra = new_ports.get(g.id)
        if extra:
            ins = g.in_ports + tuple(p for p in extra if p.direction is PortDirection.IN)
            outs = g.out_ports + tuple(p for p in extra if p.direction is PortDirection.OUT)
            groups.append(replace(g, in_ports=ins, out_ports=outs))
        else:
            groups.append(g)
    if floating:
        groups.append(
            Group(
                id=DIAGNOSTIC_GROUP_ID,
                label="diagnostics",
                kind=GroupKind.GENERIC,
                in_ports=tuple(p for p in floating if p.direction is PortDirection.IN),
                out_ports=tuple(p for p in floating if p.direction is PortDirection.OUT),
            )
        )
    repaired = CompoundGraph(tuple(groups), graph.atoms, graph.edges)
    return ValidationResult(repaired, tuple(diags))


def close_expansion(graph: CompoundGraph, requested: set[str] | frozenset[str]) -> ExpansionState:
    """Minimal ancestor-closed superset of the requested group ids."""
    closed: set[str] = set()
    for gid in requested:
        if gid not in graph.groups_by_id:
            raise ValueError(f"unknown group id: {gid!r}")
        closed.add(gid)
        closed.update(graph.ancestors(gid))
    return ExpansionState(frozenset(closed))


def resolve_duplicates(
    graph: CompoundGraph,
    state: ExpansionState,
    mode: DuplicateMode = DuplicateMode.EXPAND_EACH,
) -> ExpansionPlan:
    """Decide which duplicate siblings actually get their own detail frame.

    In single-expansion mode, sibling groups sharing a ``definition_id``
    where at least one member is expanded keep exactly one expanded
    representative (the lexicographically smallest id); the others are
    planned collapsed and linked to the representative with a dashed edge.
    Descendants of demoted duplicates leave the plan with them so the
    result stays ancestor-closed.
    """
    if mode is DuplicateMode.EXPAND_EACH:
        return ExpansionPlan(state.expanded, ())

    by_slot: dict[tuple[str | None, str], list[str]] = {}
    for g in graph.groups:
        if g.definition_id is None:
            continue
        by_slot.setdefault((graph.parent(g.id), g.definition_id), []).append(g.id)

    expanded = set(state.expanded)
    links: list[DuplicateDecision] = []
    for (_parent, _definition), members in sorted(by_slot.items(), key=lambda kv: kv[1]):
        if len(members) < 2 or not any(m in expanded for m in members):
            continue
        representative = min(members)
        for m in members:
            if m == representative:
                expanded.add(m)
                continue
            links.append(DuplicateDecision(duplicate=m, representative=representative))
            if m in expanded:
                expanded.discard(m)
        # Drop descendants of every demoted duplicate.
        demoted = {m for m in members if m != representative}
        for gid in list(expanded):
            if any(anc in demoted for anc in graph.ancestors(gid)):
                expanded.discard(gid)

    return ExpansionPlan(frozenset(expanded), tuple(links))
