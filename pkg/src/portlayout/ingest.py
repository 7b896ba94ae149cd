"""Parsers for the two supported input formats.

``.cg.json`` is the generic compound-graph schema: flat lists of groups,
atoms and edges, with containment expressed through ``children`` id lists.

``.fn.json`` is a small box/port/wire dialect for dataflow networks extracted
from programs.  Boxes nest directly, carry typed kinds and in/out ports, and
wires connect ports.  Wires natively point at the side a value comes from, so
by default ingestion flips them for top-to-bottom flow and marks the edge so
rendering puts the arrowhead back on the value's origin.  Wire endpoints may
name a port that was never declared; such references survive ingestion and
are later materialised by validation as synthesized (red) ports.
"""

from __future__ import annotations

import json
from typing import Any

from .model import (
    Atom,
    CompoundGraph,
    Edge,
    Group,
    GroupKind,
    Port,
    PortDirection,
)


class ParseError(ValueError):
    """Input text or structure could not be interpreted."""


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def _require(obj: dict[str, Any], key: str, path: str) -> Any:
    if key not in obj:
        raise ParseError(f"missing required field {path}.{key}")
    return obj[key]


def _kind(value: str | None, path: str) -> GroupKind:
    if value is None:
        return GroupKind.GENERIC
    try:
        return GroupKind(value.lower())
    except ValueError:
        raise ParseError(f"unknown kind {value!r} at {path}") from None


def _ports(
    items: list[Any] | None, owner: str, direction: PortDirection, path: str
) -> tuple[Port, ...]:
    out: list[Port] = []
    for i, item in enumerate(items or []):
        if isinstance(item, str):
            out.append(Port(item, owner, direction))
            continue
        pid = _require(item, "id", f"{path}[{i}]")
        out.append(
            Port(
                str(pid),
                owner,
                direction,
                label=item.get("label") or item.get("name"),
                synthesized=bool(item.get("synthesized", False)),
            )
        )
    return tuple(out)


def parse_generic(text: str) -> CompoundGraph:
    """Parse the generic compound-graph JSON schema.

    Unknown fields are ignored; ids are preserved verbatim.
    """
    data = _load_json(text)
    if not isinstance(data, dict):
        raise ParseError("top-level value must be an object")

    groups: list[Group] = []
    for i, g in enumerate(data.get("groups", [])):
        gid = str(_require(g, "id", f"groups[{i}]"))
        groups.append(
            Group(
                id=gid,
                label=str(g.get("label", "")),
                kind=_kind(g.get("kind"), f"groups[{i}].kind"),
                children=tuple(str(c) for c in g.get("children", [])),
                in_ports=_ports(g.get("in_ports"), gid, PortDirection.IN, f"groups[{i}].in_ports"),
                out_ports=_ports(g.get("out_ports"), gid, PortDirection.OUT, f"groups[{i}].out_ports"),
                definition_id=g.get("definition_id"),
            )
        )

    atoms = tuple(
        Atom(str(_require(a, "id", f"atoms[{i}]")), str(a.get("label", "")))
        for i, a in enumerate(data.get("atoms", []))
    )

    edges = []
    for i, e in enumerate(data.get("edges", [])):
        edges.append(
            Edge(
                id=str(e.get("id", f"e{i}")),
                source=str(_require(e, "source", f"edges[{i}]")),
                target=str(_require(e, "target", f"edges[{i}]")),
            )
        )

    roots = tuple(str(r) for r in data["roots"]) if "roots" in data else None
    return CompoundGraph(tuple(groups), atoms, tuple(edges), roots)


def emit_generic(graph: CompoundGraph) -> str:
    """Serialize a graph back to the generic schema (inverse of parse_generic)."""

    def port_dict(p: Port) -> dict[str, Any]:
        out: dict[str, Any] = {"id": p.id}
        if p.label is not None:
            out["label"] = p.label
        if p.synthesized:
            out["synthesized"] = True
        return out

    data: dict[str, Any] = {
        "groups": [
            {
                "id": g.id,
                "label": g.label,
                "kind": g.kind.value,
                "children": list(g.children),
                "in_ports": [port_dict(p) for p in g.in_ports],
                "out_ports": [port_dict(p) for p in g.out_ports],
                **({"definition_id": g.definition_id} if g.definition_id else {}),
            }
            for g in graph.groups
        ],
        "atoms": [{"id": a.id, "label": a.label} for a in graph.atoms],
        "edges": [
            {"id": e.id, "source": e.source, "target": e.target} for e in graph.edges
        ],
        "roots": list(graph.roots),
    }
    return json.dumps(data, indent=2, sort_keys=True)


def _wire_end(value: Any, path: str) -> tuple[str, str | None]:
    """A wire endpoint: either a plain port id or a {box, port} reference."""
    if isinstance(value, str):
        return value, None
    if isinstance(value, dict):
        port = str(_require(value, "port", path))
        box = value.get("box")
        return port, (str(box) if box is not None else None)
    raise ParseError(f"wire endpoint at {path} must be a string or object")


def parse_function_network(text: str, *, reverse_arrows: bool = True) -> CompoundGraph:
    """Parse the function-network JSON subset into a compound graph.

    Boxes become groups (kind taken from the box ``type``), wires become
    edges.  Wires point at a value's source; with ``reverse_arrows`` (the
    default) each edge is flipped so flow runs producer-to-consumer for
    top-to-bottom layout, and the edge is marked ``arrow_at_source`` so the
    rendered arrowhead still points at the value's origin.
    """
    data = _load_json(text)
    if not isinstance(data, dict):
        raise ParseError("top-level value must be an object")

    groups: list[Group] = []
    atoms: list[Atom] = []

    def walk(box: dict[str, Any], path: str) -> str:
        bid = str(_require(box, "id", path))
        children: list[str] = []
        for i, sub in enumerate(box.get("boxes", [])):
            children.append(walk(sub, f"{path}.boxes[{i}]"))
        for i, a in enumerate(box.get("atoms", [])):
            aid = str(_require(a, "id", f"{path}.atoms[{i}]"))
            atoms.append(Atom(aid, str(a.get("name", a.get("label", "")))))
            children.append(aid)
        groups.append(
            Group(
                id=bid,
                label=str(box.get("name", box.get("label", ""))),
                kind=_kind(box.get("type"), f"{path}.type"),
                children=tuple(children),
                in_ports=_ports(box.get("in_ports"), bid, PortDirection.IN, f"{path}.in_ports"),
                out_ports=_ports(box.get("out_ports"), bid, PortDirection.OUT, f"{path}.out_ports"),
                definition_id=box.get("definition"),
            )
        )
        return bid

    for i, box in enumerate(data.get("boxes", [])):
        walk(box, f"boxes[{i}]")

    edges: list[Edge] = []
    for i, wire in enumerate(data.get("wires", [])):
        wid = str(wire.get("id", f"w{i}"))
        src, src_box = _wire_end(_require(wire, "src", f"wires[{i}]"), f"wires[{i}].src")
        tgt, tgt_box = _wire_end(_require(wire, "tgt", f"wires[{i}]"), f"wires[{i}].tgt")
        if reverse_arrows:
            # The wire points at the value's source: tgt produces, src consumes.
            edges.append(
                Edge(
                    id=wid,
                    source=tgt,
                    target=src,
                    arrow_at_source=True,
                    source_owner_hint=tgt_box,
                    target_owner_hint=src_box,
                )
            )
        else:
            edges.append(
                Edge(
                    id=wid,
                    source=src,
                    target=tgt,
                    source_owner_hint=src_box,
                    target_owner_hint=tgt_box,
                )
            )

    return CompoundGraph(tuple(groups), tuple(atoms), tuple(edges))
