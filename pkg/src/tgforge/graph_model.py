"""Theory-graph data model, file ingestion and validation.

A theory graph is a set of uniquely identified nodes joined by typed
directed edges; both carry an MMT URI used purely as an opaque label.
Edge kinds form an open registry: "import" edges are the hierarchical
backbone and are expected to be acyclic, "view" edges (and anything
unrecognised) are free to form cycles and long-range links.

Graph files are UTF-8 JSON:

    {
      "kinds":  [ {"name": str, "color": [r,g,b],
                   "hierarchyWeight": num?, "attractionWeight": num?} ... ],
      "nodes":  [ {"id": str, "label": str, "uri": str, "detailsUrl": str?} ... ],
      "edges":  [ {"id": str, "from": str, "to": str, "kind": str, "uri": str} ... ]
    }

The "kinds" section is optional; unknown keys anywhere are ignored.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import IntegrityError, ParseError

__all__ = [
    "GraphNode",
    "EdgeKind",
    "GraphEdge",
    "TheoryGraph",
    "Finding",
    "ValidationReport",
    "default_kind",
    "parse_graph",
    "serialize_graph",
    "validate",
    "structurally_equal",
]


# Styling defaults for well-known morphism kinds; anything else gets a
# palette color hashed from its name so reloads stay stable.
IMPORT_COLOR = (64, 64, 255)
VIEW_COLOR = (255, 140, 0)

_PALETTE = (
    (46, 204, 113),
    (155, 89, 182),
    (241, 196, 15),
    (26, 188, 156),
    (231, 76, 60),
    (52, 152, 219),
    (230, 126, 34),
    (149, 165, 166),
)


def _palette_color(name: str) -> tuple[int, int, int]:
    # FNV-1a over the UTF-8 bytes; Python's built-in hash is salted per
    # process and would break cross-run stability.
    h = 0xCBF29CE484222325
    for b in name.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return _PALETTE[h % len(_PALETTE)]


@dataclass(frozen=True)
class GraphNode:
    id: str
    label: str
    uri: str
    details_url: str | None = None


@dataclass(frozen=True)
class EdgeKind:
    name: str
    color: tuple[int, int, int]
    hierarchy_weight: float = 0.0
    attraction_weight: float = 1.0
    counts_for_hierarchy_validation: bool = False

    def __post_init__(self):
        for w, label in ((self.hierarchy_weight, "hierarchyWeight"),
                         (self.attraction_weight, "attractionWeight")):
            if not math.isfinite(w) or w < 0:
                raise IntegrityError(
                    f"kind {self.name!r}: {label} must be finite and >= 0, got {w}",
                    code="bad-weight", offending_id=self.name)


@dataclass(frozen=True)
class GraphEdge:
    id: str
    source: str
    target: str
    kind: str
    uri: str


def default_kind(name: str) -> EdgeKind:
    """Registry entry used when a graph mentions a kind it never declares.

    Imports carry the hierarchy (weight 1, acyclicity-checked); views and
    unknown morphism kinds attract but do not bias the vertical axis.
    """
    if name == "import":
        return EdgeKind(name, IMPORT_COLOR, hierarchy_weight=1.0,
                        attraction_weight=1.0, counts_for_hierarchy_validation=True)
    if name == "view":
        return EdgeKind(name, VIEW_COLOR, hierarchy_weight=0.0, attraction_weight=1.0)
    return EdgeKind(name, _palette_color(name), hierarchy_weight=0.0, attraction_weight=1.0)


class TheoryGraph:
    """Immutable node/edge/kind container with id-based lookups."""

    def __init__(self, nodes: Iterable[GraphNode], edges: Iterable[GraphEdge],
                 kinds: Iterable[EdgeKind] = (), *, allow_self_loops: bool = False):
        self.nodes: tuple[GraphNode, ...] = tuple(nodes)
        self.edges: tuple[GraphEdge, ...] = tuple(edges)

        self._node_index: dict[str, int] = {}
        for i, node in enumerate(self.nodes):
            if not node.id:
                raise IntegrityError("node with empty id", code="empty-id")
            if not node.uri:
                raise IntegrityError(f"node {node.id!r} has an empty uri",
                                     code="empty-uri", offending_id=node.id)
            if node.id in self._node_index:
                raise IntegrityError(f"duplicate node id {node.id!r}",
                                     code="duplicate-node", offending_id=node.id)
            self._node_index[node.id] = i

        registry: dict[str, EdgeKind] = {}
        for kind in kinds:
            if kind.name in registry:
                raise IntegrityError(f"duplicate kind {kind.name!r}",
                                     code="duplicate-kind", offending_id=kind.name)
            registry[kind.name] = kind

        self._edge_index: dict[str, int] = {}
        for i, edge in enumerate(self.edges):
            if edge.id in self._edge_index:
                raise IntegrityError(f"duplicate edge id {edge.id!r}",
                                     code="duplicate-edge", offending_id=edge.id)
            for endpoint in (edge.source, edge.target):
                if endpoint not in self._node_index:
                    raise IntegrityError(
                        f"edge {edge.id!r} references missing node {endpoint!r}",
                        code="missing-node", offending_id=edge.id)
            if edge.source == edge.target and not allow_self_loops:
                raise IntegrityError(
                    f"edge {edge.id!r} is a self-loop on {edge.source!r}",
                    code="self-loop", offending_id=edge.id)
            if edge.kind not in registry:
                registry[edge.kind] = default_kind(edge.kind)
            self._edge_index[edge.id] = i

        self.kinds: Mapping[str, EdgeKind] = registry

    def node(self, node_id: str) -> GraphNode:
        return self.nodes[self._node_index[node_id]]

    def edge(self, edge_id: str) -> GraphEdge:
        return self.edges[self._edge_index[edge_id]]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._node_index

    def node_index(self, node_id: str) -> int:
        return self._node_index[node_id]

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    def __repr__(self):
        return (f"TheoryGraph(|V|={len(self.nodes)}, |E|={len(self.edges)}, "
                f"kinds={sorted(self.kinds)})")


@dataclass(frozen=True)
class Finding:
    code: str
    message: str
    offending_id: str | None = None


@dataclass
class ValidationReport:
    errors: list[Finding] = field(default_factory=list)
    warnings: list[Finding] = field(default_factory=list)
    import_dag_ok: bool = True
    cycle_witness: list[str] | None = None

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_json_dict(self) -> dict:
        return {
            "errors": [{"code": f.code, "message": f.message, "id": f.offending_id}
                       for f in self.errors],
            "warnings": [{"code": f.code, "message": f.message, "id": f.offending_id}
                         for f in self.warnings],
            "importDagOk": self.import_dag_ok,
            "cycleWitness": self.cycle_witness,
        }


# ---------------------------------------------------------------------------
# Parsing


def _require(mapping: dict, key: str, expected, where: str):
    if key not in mapping:
        raise ParseError(f"{where}: missing required field {key!r}")
    value = mapping[key]
    if not isinstance(value, expected):
        raise ParseError(f"{where}: field {key!r} has wrong type "
                         f"({type(value).__name__})")
    return value


def _finite(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise ParseError(f"{where}: number must be finite, got {value}")
    return value


def _parse_color(raw, where: str) -> tuple[int, int, int]:
    if (not isinstance(raw, list) or len(raw) != 3
            or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in raw)):
        raise ParseError(f"{where}: color must be an [r,g,b] triple")
    channels = tuple(int(c) for c in raw)
    if any(c < 0 or c > 255 for c in channels):
        raise ParseError(f"{where}: color channels must lie in [0,255]")
    return channels  # type: ignore[return-value]


def parse_graph(data, *, allow_self_loops: bool = False) -> TheoryGraph:
    """Parse a graph document from bytes, text or a readable stream.

    Unknown JSON keys are ignored. Edge kinds used by edges but absent
    from the "kinds" section are auto-registered with default weights and
    colors. Referential problems (dangling endpoints, duplicate ids)
    raise IntegrityError naming the offending id; malformed JSON raises
    ParseError with line/column.
    """
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"graph file is not valid UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level of a graph document must be an object")

    kinds: list[EdgeKind] = []
    for i, raw in enumerate(doc.get("kinds") or []):
        where = f"kinds[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: expected an object")
        name = _require(raw, "name", str, where)
        base = default_kind(name)
        color = _parse_color(raw["color"], where) if "color" in raw else base.color
        hier = (_finite(raw["hierarchyWeight"], where)
                if "hierarchyWeight" in raw else base.hierarchy_weight)
        attr = (_finite(raw["attractionWeight"], where)
                if "attractionWeight" in raw else base.attraction_weight)
        # Acyclicity checking follows the hierarchy: any kind that pushes
        # edges upward is expected to form a DAG.
        kinds.append(EdgeKind(name, color, hierarchy_weight=hier,
                              attraction_weight=attr,
                              counts_for_hierarchy_validation=hier > 0))

    nodes: list[GraphNode] = []
    for i, raw in enumerate(doc.get("nodes") or []):
        where = f"nodes[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: expected an object")
        details = raw.get("detailsUrl")
        if details is not None and not isinstance(details, str):
            raise ParseError(f"{where}: detailsUrl must be a string")
        nodes.append(GraphNode(
            id=_require(raw, "id", str, where),
            label=_require(raw, "label", str, where),
            uri=_require(raw, "uri", str, where),
            details_url=details,
        ))

    edges: list[GraphEdge] = []
    for i, raw in enumerate(doc.get("edges") or []):
        where = f"edges[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: expected an object")
        edges.append(GraphEdge(
            id=_require(raw, "id", str, where),
            source=_require(raw, "from", str, where),
            target=_require(raw, "to", str, where),
            kind=_require(raw, "kind", str, where),
            uri=_require(raw, "uri", str, where),
        ))

    return TheoryGraph(nodes, edges, kinds, allow_self_loops=allow_self_loops)


def serialize_graph(graph: TheoryGraph) -> bytes:
    """Canonical UTF-8 document: kinds sorted by name, nodes and edges by id.

    Round-trips: parse_graph(serialize_graph(g)) is structurally equal to g.
    """
    doc = {
        "kinds": [
            {
                "name": k.name,
                "color": list(k.color),
                "hierarchyWeight": k.hierarchy_weight,
                "attractionWeight": k.attraction_weight,
            }
            for k in sorted(graph.kinds.values(), key=lambda k: k.name)
        ],
        "nodes": [
            {
                "id": n.id,
                "label": n.label,
                "uri": n.uri,
                **({"detailsUrl": n.details_url} if n.details_url is not None else {}),
            }
            for n in sorted(graph.nodes, key=lambda n: n.id)
        ],
        "edges": [
            {"id": e.id, "from": e.source, "to": e.target, "kind": e.kind, "uri": e.uri}
            for e in sorted(graph.edges, key=lambda e: e.id)
        ],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def structurally_equal(a: TheoryGraph, b: TheoryGraph) -> bool:
    """Field-level equality ignoring declaration order."""
    return (set(a.nodes) == set(b.nodes)
            and set(a.edges) == set(b.edges)
            and dict(a.kinds) == dict(b.kinds))


# ---------------------------------------------------------------------------
# Validation


def _hierarchy_cycle(graph: TheoryGraph) -> list[str] | None:
    """Find a directed cycle in the acyclicity-checked subgraph.

    Returns the cycle as a node-id sequence whose first and last entries
    coincide, or None if that subgraph is a DAG. Iterative three-color
    DFS; nodes and adjacency follow declaration order so reports are
    reproducible.
    """
    checked = {name for name, k in graph.kinds.items()
               if k.counts_for_hierarchy_validation}
    adjacency: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    for edge in graph.edges:
        if edge.kind in checked:
            adjacency[edge.source].append(edge.target)

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n.id: WHITE for n in graph.nodes}
    for root in adjacency:
        if color[root] != WHITE:
            continue
        path = [root]
        iterators = [iter(adjacency[root])]
        color[root] = GRAY
        while path:
            try:
                succ = next(iterators[-1])
            except StopIteration:
                color[path.pop()] = BLACK
                iterators.pop()
                continue
            if color[succ] == GRAY:
                start = path.index(succ)
                return path[start:] + [succ]
            if color[succ] == WHITE:
                color[succ] = GRAY
                path.append(succ)
                iterators.append(iter(adjacency[succ]))
    return None


def validate(graph: TheoryGraph) -> ValidationReport:
    """Check the hierarchy-bearing subgraph for directed cycles.

    A cyclic import subgraph is reported as a warning, never an error:
    the layout is force-based and handles cycles, so imperfect exports
    stay explorable. The graph is never mutated.
    """
    report = ValidationReport()
    witness = _hierarchy_cycle(graph)
    if witness is not None:
        report.import_dag_ok = False
        report.cycle_witness = witness
        report.warnings.append(Finding(
            code="import-cycle",
            message="hierarchy-checked edges form a directed cycle: "
                    + " -> ".join(witness),
            offending_id=witness[0],
        ))
    return report
