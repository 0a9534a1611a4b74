"""Information filtering and hierarchy-preserving transforms.

Filters compute a VisibleSubgraph — sets of node and edge ids — without
touching the graph itself; every result satisfies endpoint closure
(a visible edge has both endpoints visible). Transforms produce new
layouts: rotation is restricted to the vertical axis so that an edge
pointing upward keeps doing so, and scaling moves node positions apart
rather than growing the scene, which is how a viewer switches between
global and local reading of the same structure.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError, ParseError
from .graph_model import TheoryGraph
from .layout_engine import Layout

__all__ = [
    "FilterSpec",
    "FocusSpec",
    "DistanceCutoff",
    "VisibleSubgraph",
    "filter_by_kinds",
    "reachable_subgraph",
    "neighborhood_subgraph",
    "distance_cutoff_filter",
    "apply_filter_spec",
    "intersect_visible",
    "rotate_about_vertical",
    "scale_positions",
]

FOCUS_MODES = ("reachable", "coreachable", "neighborhood")


@dataclass(frozen=True)
class FocusSpec:
    node: str
    mode: str  # one of FOCUS_MODES
    k: int = 1  # neighborhood radius; ignored by the reachability modes


@dataclass(frozen=True)
class DistanceCutoff:
    center: tuple[float, float, float]
    radius: float


@dataclass(frozen=True)
class FilterSpec:
    enabled_kinds: frozenset[str]
    focus: FocusSpec | None = None
    cutoff: DistanceCutoff | None = None

    def to_json_dict(self) -> dict:
        doc: dict = {"enabledKinds": sorted(self.enabled_kinds)}
        if self.focus is not None:
            doc["focus"] = {"node": self.focus.node, "mode": self.focus.mode,
                            "k": self.focus.k}
        if self.cutoff is not None:
            doc["cutoff"] = {"center": list(self.cutoff.center),
                             "radius": self.cutoff.radius}
        return doc


def filter_spec_from_json(doc: Mapping, graph: TheoryGraph) -> FilterSpec:
    """Decode the wire form, validating against the graph's registry."""
    if not isinstance(doc, Mapping):
        raise ParseError("filter spec must be a JSON object")
    if "enabledKinds" in doc:
        raw_kinds = doc["enabledKinds"]
        if not isinstance(raw_kinds, list) or not all(isinstance(k, str) for k in raw_kinds):
            raise InputError("enabledKinds must be a list of kind names")
        kinds = frozenset(raw_kinds)
    else:
        kinds = frozenset(graph.kinds)
    unknown = kinds - set(graph.kinds)
    if unknown:
        raise InputError(f"unknown edge kind {sorted(unknown)[0]!r}")

    focus = None
    if doc.get("focus") is not None:
        raw = doc["focus"]
        if not isinstance(raw, Mapping) or not isinstance(raw.get("node"), str):
            raise InputError("focus must be an object with a 'node' id")
        mode = raw.get("mode")
        if mode not in FOCUS_MODES:
            raise InputError(f"unknown focus mode {mode!r}")
        k = raw.get("k", 1)
        if isinstance(k, bool) or not isinstance(k, int) or k < 0:
            raise InputError(f"focus k must be an integer >= 0, got {k!r}")
        if not graph.has_node(raw["node"]):
            raise InputError(f"unknown node {raw['node']!r}")
        focus = FocusSpec(raw["node"], mode, k)

    cutoff = None
    if doc.get("cutoff") is not None:
        raw = doc["cutoff"]
        center = raw.get("center") if isinstance(raw, Mapping) else None
        radius = raw.get("radius") if isinstance(raw, Mapping) else None
        if (not isinstance(center, list) or len(center) != 3
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in center)):
            raise InputError("cutoff center must be [x, y, z]")
        if isinstance(radius, bool) or not isinstance(radius, (int, float)) or not radius > 0:
            raise InputError(f"cutoff radius must be > 0, got {radius!r}")
        cutoff = DistanceCutoff(tuple(float(v) for v in center), float(radius))

    return FilterSpec(kinds, focus, cutoff)


@dataclass(frozen=True)
class VisibleSubgraph:
    visible_nodes: frozenset[str]
    visible_edges: frozenset[str]

    def to_json_dict(self) -> dict:
        return {"visibleNodes": sorted(self.visible_nodes),
                "visibleEdges": sorted(self.visible_edges)}


def _check_kinds(graph: TheoryGraph, kinds: Iterable[str] | None) -> frozenset[str]:
    if kinds is None:
        return frozenset(graph.kinds)
    kinds = frozenset(kinds)
    unknown = kinds - set(graph.kinds)
    if unknown:
        raise InputError(f"unknown edge kind {sorted(unknown)[0]!r}")
    return kinds


def _check_node(graph: TheoryGraph, node_id: str):
    if not graph.has_node(node_id):
        raise InputError(f"unknown node {node_id!r}")


def filter_by_kinds(graph: TheoryGraph, enabled: Iterable[str]) -> VisibleSubgraph:
    """Hide edges whose kind is disabled; nodes all stay visible."""
    enabled = _check_kinds(graph, enabled)
    edges = frozenset(e.id for e in graph.edges if e.kind in enabled)
    return VisibleSubgraph(frozenset(n.id for n in graph.nodes), edges)


def reachable_subgraph(graph: TheoryGraph, start: str, reversed: bool = False,
                       kinds: Iterable[str] | None = None) -> VisibleSubgraph:
    """Everything on directed paths out of ``start``.

    With reversed=True edges are traversed target-to-source, which yields
    the "opposite" subgraph: everything that can reach the start node.
    Only edges of the given kinds participate; an edge is visible when
    its traversal origin is reachable.
    """
    kinds = _check_kinds(graph, kinds)
    _check_node(graph, start)

    adjacency: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    for e in graph.edges:
        if e.kind in kinds:
            if reversed:
                adjacency[e.target].append(e.source)
            else:
                adjacency[e.source].append(e.target)

    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for succ in adjacency[current]:
            if succ not in seen:
                seen.add(succ)
                queue.append(succ)

    edges = frozenset(
        e.id for e in graph.edges
        if e.kind in kinds and (e.target if reversed else e.source) in seen)
    return VisibleSubgraph(frozenset(seen), edges)


def neighborhood_subgraph(graph: TheoryGraph, centers: Iterable[str], k: int,
                          kinds: Iterable[str] | None = None) -> VisibleSubgraph:
    """Nodes within undirected hop distance k of any center, and the
    enabled-kind edges among them."""
    kinds = _check_kinds(graph, kinds)
    centers = list(centers)
    if not centers:
        raise InputError("neighborhood requires at least one center node")
    if k < 0:
        raise InputError(f"neighborhood radius must be >= 0, got {k}")
    for c in centers:
        _check_node(graph, c)

    adjacency: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    for e in graph.edges:
        if e.kind in kinds:
            adjacency[e.source].append(e.target)
            adjacency[e.target].append(e.source)

    dist = {c: 0 for c in centers}
    queue = deque(dict.fromkeys(centers))  # de-dup, keep order
    while queue:
        current = queue.popleft()
        if dist[current] == k:
            continue
        for neighbor in adjacency[current]:
            if neighbor not in dist:
                dist[neighbor] = dist[current] + 1
                queue.append(neighbor)

    nodes = frozenset(dist)
    edges = frozenset(e.id for e in graph.edges
                      if e.kind in kinds and e.source in nodes and e.target in nodes)
    return VisibleSubgraph(nodes, edges)


def distance_cutoff_filter(graph: TheoryGraph, layout: Layout, center,
                           radius: float) -> VisibleSubgraph:
    """Keep nodes within ``radius`` of ``center`` in layout space."""
    if not (radius > 0 and math.isfinite(radius)):
        raise InputError(f"radius must be positive and finite, got {radius}")
    c = np.asarray(center, dtype=np.float64).reshape(3)
    nodes = set()
    for node in graph.nodes:
        try:
            p = layout.positions[node.id]
        except KeyError:
            raise InputError(f"layout has no position for node {node.id!r}") from None
        if float(np.linalg.norm(p - c)) <= radius:
            nodes.add(node.id)
    edges = frozenset(e.id for e in graph.edges
                      if e.source in nodes and e.target in nodes)
    return VisibleSubgraph(frozenset(nodes), edges)


def intersect_visible(graph: TheoryGraph, first: VisibleSubgraph,
                      *rest: VisibleSubgraph) -> VisibleSubgraph:
    """Intersection of visibility sets, re-closed over edge endpoints."""
    nodes = set(first.visible_nodes)
    edges = set(first.visible_edges)
    for sub in rest:
        nodes &= sub.visible_nodes
        edges &= sub.visible_edges
    edges = frozenset(eid for eid in edges
                      if graph.edge(eid).source in nodes
                      and graph.edge(eid).target in nodes)
    return VisibleSubgraph(frozenset(nodes), edges)


def apply_filter_spec(graph: TheoryGraph, spec: FilterSpec,
                      layout: Layout | None = None) -> VisibleSubgraph:
    """Intersect the filter's components: kind toggle, focus, distance cutoff."""
    parts = [filter_by_kinds(graph, spec.enabled_kinds)]

    if spec.focus is not None:
        f = spec.focus
        if f.mode == "reachable":
            parts.append(reachable_subgraph(graph, f.node, False, spec.enabled_kinds))
        elif f.mode == "coreachable":
            parts.append(reachable_subgraph(graph, f.node, True, spec.enabled_kinds))
        elif f.mode == "neighborhood":
            parts.append(neighborhood_subgraph(graph, [f.node], f.k, spec.enabled_kinds))
        else:
            raise InputError(f"unknown focus mode {f.mode!r}")

    if spec.cutoff is not None:
        if layout is None:
            raise InputError("distance cutoff requires a layout")
        parts.append(distance_cutoff_filter(graph, layout, spec.cutoff.center,
                                            spec.cutoff.radius))

    return intersect_visible(graph, *parts)


def subgraph(graph: TheoryGraph, visible: VisibleSubgraph) -> TheoryGraph:
    """Materialize a VisibleSubgraph as a standalone graph (full kind
    registry retained so styling survives round-trips)."""
    return TheoryGraph(
        (n for n in graph.nodes if n.id in visible.visible_nodes),
        (e for e in graph.edges if e.id in visible.visible_edges),
        graph.kinds.values(),
    )


# ---------------------------------------------------------------------------
# Geometric transforms


def rotate_about_vertical(layout: Layout, angle: float) -> Layout:
    """Rotate every position about the y axis (right-handed, y up):

        (x, y, z) -> (x cos a + z sin a, y, -x sin a + z cos a)

    y coordinates pass through untouched, so vertical orderings — the
    hierarchy reading — are preserved exactly.
    """
    if not math.isfinite(angle):
        raise InputError(f"angle must be finite, got {angle}")
    cos_a = math.cos(angle)
    sin_a = math.sin(angle)
    positions = {}
    for node_id, p in layout.positions.items():
        x, y, z = p[0], p[1], p[2]
        positions[node_id] = np.array([x * cos_a + z * sin_a, y,
                                       -x * sin_a + z * cos_a])
    return Layout(positions, layout.iterations_run, layout.converged,
                  layout.final_max_displacement)


def scale_positions(layout: Layout, factor: float, pivot) -> Layout:
    """Scale node positions about a pivot: p -> pivot + factor * (p - pivot).

    Pairwise distances multiply by exactly ``factor``; with factor > 0
    the vertical ordering of any two nodes is unchanged.
    """
    if not (factor > 0 and math.isfinite(factor)):
        raise InputError(f"scale factor must be positive and finite, got {factor}")
    pivot = np.asarray(pivot, dtype=np.float64).reshape(3)
    positions = {node_id: pivot + factor * (p - pivot)
                 for node_id, p in layout.positions.items()}
    return Layout(positions, layout.iterations_run, layout.converged,
                  layout.final_max_displacement)


def parse_filter_spec(data, graph: TheoryGraph) -> FilterSpec:
    """Parse the JSON wire form of a filter spec."""
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    return filter_spec_from_json(doc, graph)
