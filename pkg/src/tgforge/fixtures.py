"""Synthetic graph generators and the bundled large fixture.

Real theory-graph exports are not redistributable here, so the package
ships a generated stand-in at the scale of a large proof library:
exactly 739 nodes and 2851 edges (2424 imports forming a DAG plus 427
views that may point anywhere). Generation is seeded with the portable
generator, so the bundled JSON can be regenerated byte-identically.
"""

from __future__ import annotations

from importlib import resources

from .graph_model import GraphEdge, GraphNode, TheoryGraph, default_kind
from .rng import SplitMix64

__all__ = ["random_dag", "synthetic_library_graph", "bundled_fixture_path",
           "LIBRARY_NODES", "LIBRARY_EDGES"]

LIBRARY_NODES = 739
LIBRARY_EDGES = 2851
_LIBRARY_SEED = 0x7E0_739


def _node(i: int, width: int) -> GraphNode:
    name = f"th{i:0{width}d}"
    return GraphNode(
        id=name,
        label=f"Theory {i}",
        uri=f"http://example.org/library?{name}",
        details_url=f"https://example.org/library/{name}.html",
    )


def random_dag(n_nodes: int, n_edges: int, seed: int) -> TheoryGraph:
    """Random import-only DAG: distinct pairs (u, v) with u < v by index.

    Acyclic by construction. Raises if more distinct pairs are requested
    than exist.
    """
    if n_edges > n_nodes * (n_nodes - 1) // 2:
        raise ValueError("too many edges for a simple DAG")
    rng = SplitMix64(seed)
    width = len(str(max(n_nodes - 1, 1)))
    nodes = [_node(i, width) for i in range(n_nodes)]

    chosen: set[tuple[int, int]] = set()
    edges: list[GraphEdge] = []
    while len(edges) < n_edges:
        v = 1 + rng.next_below(n_nodes - 1)
        u = rng.next_below(v)
        if (u, v) in chosen:
            continue
        chosen.add((u, v))
        i = len(edges)
        edges.append(GraphEdge(
            id=f"e{i}", source=nodes[u].id, target=nodes[v].id, kind="import",
            uri=f"http://example.org/library?{nodes[u].id}?{nodes[v].id}"))
    return TheoryGraph(nodes, edges, [default_kind("import")])


def synthetic_library_graph(n_nodes: int = LIBRARY_NODES,
                            n_edges: int = LIBRARY_EDGES,
                            import_share: float = 0.85,
                            seed: int = _LIBRARY_SEED) -> TheoryGraph:
    """Library-shaped graph: an import DAG backbone plus cross-cutting views."""
    n_imports = round(n_edges * import_share)
    n_views = n_edges - n_imports
    rng = SplitMix64(seed)
    width = len(str(max(n_nodes - 1, 1)))
    nodes = [_node(i, width) for i in range(n_nodes)]

    chosen: set[tuple[int, int, str]] = set()
    edges: list[GraphEdge] = []

    def add(u: int, v: int, kind: str):
        i = len(edges)
        edges.append(GraphEdge(
            id=f"e{i}", source=nodes[u].id, target=nodes[v].id, kind=kind,
            uri=f"http://example.org/library?{nodes[u].id}?{nodes[v].id}?{kind}"))

    while len(edges) < n_imports:
        v = 1 + rng.next_below(n_nodes - 1)
        u = rng.next_below(v)
        if (u, v, "import") in chosen:
            continue
        chosen.add((u, v, "import"))
        add(u, v, "import")

    while len(edges) < n_imports + n_views:
        u = rng.next_below(n_nodes)
        v = rng.next_below(n_nodes)
        if u == v or (u, v, "view") in chosen:
            continue
        chosen.add((u, v, "view"))
        add(u, v, "view")

    return TheoryGraph(nodes, edges, [default_kind("import"), default_kind("view")])


def bundled_fixture_path():
    """Path to the shipped 739-node / 2851-edge graph document."""
    return resources.files("tgforge").joinpath("data/synthetic739.json")
