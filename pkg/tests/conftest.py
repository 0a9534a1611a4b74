import json

import pytest

from tgforge.graph_model import parse_graph


def graph_doc(nodes, edges, kinds=None):
    """Build a graph document dict from terse tuples."""
    doc = {
        "nodes": [{"id": n, "label": n.upper(), "uri": f"u:{n}"} for n in nodes],
        "edges": [{"id": eid, "from": s, "to": t, "kind": kind, "uri": f"u:{eid}"}
                  for eid, s, t, kind in edges],
    }
    if kinds is not None:
        doc["kinds"] = kinds
    return doc


def make_graph(nodes, edges, kinds=None):
    return parse_graph(json.dumps(graph_doc(nodes, edges, kinds)))


@pytest.fixture
def chain_graph():
    """a -> b -> c, imports only."""
    return make_graph("abc", [("e1", "a", "b", "import"),
                              ("e2", "b", "c", "import")])


@pytest.fixture
def mixed_graph():
    """Three imports and two views over five nodes."""
    return make_graph("abcde", [
        ("i1", "a", "b", "import"),
        ("i2", "b", "c", "import"),
        ("i3", "c", "d", "import"),
        ("v1", "d", "a", "view"),
        ("v2", "e", "c", "view"),
    ])


@pytest.fixture
def star_graph():
    """Center c with five leaves."""
    edges = [(f"s{i}", "c", f"l{i}", "import") for i in range(5)]
    return make_graph(["c"] + [f"l{i}" for i in range(5)], edges)


@pytest.fixture
def import_cycle_graph():
    """a -> b -> a imports: cyclic hierarchy subgraph."""
    return make_graph("ab", [("e1", "a", "b", "import"),
                             ("e2", "b", "a", "import")])
