import json
import math

import numpy as np
import pytest

from tgforge.errors import InputError
from tgforge.fixtures import synthetic_library_graph
from tgforge.graph_model import GraphEdge, TheoryGraph, parse_graph
from tgforge.graph_ops import (
    DistanceCutoff,
    FilterSpec,
    FocusSpec,
    apply_filter_spec,
    distance_cutoff_filter,
    filter_by_kinds,
    neighborhood_subgraph,
    parse_filter_spec,
    reachable_subgraph,
    rotate_about_vertical,
    scale_positions,
    subgraph,
)
from tgforge.layout_engine import Layout, layout_metrics

from conftest import make_graph
from oracles import bfs_hops, bfs_reachable


def random_layout(graph, seed, scale=5.0):
    rng = np.random.default_rng(seed)
    return Layout({n.id: rng.uniform(-scale, scale, 3) for n in graph.nodes})


def random_digraph(seed, max_nodes=200):
    """Mixed-kind random digraph for oracle comparisons."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_nodes + 1))
    m = int(rng.integers(1, max(2, 3 * n)))
    nodes = [f"n{i}" for i in range(n)]
    edges = []
    for j in range(m):
        s, t = rng.integers(0, n, size=2)
        if s == t:
            continue
        kind = "import" if rng.random() < 0.7 else "view"
        edges.append((f"e{j}", nodes[s], nodes[t], kind))
    return make_graph(nodes, edges)


def assert_closed(graph, visible):
    for eid in visible.visible_edges:
        e = graph.edge(eid)
        assert e.source in visible.visible_nodes
        assert e.target in visible.visible_nodes


# ---------------------------------------------------------------------------
# Kind filtering


def test_all_kinds_enabled_is_identity(mixed_graph):
    vis = filter_by_kinds(mixed_graph, mixed_graph.kinds)
    assert vis.visible_nodes == {n.id for n in mixed_graph.nodes}
    assert vis.visible_edges == {e.id for e in mixed_graph.edges}


def test_no_kinds_enabled_keeps_nodes(mixed_graph):
    vis = filter_by_kinds(mixed_graph, [])
    assert vis.visible_edges == frozenset()
    assert vis.visible_nodes == {n.id for n in mixed_graph.nodes}


def test_import_only_filter(mixed_graph):
    vis = filter_by_kinds(mixed_graph, ["import"])
    assert vis.visible_edges == {"i1", "i2", "i3"}


def test_unknown_kind_rejected(mixed_graph):
    with pytest.raises(InputError, match="structure"):
        filter_by_kinds(mixed_graph, ["structure"])


# ---------------------------------------------------------------------------
# Reachability


def test_chain_reachable_from_head(chain_graph):
    vis = reachable_subgraph(chain_graph, "a")
    assert vis.visible_nodes == {"a", "b", "c"}
    assert vis.visible_edges == {"e1", "e2"}


def test_chain_reachable_from_sink(chain_graph):
    vis = reachable_subgraph(chain_graph, "c")
    assert vis.visible_nodes == {"c"}
    assert vis.visible_edges == frozenset()
    back = reachable_subgraph(chain_graph, "c", reversed=True)
    assert back.visible_nodes == {"a", "b", "c"}
    assert back.visible_edges == {"e1", "e2"}


def test_unknown_start_rejected(chain_graph):
    with pytest.raises(InputError, match="zz"):
        reachable_subgraph(chain_graph, "zz")


def test_reachable_matches_bfs_oracle_on_random_digraphs():
    for seed in range(25):
        g = random_digraph(seed)
        pairs = [(e.source, e.target) for e in g.edges]
        node_ids = [n.id for n in g.nodes]
        start = node_ids[seed % len(node_ids)]
        for reverse in (False, True):
            vis = reachable_subgraph(g, start, reversed=reverse)
            assert vis.visible_nodes == bfs_reachable(node_ids, pairs, start, reverse)
            origin = (lambda e: e.target) if reverse else (lambda e: e.source)
            expected_edges = {e.id for e in g.edges if origin(e) in vis.visible_nodes}
            assert vis.visible_edges == expected_edges
            assert_closed(g, vis)


def test_reversed_equals_reachable_on_reversed_graph():
    for seed in range(8):
        g = random_digraph(seed + 100, max_nodes=60)
        flipped = TheoryGraph(
            g.nodes,
            [GraphEdge(e.id, e.target, e.source, e.kind, e.uri) for e in g.edges],
            g.kinds.values())
        start = g.nodes[0].id
        a = reachable_subgraph(g, start, reversed=True)
        b = reachable_subgraph(flipped, start, reversed=False)
        assert a == b


def test_kind_restricted_reachability(mixed_graph):
    # d -> a is a view; restricting to imports cuts the cycle back
    vis = reachable_subgraph(mixed_graph, "d", kinds=["import"])
    assert vis.visible_nodes == {"d"}
    full = reachable_subgraph(mixed_graph, "d")
    assert full.visible_nodes == {"a", "b", "c", "d"}


def test_kind_filter_commutes_with_reachability():
    for seed in range(8):
        g = random_digraph(seed + 300, max_nodes=80)
        start = g.nodes[0].id
        direct = reachable_subgraph(g, start, kinds=["import"])
        pruned = TheoryGraph(
            g.nodes, [e for e in g.edges if e.kind == "import"], g.kinds.values())
        indirect = reachable_subgraph(pruned, start)
        assert direct.visible_nodes == indirect.visible_nodes
        assert direct.visible_edges == indirect.visible_edges


# ---------------------------------------------------------------------------
# Neighborhood


def test_neighborhood_k0_is_centers_with_internal_edges():
    g = make_graph("ab", [("e", "a", "b", "import")])
    vis = neighborhood_subgraph(g, ["a", "b"], k=0)
    assert vis.visible_nodes == {"a", "b"}
    assert vis.visible_edges == {"e"}  # both endpoints are centers
    solo = neighborhood_subgraph(g, ["a"], k=0)
    assert solo.visible_nodes == {"a"} and solo.visible_edges == frozenset()


def test_star_neighborhood(star_graph):
    vis = neighborhood_subgraph(star_graph, ["c"], k=1)
    assert len(vis.visible_nodes) == 6
    assert len(vis.visible_edges) == 5


def test_neighborhood_matches_bfs_oracle():
    for seed in range(20):
        g = random_digraph(seed + 500)
        node_ids = [n.id for n in g.nodes]
        pairs = [(e.source, e.target) for e in g.edges]
        centers = {node_ids[seed % len(node_ids)], node_ids[(3 * seed) % len(node_ids)]}
        for k in (0, 1, 2):
            vis = neighborhood_subgraph(g, centers, k)
            assert vis.visible_nodes == bfs_hops(node_ids, pairs, centers, k)
            assert_closed(g, vis)


def test_neighborhood_monotone_in_k():
    g = random_digraph(777)
    center = [g.nodes[0].id]
    previous = neighborhood_subgraph(g, center, 0)
    for k in range(1, 5):
        current = neighborhood_subgraph(g, center, k)
        assert previous.visible_nodes <= current.visible_nodes
        previous = current


def test_neighborhood_validation(chain_graph):
    with pytest.raises(InputError):
        neighborhood_subgraph(chain_graph, [], 1)
    with pytest.raises(InputError):
        neighborhood_subgraph(chain_graph, ["a"], -1)
    with pytest.raises(InputError):
        neighborhood_subgraph(chain_graph, ["nope"], 1)


# ---------------------------------------------------------------------------
# Distance cutoff


def test_cutoff_huge_radius_keeps_all(mixed_graph):
    layout = random_layout(mixed_graph, 1)
    vis = distance_cutoff_filter(mixed_graph, layout, [0, 0, 0], 1e9)
    assert vis.visible_nodes == {n.id for n in mixed_graph.nodes}
    assert vis.visible_edges == {e.id for e in mixed_graph.edges}


def test_cutoff_tiny_radius_empty(mixed_graph):
    layout = random_layout(mixed_graph, 2)
    center = np.array([1000.0, 1000.0, 1000.0])
    vis = distance_cutoff_filter(mixed_graph, layout, center, 1e-6)
    assert vis.visible_nodes == frozenset()


def test_cutoff_matches_linear_scan():
    g = random_digraph(901, max_nodes=120)
    layout = random_layout(g, 3)
    center = np.array([0.5, -0.2, 1.0])
    dists = sorted(np.linalg.norm(p - center) for p in layout.positions.values())
    radius = float(dists[len(dists) // 2])  # median distance
    vis = distance_cutoff_filter(g, layout, center, radius)
    expected = {nid for nid, p in layout.positions.items()
                if np.linalg.norm(p - center) <= radius}
    assert vis.visible_nodes == expected
    assert_closed(g, vis)


def test_cutoff_validation(mixed_graph):
    layout = random_layout(mixed_graph, 4)
    with pytest.raises(InputError):
        distance_cutoff_filter(mixed_graph, layout, [0, 0, 0], 0.0)


# ---------------------------------------------------------------------------
# Composite filter spec


def test_apply_filter_spec_composes(mixed_graph):
    layout = random_layout(mixed_graph, 5)
    spec = FilterSpec(frozenset(["import"]),
                      FocusSpec("a", "reachable"),
                      DistanceCutoff(tuple(layout.positions["a"]), 1e9))
    vis = apply_filter_spec(mixed_graph, spec, layout)
    chain = reachable_subgraph(mixed_graph, "a", kinds=["import"])
    assert vis.visible_nodes == chain.visible_nodes
    assert vis.visible_edges == chain.visible_edges
    assert_closed(mixed_graph, vis)


def test_apply_filter_cutoff_requires_layout(mixed_graph):
    spec = FilterSpec(frozenset(["import"]), None, DistanceCutoff((0, 0, 0), 1.0))
    with pytest.raises(InputError, match="layout"):
        apply_filter_spec(mixed_graph, spec)


def test_filter_spec_wire_round_trip(mixed_graph):
    spec = FilterSpec(frozenset(["import", "view"]),
                      FocusSpec("b", "neighborhood", 2),
                      DistanceCutoff((1.0, 2.0, 3.0), 4.0))
    doc = json.dumps(spec.to_json_dict())
    parsed = parse_filter_spec(doc, mixed_graph)
    assert parsed == spec


def test_filter_spec_parsing_errors(mixed_graph):
    with pytest.raises(InputError, match="mode"):
        parse_filter_spec(json.dumps({"focus": {"node": "a", "mode": "upwards"}}),
                          mixed_graph)
    with pytest.raises(InputError, match="kind"):
        parse_filter_spec(json.dumps({"enabledKinds": ["nope"]}), mixed_graph)
    with pytest.raises(InputError, match="node"):
        parse_filter_spec(json.dumps({"focus": {"node": "zz", "mode": "reachable"}}),
                          mixed_graph)
    with pytest.raises(InputError, match="radius"):
        parse_filter_spec(json.dumps({"cutoff": {"center": [0, 0, 0], "radius": -1}}),
                          mixed_graph)
    # omitted enabledKinds means "all registered"
    spec = parse_filter_spec("{}", mixed_graph)
    assert spec.enabled_kinds == frozenset(mixed_graph.kinds)


def test_subgraph_materialization(mixed_graph):
    vis = filter_by_kinds(mixed_graph, ["import"])
    g = subgraph(mixed_graph, vis)
    assert {e.id for e in g.edges} == {"i1", "i2", "i3"}
    assert len(g.nodes) == 5
    assert "view" in g.kinds  # registry retained


# ---------------------------------------------------------------------------
# Transforms


def test_rotation_zero_angle_is_bitwise_identity():
    g = synthetic_library_graph(50, 120, seed=1)
    layout = random_layout(g, 6)
    rotated = rotate_about_vertical(layout, 0.0)
    for nid, p in layout.positions.items():
        assert np.array_equal(rotated.positions[nid], p)


def test_rotation_quarter_turn():
    layout = Layout({"a": np.array([1.0, 2.0, 0.0])})
    rotated = rotate_about_vertical(layout, math.pi / 2)
    assert np.allclose(rotated.positions["a"], [0.0, 2.0, -1.0], atol=1e-12)
    assert rotated.positions["a"][1] == 2.0


def test_rotation_preserves_y_bitwise_and_distances():
    g = synthetic_library_graph(60, 150, seed=2)
    layout = random_layout(g, 7)
    for phi in (0.3, -1.2, 10.0):
        rotated = rotate_about_vertical(layout, phi)
        ids = list(layout.positions)
        for nid in ids:
            assert rotated.positions[nid][1] == layout.positions[nid][1]
        before = np.array([layout.positions[i] for i in ids])
        after = np.array([rotated.positions[i] for i in ids])
        d0 = np.linalg.norm(before[:, None] - before[None, :], axis=2)
        d1 = np.linalg.norm(after[:, None] - after[None, :], axis=2)
        assert np.allclose(d1, d0, rtol=1e-12, atol=1e-12 * d0.max())


def test_rotation_preserves_upwardness(chain_graph):
    layout = random_layout(chain_graph, 8)
    for phi in (0.5, 2.0, -0.7):
        rotated = rotate_about_vertical(layout, phi)
        for e in chain_graph.edges:
            before = layout.positions[e.target][1] > layout.positions[e.source][1]
            after = rotated.positions[e.target][1] > rotated.positions[e.source][1]
            assert before == after


def test_scale_identity_and_doubling(mixed_graph):
    layout = random_layout(mixed_graph, 9)
    same = scale_positions(layout, 1.0, [0, 0, 0])
    for nid, p in layout.positions.items():
        assert np.allclose(same.positions[nid], p, rtol=0, atol=0)

    ids = list(layout.positions)
    centroid = np.mean([layout.positions[i] for i in ids], axis=0)
    doubled = scale_positions(layout, 2.0, centroid)
    new_centroid = np.mean([doubled.positions[i] for i in ids], axis=0)
    assert np.allclose(new_centroid, centroid, rtol=1e-12, atol=1e-12)
    before = np.array([layout.positions[i] for i in ids])
    after = np.array([doubled.positions[i] for i in ids])
    d0 = np.linalg.norm(before[:, None] - before[None, :], axis=2)
    d1 = np.linalg.norm(after[:, None] - after[None, :], axis=2)
    assert np.allclose(d1, 2.0 * d0, rtol=1e-12, atol=1e-12 * d0.max())


def test_scale_inverse_pair_restores(mixed_graph):
    layout = random_layout(mixed_graph, 10)
    pivot = [0.5, 1.0, -2.0]
    back = scale_positions(scale_positions(layout, 0.5, pivot), 2.0, pivot)
    for nid, p in layout.positions.items():
        assert np.allclose(back.positions[nid], p, rtol=1e-12, atol=1e-12)


def test_scale_multiplies_mean_edge_length(mixed_graph):
    layout = random_layout(mixed_graph, 11)
    m0 = layout_metrics(mixed_graph, layout).mean_edge_length
    scaled = scale_positions(layout, 3.0, [0, 0, 0])
    m1 = layout_metrics(mixed_graph, scaled).mean_edge_length
    assert m1 == pytest.approx(3.0 * m0, rel=1e-12)


def test_scale_preserves_y_order(chain_graph):
    layout = run_layout_chain(chain_graph)
    scaled = scale_positions(layout, 0.25, [3.0, 1.0, 2.0])
    ids = sorted(layout.positions, key=lambda i: layout.positions[i][1])
    ids2 = sorted(scaled.positions, key=lambda i: scaled.positions[i][1])
    assert ids == ids2


def run_layout_chain(graph):
    from tgforge.layout_engine import LayoutParams, run_layout
    return run_layout(graph, LayoutParams(seed=1, max_iterations=50))


def test_transform_validation(mixed_graph):
    layout = random_layout(mixed_graph, 12)
    with pytest.raises(InputError):
        rotate_about_vertical(layout, float("inf"))
    with pytest.raises(InputError):
        scale_positions(layout, 0.0, [0, 0, 0])
    with pytest.raises(InputError):
        scale_positions(layout, -2.0, [0, 0, 0])
