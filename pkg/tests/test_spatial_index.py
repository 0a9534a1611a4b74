import numpy as np
import pytest

from tgforge.errors import InputError
from tgforge.spatial_index import (
    MAX_DEPTH,
    approx_repulsion,
    build_octree,
    exact_repulsion,
    repulsion_forces,
)

from oracles import reference_repulsion


def random_cloud(n, seed, scale=10.0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-scale, scale, size=(n, 3))


def subtree_points(index, cell):
    """Independent audit helper: point indices in a subtree, via the
    tree's own child links and leaf chains."""
    if index.is_leaf[cell]:
        return index.cell_points(cell)
    out = []
    for child in index.children[cell]:
        if child != -1:
            out.extend(subtree_points(index, int(child)))
    return out


# ---------------------------------------------------------------------------
# Construction


def test_single_point_tree():
    p = np.array([[1.5, -2.0, 3.0]])
    index = build_octree(p)
    assert index.cell_count == 1
    assert index.is_leaf[0]
    assert index.mass[0] == 1.0
    assert np.array_equal(index.center_of_mass[0], p[0])


def test_root_bounds_enclose_all_points():
    pts = random_cloud(200, seed=1)
    index = build_octree(pts)
    lo, hi = index.root_bounds
    assert (pts > lo).all() and (pts < hi).all()  # strict, thanks to the margin


def test_coincident_points_bounded_depth():
    pts = np.zeros((5, 3))
    index = build_octree(pts)
    assert index.mass[0] == 5.0
    assert index.depth_reached <= MAX_DEPTH
    leaves = [c for c in range(index.cell_count) if index.is_leaf[c] and index.cell_points(c)]
    assert sum(len(index.cell_points(c)) for c in leaves) == 5


def test_mass_conservation_various_sizes():
    for n in (1, 2, 7, 64, 500):
        index = build_octree(random_cloud(n, seed=n))
        assert index.mass[0] == float(n)


def test_mass_and_centroid_audit_1000_points():
    pts = random_cloud(1000, seed=3)
    index = build_octree(pts)
    assert index.mass[0] == 1000.0
    for cell in range(index.cell_count):
        members = subtree_points(index, cell)
        assert index.mass[cell] == float(len(members))
        centroid = pts[members].mean(axis=0)
        assert np.allclose(index.center_of_mass[cell], centroid, rtol=1e-12, atol=1e-12)
        if index.is_leaf[cell] and index.depth[cell] < MAX_DEPTH:
            assert len(index.cell_points(cell)) <= index.leaf_capacity


def test_points_lie_within_their_cells():
    pts = random_cloud(300, seed=4)
    index = build_octree(pts)
    for cell in range(index.cell_count):
        for p in subtree_points(index, cell):
            assert (pts[p] >= index.bounds_lo[cell]).all()
            assert (pts[p] <= index.bounds_hi[cell]).all()


def test_child_cells_partition_parent():
    pts = random_cloud(100, seed=5)
    index = build_octree(pts)
    for cell in range(index.cell_count):
        if index.is_leaf[cell]:
            continue
        center = 0.5 * (index.bounds_lo[cell] + index.bounds_hi[cell])
        for octant, child in enumerate(index.children[cell]):
            if child == -1:
                continue
            expect_lo = np.where([octant & 4, octant & 2, octant & 1],
                                 center, index.bounds_lo[cell])
            expect_hi = np.where([octant & 4, octant & 2, octant & 1],
                                 index.bounds_hi[cell], center)
            assert np.array_equal(index.bounds_lo[child], expect_lo)
            assert np.array_equal(index.bounds_hi[child], expect_hi)


def test_deterministic_build():
    pts = random_cloud(250, seed=6)
    a = build_octree(pts)
    b = build_octree(pts.copy())
    assert a.cell_count == b.cell_count
    assert np.array_equal(a.children, b.children)
    assert np.array_equal(a.first_point, b.first_point)
    assert np.array_equal(a.point_next, b.point_next)
    assert np.array_equal(a.center_of_mass, b.center_of_mass)


def test_build_input_validation():
    with pytest.raises(InputError):
        build_octree(np.empty((0, 3)))
    with pytest.raises(InputError):
        build_octree(np.zeros((3, 2)))
    pts = np.zeros((4, 3))
    pts[2, 1] = np.nan
    with pytest.raises(InputError, match="index 2"):
        build_octree(pts)


# ---------------------------------------------------------------------------
# Repulsion queries


def test_single_other_node_exact_kernel():
    d, k_repel, L = 2.5, 1.7, 1.3
    pts = np.array([[0.0, 0.0, 0.0], [d, 0.0, 0.0]])
    index = build_octree(pts)
    force = approx_repulsion(index, pts[0], theta=0.75, k_repel=k_repel,
                             edge_length=L, exclude=0)
    assert force[0] == pytest.approx(-k_repel * L * L / d, rel=1e-15)
    assert force[1] == 0.0 and force[2] == 0.0


def test_theta_zero_matches_loop_oracle_per_component():
    pts = random_cloud(200, seed=7)
    index = build_octree(pts)
    forces = repulsion_forces(index, theta=0.0, k_repel=1.0,
                              edge_length=1.0, min_distance=1e-3)
    scale = np.abs(forces).max()
    for i in range(0, 200, 13):
        expected = reference_repulsion(pts.tolist(), i, k_repel=1.0,
                                       edge_length=1.0, min_distance=1e-3)
        for c in range(3):
            tol = 1e-9 * max(abs(expected[c]), 1e-6 * scale)
            assert abs(forces[i, c] - expected[c]) <= tol


def test_exact_repulsion_matches_loop_oracle():
    pts = random_cloud(80, seed=8)
    grid = exact_repulsion(pts, 2.0, edge_length=1.5, min_distance=1e-2)
    for i in (0, 17, 79):
        expected = reference_repulsion(pts.tolist(), i, k_repel=2.0,
                                       edge_length=1.5, min_distance=1e-2)
        assert np.allclose(grid[i], expected, rtol=1e-12, atol=1e-12)


def test_theta_zero_matches_exact_repulsion_batch():
    pts = random_cloud(300, seed=9)
    index = build_octree(pts)
    tree = repulsion_forces(index, theta=0.0, k_repel=1.0)
    naive = exact_repulsion(pts, 1.0)
    assert np.allclose(tree, naive, rtol=1e-9, atol=1e-9 * np.abs(naive).max())


def test_default_theta_median_error_under_5_percent():
    errors = []
    for seed in range(10):
        pts = random_cloud(1000, seed=100 + seed)
        index = build_octree(pts)
        approx = repulsion_forces(index, theta=0.75, k_repel=1.0)
        exact = exact_repulsion(pts, 1.0)
        per_node = (np.linalg.norm(approx - exact, axis=1)
                    / np.linalg.norm(exact, axis=1))
        errors.append(np.median(per_node))
    assert max(errors) <= 0.05


def test_accuracy_monotone_in_theta():
    tight, loose = [], []
    for seed in range(10):
        pts = random_cloud(400, seed=200 + seed)
        index = build_octree(pts)
        exact = exact_repulsion(pts, 1.0)
        norm = np.linalg.norm(exact, axis=1)
        for theta, bucket in ((0.3, tight), (1.2, loose)):
            approx = repulsion_forces(index, theta=theta, k_repel=1.0)
            bucket.append((np.linalg.norm(approx - exact, axis=1) / norm).mean())
    assert np.mean(tight) <= np.mean(loose)


def test_query_coincident_with_center_of_mass_is_safe():
    # two points symmetric about the origin: the root's center of mass is
    # exactly the query point; must resolve via the clamp, never fault
    pts = np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    index = build_octree(pts)
    force = approx_repulsion(index, [0.0, 0.0, 0.0], theta=10.0, k_repel=1.0)
    assert np.isfinite(force).all()
    assert np.allclose(force, 0.0)


def test_query_on_indexed_point_without_exclude():
    pts = np.array([[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]])
    index = build_octree(pts)
    # the coincident stored point contributes nothing (direction undefined)
    force = approx_repulsion(index, [0.0, 0.0, 0.0], theta=0.0, k_repel=1.0)
    assert force[0] == pytest.approx(-1.0 / 3.0)


def test_exclusion_changes_result():
    pts = random_cloud(50, seed=10)
    index = build_octree(pts)
    with_self = approx_repulsion(index, pts[0], theta=0.0, k_repel=1.0)
    without = approx_repulsion(index, pts[0], theta=0.0, k_repel=1.0, exclude=0)
    assert np.allclose(with_self, without)  # self is coincident: no contribution
    shifted = approx_repulsion(index, pts[0] + 1e-6, theta=0.0, k_repel=1.0)
    assert not np.allclose(shifted, without)


def test_query_validation():
    index = build_octree(np.zeros((1, 3)))
    with pytest.raises(InputError):
        approx_repulsion(index, [0, 0, 0], theta=-0.1, k_repel=1.0)
    with pytest.raises(InputError):
        approx_repulsion(index, [0, 0, 0], theta=0.5, k_repel=0.0)
    with pytest.raises(InputError):
        approx_repulsion(index, [np.inf, 0, 0], theta=0.5, k_repel=1.0)


def test_concurrent_queries_share_one_tree():
    import threading

    pts = random_cloud(400, seed=12)
    index = build_octree(pts)
    expected = repulsion_forces(index, theta=0.75, k_repel=1.0)
    results = {}

    def worker(tid):
        results[tid] = repulsion_forces(index, theta=0.75, k_repel=1.0)

    threads = [threading.Thread(target=worker, args=(t,)) for t in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for out in results.values():
        assert np.array_equal(out, expected)
