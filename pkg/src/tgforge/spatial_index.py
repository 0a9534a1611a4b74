"""Octree over node positions with Barnes-Hut repulsion queries.

All-pairs repulsion is the only O(n**2) part of a layout step; the tree
replaces far-away groups of nodes by their center of mass. A cell of
size s (longest side of its bounding box) at distance r from the query
point acts as a single pseudo-node when s / r < theta, so theta = 0
degenerates to the exact pairwise sum and larger values trade accuracy
for speed.

Representation is a flat arena of cells (struct-of-arrays) so the hot
kernels can be JIT-compiled; the pure-Python fallback runs the same code
unmodified, just slower. Conventions, fixed for reproducibility:

* child octant index: bit 2 set iff x >= cell center x, bit 1 for y,
  bit 0 for z (x, y, z from most to least significant bit);
* leaves hold one point, except at ``MAX_DEPTH`` where coincident or
  near-coincident points accumulate in an intrusive chain;
* traversal is depth-first with children pushed in ascending octant
  order, and a cell whose bounds contain the query point is always
  opened regardless of theta (keeps self-exclusion exact).
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def decorate(func):
            return func

        return decorate

__all__ = ["OctreeIndex", "build_octree", "approx_repulsion",
           "repulsion_forces", "exact_repulsion", "MAX_DEPTH", "LEAF_CAPACITY"]

LEAF_CAPACITY = 1
MAX_DEPTH = 32
_STACK_SIZE = 1024  # > 7 * (MAX_DEPTH + 1), the DFS worst case


@njit(cache=True)
def _insert_all(pts, root_lo, root_hi, cap):
    """Insert every point; returns (arrays..., n_cells) or n_cells=-1 when
    the arena overflowed and the caller must retry with more capacity."""
    n = pts.shape[0]
    lo = np.empty((cap, 3), np.float64)
    hi = np.empty((cap, 3), np.float64)
    children = np.full((cap, 8), -1, np.int32)
    is_leaf = np.zeros(cap, np.bool_)
    first_pt = np.full(cap, -1, np.int32)
    depth = np.zeros(cap, np.int32)
    nxt = np.full(n, -1, np.int32)

    for d in range(3):
        lo[0, d] = root_lo[d]
        hi[0, d] = root_hi[d]
    is_leaf[0] = True
    n_cells = 1

    for p in range(n):
        px, py, pz = pts[p, 0], pts[p, 1], pts[p, 2]
        cur = 0
        while True:
            if is_leaf[cur]:
                if first_pt[cur] == -1:
                    first_pt[cur] = p
                    break
                if depth[cur] >= MAX_DEPTH:
                    nxt[p] = first_pt[cur]
                    first_pt[cur] = p
                    break
                # occupied leaf below the depth cap: split, rehome the
                # resident point one level down, then keep descending
                q = first_pt[cur]
                first_pt[cur] = -1
                is_leaf[cur] = False
                cx = 0.5 * (lo[cur, 0] + hi[cur, 0])
                cy = 0.5 * (lo[cur, 1] + hi[cur, 1])
                cz = 0.5 * (lo[cur, 2] + hi[cur, 2])
                o = 0
                if pts[q, 0] >= cx:
                    o += 4
                if pts[q, 1] >= cy:
                    o += 2
                if pts[q, 2] >= cz:
                    o += 1
                child = n_cells
                if child >= cap:
                    return lo, hi, children, is_leaf, first_pt, depth, nxt, -1
                n_cells += 1
                lo[child, 0] = cx if o & 4 else lo[cur, 0]
                hi[child, 0] = hi[cur, 0] if o & 4 else cx
                lo[child, 1] = cy if o & 2 else lo[cur, 1]
                hi[child, 1] = hi[cur, 1] if o & 2 else cy
                lo[child, 2] = cz if o & 1 else lo[cur, 2]
                hi[child, 2] = hi[cur, 2] if o & 1 else cz
                depth[child] = depth[cur] + 1
                is_leaf[child] = True
                first_pt[child] = q
                children[cur, o] = child

            cx = 0.5 * (lo[cur, 0] + hi[cur, 0])
            cy = 0.5 * (lo[cur, 1] + hi[cur, 1])
            cz = 0.5 * (lo[cur, 2] + hi[cur, 2])
            o = 0
            if px >= cx:
                o += 4
            if py >= cy:
                o += 2
            if pz >= cz:
                o += 1
            ch = children[cur, o]
            if ch == -1:
                ch = n_cells
                if ch >= cap:
                    return lo, hi, children, is_leaf, first_pt, depth, nxt, -1
                n_cells += 1
                lo[ch, 0] = cx if o & 4 else lo[cur, 0]
                hi[ch, 0] = hi[cur, 0] if o & 4 else cx
                lo[ch, 1] = cy if o & 2 else lo[cur, 1]
                hi[ch, 1] = hi[cur, 1] if o & 2 else cy
                lo[ch, 2] = cz if o & 1 else lo[cur, 2]
                hi[ch, 2] = hi[cur, 2] if o & 1 else cz
                depth[ch] = depth[cur] + 1
                is_leaf[ch] = True
                children[cur, o] = ch
            cur = ch

    return lo, hi, children, is_leaf, first_pt, depth, nxt, n_cells


@njit(cache=True)
def _accumulate_mass(pts, children, is_leaf, first_pt, nxt, n_cells):
    """Bottom-up pass filling mass (point counts) and centers of mass.

    Children always carry larger indices than their parent, so a single
    reverse sweep sees every child before its parent.
    """
    mass = np.zeros(n_cells, np.float64)
    com = np.zeros((n_cells, 3), np.float64)
    for c in range(n_cells - 1, -1, -1):
        if is_leaf[c]:
            m = 0.0
            sx = sy = sz = 0.0
            p = first_pt[c]
            while p != -1:
                sx += pts[p, 0]
                sy += pts[p, 1]
                sz += pts[p, 2]
                m += 1.0
                p = nxt[p]
        else:
            m = 0.0
            sx = sy = sz = 0.0
            for o in range(8):
                ch = children[c, o]
                if ch != -1:
                    m += mass[ch]
                    sx += com[ch, 0] * mass[ch]
                    sy += com[ch, 1] * mass[ch]
                    sz += com[ch, 2] * mass[ch]
        mass[c] = m
        if m > 0.0:
            com[c, 0] = sx / m
            com[c, 1] = sy / m
            com[c, 2] = sz / m
    return mass, com


@njit(cache=True, nogil=True)
def _force_at(pts, lo, hi, children, is_leaf, first_pt, nxt, mass, com,
              qx, qy, qz, theta, coef, min_distance, exclude):
    """Repulsion on the query point: sum of coef / d per contributor,
    directed away from it, with d = max(distance, min_distance)."""
    stack = np.empty(_STACK_SIZE, np.int32)
    stack[0] = 0
    top = 1
    fx = fy = fz = 0.0
    while top > 0:
        top -= 1
        c = stack[top]
        if is_leaf[c]:
            p = first_pt[c]
            while p != -1:
                if p != exclude:
                    dx = qx - pts[p, 0]
                    dy = qy - pts[p, 1]
                    dz = qz - pts[p, 2]
                    r = np.sqrt(dx * dx + dy * dy + dz * dz)
                    if r > 0.0:
                        d = r if r > min_distance else min_distance
                        s = coef / (d * r)
                        fx += dx * s
                        fy += dy * s
                        fz += dz * s
                p = nxt[p]
        else:
            dx = qx - com[c, 0]
            dy = qy - com[c, 1]
            dz = qz - com[c, 2]
            r = np.sqrt(dx * dx + dy * dy + dz * dz)
            size = hi[c, 0] - lo[c, 0]
            sy_ = hi[c, 1] - lo[c, 1]
            sz_ = hi[c, 2] - lo[c, 2]
            if sy_ > size:
                size = sy_
            if sz_ > size:
                size = sz_
            inside = (lo[c, 0] <= qx <= hi[c, 0]
                      and lo[c, 1] <= qy <= hi[c, 1]
                      and lo[c, 2] <= qz <= hi[c, 2])
            if not inside and size < theta * r:
                if r > 0.0:
                    d = r if r > min_distance else min_distance
                    s = mass[c] * coef / (d * r)
                    fx += dx * s
                    fy += dy * s
                    fz += dz * s
            else:
                for o in range(8):
                    ch = children[c, o]
                    if ch != -1:
                        stack[top] = ch
                        top += 1
    return fx, fy, fz


@njit(cache=True, nogil=True)
def _forces_batch(pts, lo, hi, children, is_leaf, first_pt, nxt, mass, com,
                  theta, coef, min_distance, out):
    for i in range(pts.shape[0]):
        fx, fy, fz = _force_at(pts, lo, hi, children, is_leaf, first_pt, nxt,
                               mass, com, pts[i, 0], pts[i, 1], pts[i, 2],
                               theta, coef, min_distance, i)
        out[i, 0] = fx
        out[i, 1] = fy
        out[i, 2] = fz


class OctreeIndex:
    """Immutable octree over a fixed set of 3D points.

    Cell 0 is the root. ``children[c]`` holds eight child indices
    (-1 = absent); leaves chain their stored point indices through
    ``first_point`` and ``point_next``. ``mass[c]`` counts the points in
    the subtree and ``center_of_mass[c]`` is their mean position.
    """

    leaf_capacity = LEAF_CAPACITY
    max_depth = MAX_DEPTH

    def __init__(self, points, bounds_lo, bounds_hi, children, is_leaf,
                 first_point, point_next, depth, mass, center_of_mass):
        self.points = points
        self.bounds_lo = bounds_lo
        self.bounds_hi = bounds_hi
        self.children = children
        self.is_leaf = is_leaf
        self.first_point = first_point
        self.point_next = point_next
        self.depth = depth
        self.mass = mass
        self.center_of_mass = center_of_mass

    @property
    def cell_count(self) -> int:
        return self.mass.shape[0]

    @property
    def point_count(self) -> int:
        return self.points.shape[0]

    @property
    def root_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.bounds_lo[0], self.bounds_hi[0]

    @property
    def depth_reached(self) -> int:
        return int(self.depth.max())

    def cell_points(self, cell: int) -> list[int]:
        """Point indices chained in the given leaf (empty for internal cells)."""
        out = []
        p = int(self.first_point[cell])
        while p != -1:
            out.append(p)
            p = int(self.point_next[p])
        return out

    def __repr__(self):
        return f"OctreeIndex(points={self.point_count}, cells={self.cell_count})"


def build_octree(positions) -> OctreeIndex:
    """Build the octree for an (n, 3) array of finite positions.

    Root bounds are the tight bounding box padded by a 1e-9 relative
    margin so no point sits exactly on the boundary. Identical inputs
    produce identical trees.
    """
    pts = np.ascontiguousarray(positions, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise InputError(f"positions must be an (n, 3) array, got shape {pts.shape}")
    if pts.shape[0] == 0:
        raise InputError("cannot index an empty point set")
    finite = np.isfinite(pts).all(axis=1)
    if not finite.all():
        bad = int(np.flatnonzero(~finite)[0])
        raise InputError(f"non-finite coordinate at point index {bad}")

    root_lo = pts.min(axis=0)
    root_hi = pts.max(axis=0)
    pad = 1e-9 * np.maximum(1.0, np.maximum(np.abs(root_lo), np.abs(root_hi)))
    root_lo = root_lo - pad
    root_hi = root_hi + pad

    n = pts.shape[0]
    cap = max(64, 4 * n)
    while True:
        lo, hi, children, is_leaf, first_pt, depth, nxt, n_cells = _insert_all(
            pts, root_lo, root_hi, cap)
        if n_cells != -1:
            break
        cap = n * (MAX_DEPTH + 2) + 1  # worst case: one fresh chain per level

    lo = lo[:n_cells].copy()
    hi = hi[:n_cells].copy()
    children = children[:n_cells].copy()
    is_leaf = is_leaf[:n_cells].copy()
    first_pt = first_pt[:n_cells].copy()
    depth = depth[:n_cells].copy()
    mass, com = _accumulate_mass(pts, children, is_leaf, first_pt, nxt, n_cells)
    return OctreeIndex(pts, lo, hi, children, is_leaf, first_pt, nxt,
                       depth, mass, com)


def approx_repulsion(index: OctreeIndex, query, theta: float, k_repel: float,
                     *, edge_length: float = 1.0, min_distance: float = 1e-3,
                     exclude: int | None = None) -> np.ndarray:
    """Barnes-Hut estimate of the repulsion force at ``query``.

    The per-contributor kernel is k_repel * edge_length**2 / d pointing
    away from the contributor, with d = max(distance, min_distance); a
    pseudo-node of mass m contributes m times that. ``exclude`` names an
    indexed point to leave out (the querying node itself). With
    theta = 0 the result is the exact pairwise sum up to floating-point
    reassociation.
    """
    if theta < 0:
        raise InputError(f"theta must be >= 0, got {theta}")
    if k_repel <= 0:
        raise InputError(f"k_repel must be > 0, got {k_repel}")
    q = np.asarray(query, dtype=np.float64).reshape(3)
    if not np.isfinite(q).all():
        raise InputError("query point must be finite")
    coef = k_repel * edge_length * edge_length
    fx, fy, fz = _force_at(
        index.points, index.bounds_lo, index.bounds_hi, index.children,
        index.is_leaf, index.first_point, index.point_next, index.mass,
        index.center_of_mass, q[0], q[1], q[2], theta, coef, min_distance,
        -1 if exclude is None else int(exclude))
    return np.array([fx, fy, fz])


def repulsion_forces(index: OctreeIndex, theta: float, k_repel: float,
                     *, edge_length: float = 1.0,
                     min_distance: float = 1e-3) -> np.ndarray:
    """Per-node repulsion for every indexed point, each excluding itself."""
    if theta < 0:
        raise InputError(f"theta must be >= 0, got {theta}")
    if k_repel <= 0:
        raise InputError(f"k_repel must be > 0, got {k_repel}")
    out = np.empty_like(index.points)
    coef = k_repel * edge_length * edge_length
    _forces_batch(index.points, index.bounds_lo, index.bounds_hi,
                  index.children, index.is_leaf, index.first_point,
                  index.point_next, index.mass, index.center_of_mass,
                  theta, coef, min_distance, out)
    return out


def exact_repulsion(positions, k_repel: float, *, edge_length: float = 1.0,
                    min_distance: float = 1e-3, block: int = 256) -> np.ndarray:
    """Naive all-pairs repulsion, vectorized; the oracle the tree is held to.

    Processes rows in blocks to bound the (block, n, 3) temporaries.
    """
    pts = np.asarray(positions, dtype=np.float64)
    n = pts.shape[0]
    coef = k_repel * edge_length * edge_length
    out = np.zeros_like(pts)
    for start in range(0, n, block):
        stop = min(start + block, n)
        delta = pts[start:stop, None, :] - pts[None, :, :]
        r = np.sqrt((delta * delta).sum(axis=2))
        d = np.maximum(r, min_distance)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = coef / (d * r)
        s[r == 0.0] = 0.0  # covers the diagonal and exact coincidences
        out[start:stop] = (delta * s[:, :, None]).sum(axis=1)
    return out
