"""Hierarchical force-directed 3D layout.

Three forces act on every node, evaluated against the previous
iteration's positions (synchronous update, so results are independent of
node order and trivially parallelizable):

* attraction along edges, ignoring direction: each incident edge pulls
  with magnitude attraction_weight * k_attract * d^2 / L toward the
  other endpoint (Fruchterman-Reingold spring);
* repulsion from every other node, magnitude k_repel * L^2 / d, summed
  via the Barnes-Hut octree (theta = 0 gives the exact sum);
* a constant vertical bias per directed edge whose kind has a positive
  hierarchy weight: the source is pushed down, the target up, by
  k_hierarchy * hierarchy_weight. This is what turns edge direction into
  a bottom-to-top reading of the graph.

Distances are clamped below by min_distance, and each node's move is
capped at temperature * L; the temperature starts at a fraction of the
initial placement radius and decays geometrically, so the system settles
into a force balance. Identical inputs give bit-identical layouts on one
platform; the seeded placement uses the portable generator from
:mod:`tgforge.rng`, making "same seed, same layout" checkable across
implementations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import EngineError, InputError, ParseError
from .graph_model import TheoryGraph
from .rng import SplitMix64
from .spatial_index import build_octree, repulsion_forces

__all__ = [
    "LayoutParams",
    "Layout",
    "LayoutProgress",
    "LayoutMetrics",
    "initial_placement",
    "step",
    "run_layout",
    "layout_metrics",
    "params_to_json_dict",
    "params_from_json_dict",
    "layout_to_json_dict",
    "parse_layout",
    "serialize_layout",
]


@dataclass(frozen=True)
class LayoutParams:
    """All layout constants. min_distance defaults to 1e-3 * L."""

    ideal_edge_length: float = 1.0
    k_repel: float = 1.0
    k_attract: float = 1.0
    k_hierarchy: float = 10.0
    theta: float = 0.75
    max_iterations: int = 500
    convergence_eps: float = 1e-3
    initial_temperature: float = 0.1
    cooling_factor: float = 0.95
    seed: int = 0
    min_distance: float | None = None

    def __post_init__(self):
        if self.min_distance is None:
            object.__setattr__(self, "min_distance", 1e-3 * self.ideal_edge_length)
        checks = [
            ("idealEdgeLength", self.ideal_edge_length, self.ideal_edge_length > 0),
            ("kRepel", self.k_repel, self.k_repel > 0),
            ("kAttract", self.k_attract, self.k_attract > 0),
            ("kHierarchy", self.k_hierarchy, self.k_hierarchy >= 0),
            ("theta", self.theta, self.theta >= 0),
            ("convergenceEps", self.convergence_eps, self.convergence_eps > 0),
            ("initialTemperature", self.initial_temperature, self.initial_temperature > 0),
            ("coolingFactor", self.cooling_factor, 0 < self.cooling_factor <= 1),
            ("minDistance", self.min_distance, self.min_distance > 0),
        ]
        for name, value, ok in checks:
            if not (ok and math.isfinite(value)):
                raise InputError(f"invalid parameter {name}: {value}")
        if not isinstance(self.max_iterations, int) or self.max_iterations <= 0:
            raise InputError(f"invalid parameter maxIterations: {self.max_iterations}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InputError(f"invalid parameter seed: {self.seed}")


@dataclass
class Layout:
    """Node positions (y is up) plus how the run that produced them ended."""

    positions: dict[str, np.ndarray]
    iterations_run: int = 0
    converged: bool = False
    final_max_displacement: float = 0.0

    def copy_positions(self) -> dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.positions.items()}


@dataclass(frozen=True)
class LayoutProgress:
    iteration: int
    max_displacement: float
    mean_edge_length: float
    snapshot: Layout | None = None


@dataclass(frozen=True)
class LayoutMetrics:
    mean_edge_length: float
    upward_fraction: float
    upward_vacuous: bool
    bounding_box: tuple[tuple[float, float, float], tuple[float, float, float]] | None
    edge_counts_by_kind: dict[str, int]

    def to_json_dict(self) -> dict:
        return {
            "meanEdgeLength": self.mean_edge_length,
            "upwardFraction": self.upward_fraction,
            "upwardVacuous": self.upward_vacuous,
            "boundingBox": None if self.bounding_box is None else
                {"min": list(self.bounding_box[0]), "max": list(self.bounding_box[1])},
            "edgeCountsByKind": self.edge_counts_by_kind,
        }


class _GraphArrays:
    """Index-space view of a graph: edge endpoint indices and per-edge weights."""

    def __init__(self, graph: TheoryGraph):
        self.ids = [n.id for n in graph.nodes]
        index = {node_id: i for i, node_id in enumerate(self.ids)}
        m = len(graph.edges)
        self.src = np.empty(m, dtype=np.int64)
        self.dst = np.empty(m, dtype=np.int64)
        self.attr_w = np.empty(m, dtype=np.float64)
        self.hier_w = np.empty(m, dtype=np.float64)
        for i, edge in enumerate(graph.edges):
            kind = graph.kinds[edge.kind]
            self.src[i] = index[edge.source]
            self.dst[i] = index[edge.target]
            self.attr_w[i] = kind.attraction_weight
            self.hier_w[i] = kind.hierarchy_weight

    def gather_positions(self, layout: Layout) -> np.ndarray:
        pos = np.empty((len(self.ids), 3), dtype=np.float64)
        for i, node_id in enumerate(self.ids):
            try:
                pos[i] = layout.positions[node_id]
            except KeyError:
                raise InputError(f"layout has no position for node {node_id!r}") from None
        return pos

    def make_layout(self, pos: np.ndarray, iterations: int, converged: bool,
                    max_disp: float) -> Layout:
        positions = {node_id: pos[i].copy() for i, node_id in enumerate(self.ids)}
        return Layout(positions, iterations, converged, max_disp)

    def mean_edge_length(self, pos: np.ndarray) -> float:
        if self.src.size == 0:
            return 0.0
        delta = pos[self.dst] - pos[self.src]
        return float(np.sqrt((delta * delta).sum(axis=1)).mean())


def _total_force(arrays: _GraphArrays, pos: np.ndarray, params: LayoutParams) -> np.ndarray:
    n = pos.shape[0]
    L = params.ideal_edge_length
    force = np.zeros((n, 3), dtype=np.float64)

    if n > 1:
        index = build_octree(pos)
        force += repulsion_forces(index, params.theta, params.k_repel,
                                  edge_length=L, min_distance=params.min_distance)

    if arrays.src.size:
        delta = pos[arrays.dst] - pos[arrays.src]
        norm = np.sqrt((delta * delta).sum(axis=1))
        d = np.maximum(norm, params.min_distance)
        magnitude = arrays.attr_w * params.k_attract * d * d / L
        with np.errstate(divide="ignore", invalid="ignore"):
            pull = delta * (magnitude / norm)[:, None]
        pull[norm == 0.0] = 0.0  # coincident endpoints: direction undefined
        np.add.at(force, arrays.src, pull)
        np.add.at(force, arrays.dst, -pull)

        hier = arrays.hier_w > 0.0
        if params.k_hierarchy > 0.0 and hier.any():
            push = params.k_hierarchy * arrays.hier_w[hier]
            np.add.at(force[:, 1], arrays.dst[hier], push)
            np.add.at(force[:, 1], arrays.src[hier], -push)

    bad = ~np.isfinite(force).all(axis=1)
    if bad.any():
        node_id = arrays.ids[int(np.flatnonzero(bad)[0])]
        raise EngineError(f"non-finite force on node {node_id!r}")
    return force


def _step_arrays(arrays: _GraphArrays, pos: np.ndarray, params: LayoutParams,
                 temperature: float) -> tuple[np.ndarray, float]:
    force = _total_force(arrays, pos, params)
    norm = np.sqrt((force * force).sum(axis=1))
    length = np.minimum(norm, temperature * params.ideal_edge_length)
    with np.errstate(divide="ignore", invalid="ignore"):
        move = force * (length / norm)[:, None]
    move[norm == 0.0] = 0.0
    max_disp = float(length.max()) if norm.size else 0.0
    return pos + move, max_disp


def _placement_radius(params: LayoutParams, n: int) -> float:
    return params.ideal_edge_length * n ** (1.0 / 3.0)


def initial_placement(graph: TheoryGraph, params: LayoutParams) -> Layout:
    """Seeded uniform placement in a ball of radius L * cbrt(|V|).

    Sampling is rejection from the unit cube (draws consumed x, y, z per
    attempt, nodes in declaration order), so any implementation of the
    documented generator reproduces it. Exactly coincident samples are
    separated by jitter of magnitude 1e-4 * L drawn from the same stream.
    """
    rng = SplitMix64(params.seed)
    radius = _placement_radius(params, len(graph.nodes))
    jitter = 1e-4 * params.ideal_edge_length
    positions: dict[str, np.ndarray] = {}
    taken: set[tuple[float, float, float]] = set()
    for node in graph.nodes:
        while True:
            x = 2.0 * rng.next_float() - 1.0
            y = 2.0 * rng.next_float() - 1.0
            z = 2.0 * rng.next_float() - 1.0
            if x * x + y * y + z * z <= 1.0:
                break
        point = np.array([radius * x, radius * y, radius * z])
        key = (point[0], point[1], point[2])
        while key in taken:
            while True:
                x = 2.0 * rng.next_float() - 1.0
                y = 2.0 * rng.next_float() - 1.0
                z = 2.0 * rng.next_float() - 1.0
                s = x * x + y * y + z * z
                if 0.0 < s <= 1.0:
                    break
            scale = jitter / math.sqrt(s)
            point = point + scale * np.array([x, y, z])
            key = (point[0], point[1], point[2])
        taken.add(key)
        positions[node.id] = point
    return Layout(positions, iterations_run=0, converged=False)


def step(graph: TheoryGraph, layout: Layout, params: LayoutParams,
         temperature: float) -> tuple[Layout, float]:
    """One synchronous iteration; returns the new layout and the maximum
    node displacement. No node moves farther than temperature * L."""
    if not (temperature > 0 and math.isfinite(temperature)):
        raise InputError(f"temperature must be positive and finite, got {temperature}")
    arrays = _GraphArrays(graph)
    pos = arrays.gather_positions(layout)
    new_pos, max_disp = _step_arrays(arrays, pos, params, temperature)
    return arrays.make_layout(new_pos, layout.iterations_run + 1, False, max_disp), max_disp


def run_layout(graph: TheoryGraph, params: LayoutParams,
               on_progress: Callable[[LayoutProgress], None] | None = None,
               *, initial: Layout | None = None, snapshot_every: int = 1,
               should_stop: Callable[[], bool] | None = None) -> Layout:
    """Iterate to a force balance.

    Stops once the largest displacement falls below convergence_eps * L
    (converged) or after max_iterations. The finished layout is recentered
    on its centroid. ``initial`` overrides the seeded placement (used to
    resume or to study a prepared configuration); ``should_stop`` is
    polled before each iteration for cooperative cancellation. Progress
    callbacks fire every iteration and carry a position snapshot every
    ``snapshot_every`` iterations; they must not mutate their inputs.
    """
    arrays = _GraphArrays(graph)
    n = len(arrays.ids)
    if n == 0:
        return Layout({}, iterations_run=0, converged=True, final_max_displacement=0.0)

    start = initial if initial is not None else initial_placement(graph, params)
    pos = arrays.gather_positions(start)
    temperature = params.initial_temperature * _placement_radius(params, n)
    threshold = params.convergence_eps * params.ideal_edge_length

    converged = False
    iterations = 0
    max_disp = 0.0
    for _ in range(params.max_iterations):
        if should_stop is not None and should_stop():
            break
        pos, max_disp = _step_arrays(arrays, pos, params, temperature)
        iterations += 1
        if on_progress is not None:
            snapshot = None
            if snapshot_every > 0 and iterations % snapshot_every == 0:
                snapshot = arrays.make_layout(pos, iterations, False, max_disp)
            on_progress(LayoutProgress(
                iteration=iterations,
                max_displacement=max_disp,
                mean_edge_length=arrays.mean_edge_length(pos),
                snapshot=snapshot,
            ))
        if max_disp < threshold:
            converged = True
            break
        temperature *= params.cooling_factor

    pos = pos - pos.mean(axis=0)
    return arrays.make_layout(pos, iterations, converged, max_disp)


def layout_metrics(graph: TheoryGraph, layout: Layout) -> LayoutMetrics:
    """Measure what the layout achieved; nothing here feeds back into it.

    upward_fraction is the share of hierarchy-bearing edges whose target
    sits strictly above its source; with no such edges it is reported as
    1.0 with the vacuous flag set.
    """
    arrays = _GraphArrays(graph)
    pos = arrays.gather_positions(layout)

    mean_len = arrays.mean_edge_length(pos)
    hier = arrays.hier_w > 0.0
    if hier.any():
        up = pos[arrays.dst[hier], 1] > pos[arrays.src[hier], 1]
        upward, vacuous = float(up.mean()), False
    else:
        upward, vacuous = 1.0, True

    box = None
    if pos.shape[0]:
        box = (tuple(float(v) for v in pos.min(axis=0)),
               tuple(float(v) for v in pos.max(axis=0)))

    counts: dict[str, int] = {}
    for edge in graph.edges:
        counts[edge.kind] = counts.get(edge.kind, 0) + 1
    return LayoutMetrics(mean_len, upward, vacuous, box, counts)


# ---------------------------------------------------------------------------
# Wire formats

_PARAM_FIELDS = [
    ("idealEdgeLength", "ideal_edge_length", float),
    ("kRepel", "k_repel", float),
    ("kAttract", "k_attract", float),
    ("kHierarchy", "k_hierarchy", float),
    ("theta", "theta", float),
    ("maxIterations", "max_iterations", int),
    ("convergenceEps", "convergence_eps", float),
    ("initialTemperature", "initial_temperature", float),
    ("coolingFactor", "cooling_factor", float),
    ("seed", "seed", int),
    ("minDistance", "min_distance", float),
]


def params_to_json_dict(params: LayoutParams) -> dict:
    return {wire: getattr(params, attr) for wire, attr, _ in _PARAM_FIELDS}


def params_from_json_dict(doc: Mapping, base: LayoutParams | None = None) -> LayoutParams:
    """Build params from a (possibly partial) JSON object; unknown keys
    are rejected so typos fail loudly, naming the field."""
    base = base or LayoutParams()
    known = {wire: (attr, conv) for wire, attr, conv in _PARAM_FIELDS}
    updates = {}
    for key, raw in doc.items():
        if key not in known:
            raise InputError(f"unknown parameter {key!r}")
        attr, conv = known[key]
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise InputError(f"invalid parameter {key}: {raw!r}")
        if conv is int:
            if int(raw) != raw:
                raise InputError(f"invalid parameter {key}: {raw!r}")
            raw = int(raw)
        updates[attr] = conv(raw)
    return replace(base, **updates)


def layout_to_json_dict(layout: Layout, params: LayoutParams | None = None) -> dict:
    return {
        "positions": {node_id: [float(p[0]), float(p[1]), float(p[2])]
                      for node_id, p in layout.positions.items()},
        "converged": layout.converged,
        "iterations": layout.iterations_run,
        "params": params_to_json_dict(params) if params is not None else None,
    }


def serialize_layout(layout: Layout, params: LayoutParams | None = None) -> bytes:
    return (json.dumps(layout_to_json_dict(layout, params), indent=2) + "\n").encode("utf-8")


def parse_layout(data) -> tuple[Layout, LayoutParams | None]:
    """Read a layout document; returns the layout and its params echo."""
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("positions"), dict):
        raise ParseError("layout document must be an object with a 'positions' map")
    positions: dict[str, np.ndarray] = {}
    for node_id, raw in doc["positions"].items():
        if (not isinstance(raw, list) or len(raw) != 3
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw)
                or not all(math.isfinite(v) for v in raw)):
            raise ParseError(f"position of node {node_id!r} must be [x, y, z] finite numbers")
        positions[node_id] = np.array(raw, dtype=np.float64)
    params = None
    if isinstance(doc.get("params"), dict):
        params = params_from_json_dict(doc["params"])
    layout = Layout(
        positions,
        iterations_run=int(doc.get("iterations", 0)),
        converged=bool(doc.get("converged", False)),
    )
    return layout, params


def restrict_layout(layout: Layout, node_ids: Iterable[str]) -> Layout:
    """Layout containing only the given nodes (used when filtering)."""
    keep = set(node_ids)
    return Layout(
        {nid: p.copy() for nid, p in layout.positions.items() if nid in keep},
        layout.iterations_run, layout.converged, layout.final_max_displacement,
    )
