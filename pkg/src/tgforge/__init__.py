"""tgforge: hierarchical force-directed 3D layout and exploration of
typed theory graphs (imports, views and friends), with filtering
operations, a CLI, an HTTP service and a browser viewer."""

from .errors import EngineError, InputError, IntegrityError, ParseError, TGForgeError
from .graph_model import (
    EdgeKind,
    GraphEdge,
    GraphNode,
    TheoryGraph,
    ValidationReport,
    parse_graph,
    serialize_graph,
    structurally_equal,
    validate,
)
from .graph_ops import (
    DistanceCutoff,
    FilterSpec,
    FocusSpec,
    VisibleSubgraph,
    apply_filter_spec,
    distance_cutoff_filter,
    filter_by_kinds,
    neighborhood_subgraph,
    reachable_subgraph,
    rotate_about_vertical,
    scale_positions,
)
from .layout_engine import (
    Layout,
    LayoutMetrics,
    LayoutParams,
    LayoutProgress,
    initial_placement,
    layout_metrics,
    run_layout,
    step,
)
from .spatial_index import OctreeIndex, approx_repulsion, build_octree, exact_repulsion

__version__ = "0.1.0"
