/** Pure scene-model builder: turns store state into the typed arrays the
 * renderer uploads, and doubles as the introspection hook tests use to
 * assert what is actually drawn. No WebGL, no DOM.
 *
 * Drawn content mirrors the server's last VisibleSubgraph exactly; when
 * ghost mode is on, hidden nodes come back as a separate dimmed list so
 * the visible sets stay untouched. All edges live in one batched segment
 * array with per-vertex colors: a light shade of the kind color at the
 * source fading to a dark shade at the target encodes direction. */

import { darkShade, GHOST_COLOR, kindColor, lightShade, toUnit } from "./colors.js";
import type { Rgb, Vec3 } from "./types.js";
import { distance } from "./transforms.js";
import type { ViewerStore } from "./state.js";

export const NODE_COLOR: Rgb = [210, 215, 225];
export const SELECTED_COLOR: Rgb = [255, 235, 59];

export interface SceneModel {
  nodeIds: string[];
  nodePositions: Float32Array; // 3 floats per node
  nodeColors: Float32Array; // 3 floats per node, 0..1
  ghostNodeIds: string[];
  ghostPositions: Float32Array;
  edgeIds: string[];
  /** 6 floats per edge: source xyz, target xyz (single batched geometry) */
  edgeSegments: Float32Array;
  /** 2 ints per edge: endpoint indices into nodeIds, so the renderer can
   * recompute segments while animating node positions between snapshots */
  edgeNodeIndices: Int32Array;
  /** 6 floats per edge: source rgb (light), target rgb (dark), 0..1 */
  edgeColors: Float32Array;
  /** node ids whose labels are shown (within the culling radius) */
  labelVisible: string[];
  boundingRadius: number;
  labelRadius: number;
}

export function buildSceneModel(store: ViewerStore, cameraPos: Vec3): SceneModel {
  const graph = store.graph;
  const display = store.displayPositions();
  if (graph === null || display.size === 0) {
    return emptyModel();
  }

  const nodeIds: string[] = [];
  const ghostNodeIds: string[] = [];
  for (const node of graph.nodes) {
    if (!display.has(node.id)) {
      continue;
    }
    if (store.isNodeVisible(node.id)) {
      nodeIds.push(node.id);
    } else if (store.ghostHiddenNodes) {
      ghostNodeIds.push(node.id);
    }
  }

  const nodePositions = new Float32Array(nodeIds.length * 3);
  const nodeColors = new Float32Array(nodeIds.length * 3);
  let boundingRadius = 0;
  nodeIds.forEach((id, i) => {
    const p = display.get(id)!;
    nodePositions.set(p, i * 3);
    boundingRadius = Math.max(boundingRadius, Math.hypot(p[0], p[1], p[2]));
    const unit = toUnit(id === store.selected ? SELECTED_COLOR : NODE_COLOR);
    nodeColors.set(unit, i * 3);
  });

  const ghostPositions = new Float32Array(ghostNodeIds.length * 3);
  ghostNodeIds.forEach((id, i) => ghostPositions.set(display.get(id)!, i * 3));

  const drawnNodes = new Set(nodeIds);
  const edgeIds: string[] = [];
  for (const edge of graph.edges) {
    if (
      store.isEdgeVisible(edge.id) &&
      drawnNodes.has(edge.from) &&
      drawnNodes.has(edge.to)
    ) {
      edgeIds.push(edge.id);
    }
  }

  const nodeIndex = new Map(nodeIds.map((id, i) => [id, i]));
  const edgeSegments = new Float32Array(edgeIds.length * 6);
  const edgeNodeIndices = new Int32Array(edgeIds.length * 2);
  const edgeColors = new Float32Array(edgeIds.length * 6);
  edgeIds.forEach((id, i) => {
    const edge = graph.edges.find((e) => e.id === id)!;
    edgeSegments.set(display.get(edge.from)!, i * 6);
    edgeSegments.set(display.get(edge.to)!, i * 6 + 3);
    edgeNodeIndices[i * 2] = nodeIndex.get(edge.from)!;
    edgeNodeIndices[i * 2 + 1] = nodeIndex.get(edge.to)!;
    const base = kindColor(store.kinds, edge.kind);
    edgeColors.set(toUnit(lightShade(base)), i * 6);
    edgeColors.set(toUnit(darkShade(base)), i * 6 + 3);
  });

  const labelRadius = store.labelRadiusFraction * boundingRadius;
  const labelVisible = nodeIds.filter(
    (id) => distance(display.get(id)!, cameraPos) <= labelRadius,
  );

  return {
    nodeIds,
    nodePositions,
    nodeColors,
    ghostNodeIds,
    ghostPositions,
    edgeIds,
    edgeSegments,
    edgeNodeIndices,
    edgeColors,
    labelVisible,
    boundingRadius,
    labelRadius,
  };
}

export function ghostColorUnit(): Rgb {
  return toUnit(GHOST_COLOR);
}

function emptyModel(): SceneModel {
  return {
    nodeIds: [],
    nodePositions: new Float32Array(0),
    nodeColors: new Float32Array(0),
    ghostNodeIds: [],
    ghostPositions: new Float32Array(0),
    edgeIds: [],
    edgeSegments: new Float32Array(0),
    edgeNodeIndices: new Int32Array(0),
    edgeColors: new Float32Array(0),
    labelVisible: [],
    boundingRadius: 0,
    labelRadius: 0,
  };
}
