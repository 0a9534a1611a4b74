/** The viewer's single source of truth.
 *
 * Mirrors the service session: the graph document, the latest positions,
 * the last VisibleSubgraph the server returned (scene content must equal
 * that, always), the kind toggles, and the current selection. Rendering
 * and DOM code subscribe and react; nothing else holds state.
 */

import type {
  EdgeKindStyle,
  GraphDoc,
  GraphEdge,
  NodeDetails,
  Vec3,
} from "./types.js";
import { centroid, rotateAboutVertical, scaleAbout } from "./transforms.js";

export interface PanelState {
  details: NodeDetails;
  neighborIndex: number; // cycled with next/previous
}

export type Listener = () => void;

export class ViewerStore {
  graph: GraphDoc | null = null;
  kinds = new Map<string, EdgeKindStyle>();
  /** kinds that actually occur on edges, in first-seen order */
  presentKinds: string[] = [];
  enabledKinds = new Set<string>();

  /** base positions as delivered by the server (layout or snapshot) */
  positions = new Map<string, Vec3>();
  /** last filter response; null means "no filter applied yet" = all visible */
  visibleNodes: Set<string> | null = null;
  visibleEdges: Set<string> | null = null;

  selected: string | null = null;
  panel: PanelState | null = null;

  rotationAngle = 0;
  spacing = 1;
  labelRadiusFraction = 0.15;
  ghostHiddenNodes = false;

  private listeners = new Set<Listener>();

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  notify(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  loadGraph(doc: GraphDoc): void {
    this.graph = doc;
    this.kinds = new Map((doc.kinds ?? []).map((k) => [k.name, k]));
    this.presentKinds = [];
    for (const edge of doc.edges) {
      if (!this.presentKinds.includes(edge.kind)) {
        this.presentKinds.push(edge.kind);
      }
    }
    this.enabledKinds = new Set(this.presentKinds);
    this.visibleNodes = null;
    this.visibleEdges = null;
    this.selected = null;
    this.panel = null;
    this.notify();
  }

  edgeById(id: string): GraphEdge | undefined {
    return this.graph?.edges.find((e) => e.id === id);
  }

  /** Toggle a kind locally; the caller is responsible for posting the new
   * set to /api/filter and feeding the response into applyVisible. */
  setKindEnabled(kind: string, enabled: boolean): void {
    if (!this.presentKinds.includes(kind)) {
      throw new Error(`unknown edge kind: ${kind}`);
    }
    if (enabled) {
      this.enabledKinds.add(kind);
    } else {
      this.enabledKinds.delete(kind);
    }
    this.notify();
  }

  /** Install the server's visibility verdict (the scene must mirror it). */
  applyVisible(nodes: string[], edges: string[]): void {
    this.visibleNodes = new Set(nodes);
    this.visibleEdges = new Set(edges);
    if (this.selected !== null && !this.visibleNodes.has(this.selected)) {
      this.selected = null; // a selected node must stay visible
      this.panel = null;
    }
    this.notify();
  }

  clearFilter(): void {
    this.visibleNodes = null;
    this.visibleEdges = null;
    this.notify();
  }

  isNodeVisible(id: string): boolean {
    return this.visibleNodes === null || this.visibleNodes.has(id);
  }

  isEdgeVisible(id: string): boolean {
    return this.visibleEdges === null || this.visibleEdges.has(id);
  }

  setPositions(positions: Record<string, Vec3>): void {
    this.positions = new Map(Object.entries(positions));
    this.notify();
  }

  select(id: string | null): void {
    if (id !== null && !this.isNodeVisible(id)) {
      return; // picking something hidden keeps the old selection
    }
    this.selected = id;
    if (id === null) {
      this.panel = null;
    }
    this.notify();
  }

  showPanel(details: NodeDetails): void {
    this.panel = { details, neighborIndex: 0 };
    this.notify();
  }

  cycleNeighbor(step: 1 | -1): void {
    if (this.panel === null || this.panel.details.neighbors.length === 0) {
      return;
    }
    const count = this.panel.details.neighbors.length;
    this.panel.neighborIndex = (this.panel.neighborIndex + step + count) % count;
    this.notify();
  }

  currentNeighbor() {
    if (this.panel === null || this.panel.details.neighbors.length === 0) {
      return null;
    }
    return this.panel.details.neighbors[this.panel.neighborIndex];
  }

  setRotation(angle: number): void {
    this.rotationAngle = angle;
    this.notify();
  }

  setSpacing(factor: number): void {
    if (!(factor > 0)) {
      throw new Error(`spacing factor must be positive, got ${factor}`);
    }
    this.spacing = factor;
    this.notify();
  }

  /** Positions after the display transforms: vertical rotation, then node
   * spacing about the centroid. y-order of any two nodes never changes. */
  displayPositions(): Map<string, Vec3> {
    const pivot = centroid(this.positions.values());
    const rotatedPivot = rotateAboutVertical(pivot, this.rotationAngle);
    const out = new Map<string, Vec3>();
    for (const [id, p] of this.positions) {
      const rotated = rotateAboutVertical(p, this.rotationAngle);
      out.set(id, scaleAbout(rotated, this.spacing, rotatedPivot));
    }
    return out;
  }
}
