/** Wire formats of the tgforge HTTP API (see the server README for details). */

export type Vec3 = [number, number, number];
export type Rgb = [number, number, number];

export interface GraphNode {
  id: string;
  label: string;
  uri: string;
  detailsUrl?: string;
}

export interface GraphEdge {
  id: string;
  from: string;
  to: string;
  kind: string;
  uri: string;
}

export interface EdgeKindStyle {
  name: string;
  color: Rgb;
  hierarchyWeight?: number;
  attractionWeight?: number;
}

export interface GraphDoc {
  kinds?: EdgeKindStyle[];
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface VisibleSubgraph {
  visibleNodes: string[];
  visibleEdges: string[];
}

export type JobState = "pending" | "running" | "converged" | "stopped" | "failed";

/** One server-sent event from /api/layout/{id}/events. */
export interface ProgressEvent {
  jobId: string;
  state: JobState;
  iteration?: number;
  iterations?: number;
  maxDisplacement?: number;
  meanEdgeLength?: number;
  converged?: boolean;
  error?: string;
  positions?: Record<string, Vec3>;
}

export interface JobStatus {
  id: string;
  state: JobState;
  iteration?: number;
  maxDisplacement?: number;
  meanEdgeLength?: number;
  converged?: boolean;
  iterations?: number;
  error?: string;
  layout?: {
    positions: Record<string, Vec3>;
    converged: boolean;
    iterations: number;
  };
}

export interface NeighborRef {
  nodeId: string;
  edgeKind: string;
  direction: "incoming" | "outgoing";
  edgeId: string;
}

export interface NodeDetails {
  id: string;
  label: string;
  uri: string;
  detailsUrl: string | null;
  neighbors: NeighborRef[];
}

export interface FocusDoc {
  node: string;
  mode: "reachable" | "coreachable" | "neighborhood";
  k?: number;
}

export interface FilterSpecDoc {
  enabledKinds?: string[];
  focus?: FocusDoc | null;
  cutoff?: { center: Vec3; radius: number } | null;
}

export interface LayoutParamsDoc {
  idealEdgeLength?: number;
  kRepel?: number;
  kAttract?: number;
  kHierarchy?: number;
  theta?: number;
  maxIterations?: number;
  convergenceEps?: number;
  initialTemperature?: number;
  coolingFactor?: number;
  seed?: number;
  minDistance?: number;
}
