export type Linearity = "Linear" | "Planar";
export type NodeKind = "RegionNode" | "CurveNode";
export type EdgeKind = "Adjacency" | "Containment" | "Membership" | "Link";

export interface CurveSegment {
  class: string;
  fraction: number;
}

export interface CurveInfo {
  closed: boolean;
  writhe: number | null;
  jones: string | null;
  knotted: boolean | null;
  index: string | null;
  segments: CurveSegment[];
  length: number;
}

export interface GraphNode {
  id: string;
  kind: NodeKind;
  row: number;
  col: number;
  linearity: Linearity;
  betti: [number, number] | null;
  volume: number | null;
  curve: CurveInfo | null;
  geometry: string | null;
}

export interface GraphEdge {
  kind: EdgeKind;
  a: string;
  b: string;
  linking: number | null;
  containedNode: string | null;
}

export interface TopoGraph {
  version: "1";
  nodes: GraphNode[];
  edges: GraphEdge[];
}

/** Identifier for an edge in viewer selections; edges carry no id in the file. */
export function edgeId(index: number): string {
  return `E${index}`;
}

export interface TriMesh {
  positions: number[][];
  triangles: number[][];
}

export interface CurvePolyline {
  points: number[][];
  closed: boolean;
}

/** Abstracts the output directory: paths are relative, contents are text. */
export interface FileProvider {
  read(path: string): Promise<string>;
}
