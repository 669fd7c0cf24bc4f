import type { Bounds } from "./geometry";
import {
  emptyBounds,
  growBounds,
  parseCurves,
  parseObj,
} from "./geometry";
import { validateGraph } from "./validate";
import type {
  CurvePolyline,
  FileProvider,
  GraphEdge,
  GraphNode,
  TopoGraph,
  TriMesh,
} from "./types";

export class SceneError extends Error {
  constructor(
    message: string,
    public readonly path: string | null = null,
  ) {
    super(message);
  }
}

/**
 * Immutable snapshot of one analysis output: the validated graph, the
 * domain bounds, and a lazy geometry cache keyed by the file paths
 * recorded on the nodes. The scene never writes back to the provider.
 */
export class Scene {
  private readonly meshCache = new Map<string, Promise<TriMesh>>();
  private readonly curveCache = new Map<string, Promise<CurvePolyline[]>>();

  private constructor(
    readonly graph: TopoGraph,
    readonly bounds: Bounds,
    private readonly files: FileProvider,
  ) {}

  static async load(files: FileProvider): Promise<Scene> {
    let text: string;
    try {
      text = await files.read("graph.json");
    } catch (err) {
      throw new SceneError(`cannot read graph.json: ${String(err)}`);
    }
    let data: unknown;
    try {
      data = JSON.parse(text);
    } catch (err) {
      throw new SceneError(`graph.json is not valid JSON: ${String(err)}`);
    }
    const result = validateGraph(data);
    if (!result.ok) {
      throw new SceneError(
        `graph.json: ${result.error.path}: ${result.error.message}`,
        result.error.path,
      );
    }
    const scene = new Scene(result.graph, emptyBounds(), files);
    // region boundaries jointly cover the domain, so their extent is the
    // domain outline; curves stay lazy until a selection needs them
    for (const node of result.graph.nodes) {
      if (node.kind !== "RegionNode" || node.geometry === null) continue;
      const mesh = await scene.mesh(node.geometry);
      growBounds(scene.bounds, mesh.positions);
    }
    return scene;
  }

  node(id: string): GraphNode {
    const found = this.graph.nodes.find((n) => n.id === id);
    if (!found) throw new SceneError(`unknown node id ${id}`);
    return found;
  }

  edge(index: number): GraphEdge {
    const found = this.graph.edges[index];
    if (!found) throw new SceneError(`unknown edge index ${index}`);
    return found;
  }

  mesh(path: string): Promise<TriMesh> {
    let cached = this.meshCache.get(path);
    if (!cached) {
      cached = this.files.read(path).then(parseObj);
      this.meshCache.set(path, cached);
    }
    return cached;
  }

  curves(path: string): Promise<CurvePolyline[]> {
    let cached = this.curveCache.get(path);
    if (!cached) {
      cached = this.files.read(path).then(parseCurves);
      this.curveCache.set(path, cached);
    }
    return cached;
  }
}
