import { sharedTriangles } from "./geometry";
import { applyGraphSelection, renderGraphPanel } from "./graphpanel";
import { Scene, SceneError } from "./scene";
import type { FileProvider, GraphEdge, GraphNode } from "./types";
import { Viewport } from "./viewport";

function formatLinking(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(3);
}

/**
 * Ties the two panels together: loading an output directory renders the
 * topological graph and the domain outline, and selecting graph nodes
 * or edges reveals the matching geometry in the 3D panel.
 */
export class Viewer {
  private readonly banner: HTMLDivElement;
  private readonly graphContainer: HTMLDivElement;
  private readonly viewContainer: HTMLDivElement;
  private viewport: Viewport | null = null;
  private graphSvg: SVGSVGElement | null = null;
  private scene: Scene | null = null;
  private generation = 0;
  readonly selection = new Set<string>();

  constructor(private readonly root: HTMLElement) {
    this.banner = document.createElement("div");
    this.banner.className = "error-banner";
    this.banner.hidden = true;
    const panels = document.createElement("div");
    panels.className = "panels";
    this.graphContainer = document.createElement("div");
    this.graphContainer.className = "graph-container";
    this.viewContainer = document.createElement("div");
    this.viewContainer.className = "view-container";
    panels.appendChild(this.graphContainer);
    panels.appendChild(this.viewContainer);
    root.appendChild(this.banner);
    root.appendChild(panels);
  }

  private showError(message: string): void {
    this.banner.textContent = message;
    this.banner.hidden = false;
  }

  private reset(): void {
    this.banner.hidden = true;
    this.banner.textContent = "";
    this.graphContainer.textContent = "";
    this.viewContainer.textContent = "";
    this.graphSvg = null;
    this.viewport = null;
    this.scene = null;
    this.selection.clear();
    this.generation += 1;
  }

  async load(files: FileProvider): Promise<void> {
    this.reset();
    let scene: Scene;
    try {
      scene = await Scene.load(files);
    } catch (err) {
      this.showError(err instanceof SceneError ? err.message : String(err));
      return;
    }
    this.scene = scene;
    this.graphSvg = renderGraphPanel(scene.graph, this.graphContainer, {
      onSelect: (id) => {
        void this.select([id]);
      },
    });
    this.viewport = new Viewport(this.viewContainer);
    this.viewport.setBounds(scene.bounds);
  }

  private edgeIndex(id: string): number | null {
    const match = /^E(\d+)$/.exec(id);
    if (!match) return null;
    return Number(match[1]);
  }

  private checkIds(ids: string[]): void {
    const scene = this.scene;
    if (!scene) throw new SceneError("no output loaded");
    for (const id of ids) {
      const index = this.edgeIndex(id);
      if (index !== null) {
        scene.edge(index);
      } else {
        scene.node(id);
      }
    }
  }

  private async prepareRegion(
    node: GraphNode,
    opacity: number,
  ): Promise<() => void> {
    if (!this.scene || node.geometry === null) return () => undefined;
    const mesh = await this.scene.mesh(node.geometry);
    return () => this.viewport?.addRegionMesh(node.id, mesh, node.linearity, opacity);
  }

  private async prepareCurve(
    node: GraphNode,
    highlight: boolean,
  ): Promise<() => void> {
    if (!this.scene || node.geometry === null) return () => undefined;
    const polylines = await this.scene.curves(node.geometry);
    return () =>
      this.viewport?.addCurve(
        node.id,
        polylines,
        node.linearity,
        node.curve?.segments ?? null,
        highlight,
      );
  }

  private async prepareEdge(edge: GraphEdge): Promise<() => void> {
    const scene = this.scene;
    if (!scene) return () => undefined;
    const a = scene.node(edge.a);
    const b = scene.node(edge.b);
    if (edge.kind === "Adjacency") {
      const draws = [
        await this.prepareRegion(a, 0.25),
        await this.prepareRegion(b, 0.25),
      ];
      if (a.geometry !== null && b.geometry !== null) {
        const sheet = sharedTriangles(
          await scene.mesh(a.geometry),
          await scene.mesh(b.geometry),
        );
        draws.push(() => this.viewport?.addSheetMesh(sheet));
      }
      return () => draws.forEach((draw) => draw());
    }
    if (edge.kind === "Containment") {
      const inner = edge.containedNode === a.id ? a : b;
      const outer = inner === a ? b : a;
      const draws = [
        await this.prepareRegion(outer, 0.15),
        await this.prepareRegion(inner, 0.45),
      ];
      return () => draws.forEach((draw) => draw());
    }
    if (edge.kind === "Membership") {
      const region = a.kind === "RegionNode" ? a : b;
      const curve = region === a ? b : a;
      const draws = [
        await this.prepareRegion(region, 0.25),
        await this.prepareCurve(curve, false),
      ];
      return () => draws.forEach((draw) => draw());
    }
    const draws = [
      await this.prepareCurve(a, true),
      await this.prepareCurve(b, true),
    ];
    if (edge.linking !== null && a.geometry !== null && b.geometry !== null) {
      const starts: number[][] = [];
      for (const poly of await scene.curves(a.geometry)) {
        if (poly.points.length > 0) starts.push(poly.points[0]!);
      }
      for (const poly of await scene.curves(b.geometry)) {
        if (poly.points.length > 0) starts.push(poly.points[0]!);
      }
      const value = formatLinking(edge.linking);
      draws.push(() => this.viewport?.addLinkLabel(value, starts));
    }
    return () => draws.forEach((draw) => draw());
  }

  /** Replaces the selection; ids are node ids or edge ids of the form E<n>. */
  async select(ids: string[]): Promise<void> {
    this.checkIds(ids);
    const scene = this.scene!;
    this.selection.clear();
    for (const id of ids) this.selection.add(id);
    if (this.graphSvg) applyGraphSelection(this.graphSvg, this.selection);

    // resolve all geometry before drawing so a newer selection simply
    // discards this one instead of interleaving with it
    const generation = ++this.generation;
    const draws: (() => void)[] = [];
    for (const id of ids) {
      const index = this.edgeIndex(id);
      if (index !== null) {
        draws.push(await this.prepareEdge(scene.edge(index)));
      } else {
        const node = scene.node(id);
        if (node.kind === "RegionNode") {
          draws.push(await this.prepareRegion(node, 0.35));
        } else {
          draws.push(await this.prepareCurve(node, false));
        }
      }
    }
    if (generation !== this.generation || !this.viewport) return;
    this.viewport.clearContent();
    for (const draw of draws) draw();
  }
}
