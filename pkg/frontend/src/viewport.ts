import { classColor, HIGHLIGHT, OUTLINE, REGION_FILL } from "./colors";
import type { Bounds } from "./geometry";
import { boundsValid } from "./geometry";
import { Camera } from "./project";
import type { CurvePolyline, CurveSegment, Linearity, TriMesh } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";
const PANEL_W = 640;
const PANEL_H = 520;
const MAX_TRIANGLES = 6000;

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  return el;
}

interface SegmentRun {
  cls: string;
  points: number[][];
}

function polylineLength(points: number[][]): number {
  let total = 0;
  for (let i = 1; i < points.length; i++) {
    const a = points[i - 1]!;
    const b = points[i]!;
    total += Math.hypot(b[0]! - a[0]!, b[1]! - a[1]!, b[2]! - a[2]!);
  }
  return total;
}

function lerp(a: number[], b: number[], t: number): number[] {
  return [
    a[0]! + t * (b[0]! - a[0]!),
    a[1]! + t * (b[1]! - a[1]!),
    a[2]! + t * (b[2]! - a[2]!),
  ];
}

/** Splits a polyline into per-class runs at arc-length fractions. */
export function splitByFractions(
  points: number[][],
  closed: boolean,
  segments: CurveSegment[],
): SegmentRun[] {
  const pts = closed && points.length > 1 ? [...points, points[0]!] : points;
  const total = polylineLength(pts);
  if (total <= 0 || segments.length === 0) {
    return [{ cls: segments[0]?.class ?? "Unresolved", points: pts }];
  }
  const fracTotal = segments.reduce((acc, s) => acc + s.fraction, 0) || 1;
  const runs: SegmentRun[] = [];
  let segIdx = 0;
  let segEnd = (total * segments[0]!.fraction) / fracTotal;
  let walked = 0;
  let current: number[][] = [pts[0]!];
  for (let i = 1; i < pts.length; i++) {
    let a = pts[i - 1]!;
    const b = pts[i]!;
    let step = Math.hypot(b[0]! - a[0]!, b[1]! - a[1]!, b[2]! - a[2]!);
    while (
      segIdx < segments.length - 1 &&
      walked + step >= segEnd &&
      step > 0
    ) {
      const t = (segEnd - walked) / step;
      const cut = lerp(a, b, t);
      current.push(cut);
      runs.push({ cls: segments[segIdx]!.class, points: current });
      current = [cut];
      walked = segEnd;
      step = Math.hypot(b[0]! - cut[0]!, b[1]! - cut[1]!, b[2]! - cut[2]!);
      a = cut;
      segIdx += 1;
      segEnd += (total * segments[segIdx]!.fraction) / fracTotal;
    }
    walked += step;
    current.push(b);
  }
  runs.push({ cls: segments[segIdx]!.class, points: current });
  return runs.filter((r) => r.points.length >= 2);
}

/**
 * SVG rendering of the 3D content: an orthographic projection with
 * painter's sorting, which keeps the panel testable without a GPU.
 */
export class Viewport {
  readonly svg: SVGSVGElement;
  private readonly camera = new Camera();
  private readonly outlineLayer: SVGGElement;
  private readonly contentLayer: SVGGElement;
  private bounds: Bounds | null = null;

  constructor(container: HTMLElement) {
    this.svg = svgEl("svg", {
      viewBox: `0 0 ${PANEL_W} ${PANEL_H}`,
      width: String(PANEL_W),
      height: String(PANEL_H),
      class: "view-panel",
    });
    this.outlineLayer = svgEl("g", { class: "outline-layer" });
    this.contentLayer = svgEl("g", { class: "content-layer" });
    this.svg.appendChild(this.outlineLayer);
    this.svg.appendChild(this.contentLayer);
    container.appendChild(this.svg);
  }

  setBounds(bounds: Bounds): void {
    this.outlineLayer.textContent = "";
    if (!boundsValid(bounds)) {
      this.bounds = null;
      return;
    }
    this.bounds = bounds;
    this.camera.fit(bounds, PANEL_W, PANEL_H);
    const { min, max } = bounds;
    const corners = [
      [min[0]!, min[1]!, min[2]!],
      [max[0]!, min[1]!, min[2]!],
      [max[0]!, max[1]!, min[2]!],
      [min[0]!, max[1]!, min[2]!],
      [min[0]!, min[1]!, max[2]!],
      [max[0]!, min[1]!, max[2]!],
      [max[0]!, max[1]!, max[2]!],
      [min[0]!, max[1]!, max[2]!],
    ];
    const boxEdges = [
      [0, 1], [1, 2], [2, 3], [3, 0],
      [4, 5], [5, 6], [6, 7], [7, 4],
      [0, 4], [1, 5], [2, 6], [3, 7],
    ];
    for (const [i, j] of boxEdges) {
      const a = this.camera.project(corners[i!]!);
      const b = this.camera.project(corners[j!]!);
      this.outlineLayer.appendChild(
        svgEl("line", {
          x1: String(a[0]),
          y1: String(a[1]),
          x2: String(b[0]),
          y2: String(b[1]),
          stroke: OUTLINE,
          "stroke-width": "1",
          class: "domain-outline",
        }),
      );
    }
  }

  clearContent(): void {
    this.contentLayer.textContent = "";
  }

  private renderMesh(
    mesh: TriMesh,
    fill: string,
    opacity: number,
    cssClass: string,
    dataId: string | null,
  ): void {
    const projected = mesh.positions.map((p) => this.camera.project(p));
    const order = mesh.triangles
      .map((tri, i) => {
        const depth =
          (projected[tri[0]!]![2] + projected[tri[1]!]![2] + projected[tri[2]!]![2]) / 3;
        return { i, depth };
      })
      .sort((a, b) => a.depth - b.depth);
    const stride = Math.max(1, Math.ceil(order.length / MAX_TRIANGLES));
    const group = svgEl("g", { class: cssClass });
    if (dataId !== null) group.setAttribute("data-region-id", dataId);
    for (let k = 0; k < order.length; k += stride) {
      const tri = mesh.triangles[order[k]!.i]!;
      const pts = tri
        .map((idx) => {
          const q = projected[idx]!;
          return `${q[0]},${q[1]}`;
        })
        .join(" ");
      group.appendChild(
        svgEl("polygon", {
          points: pts,
          fill,
          "fill-opacity": String(opacity),
          stroke: "none",
        }),
      );
    }
    this.contentLayer.appendChild(group);
  }

  addRegionMesh(
    id: string,
    mesh: TriMesh,
    linearity: Linearity,
    opacity = 0.35,
  ): void {
    this.renderMesh(mesh, REGION_FILL[linearity], opacity, "region-geom", id);
  }

  addSheetMesh(mesh: TriMesh): void {
    this.renderMesh(mesh, "#9a5bd4", 0.85, "shared-sheet", null);
  }

  addCurve(
    id: string,
    polylines: CurvePolyline[],
    linearity: Linearity,
    segments: CurveSegment[] | null,
    highlight: boolean,
  ): void {
    const group = svgEl("g", { class: "curve-group", "data-curve-id": id });
    for (const poly of polylines) {
      const pts = poly.closed && poly.points.length > 1
        ? [...poly.points, poly.points[0]!]
        : poly.points;
      const coords = pts
        .map((p) => {
          const q = this.camera.project(p);
          return `${q[0]},${q[1]}`;
        })
        .join(" ");
      const base = svgEl("polyline", {
        points: coords,
        fill: "none",
        stroke: highlight ? HIGHLIGHT : "#222",
        "stroke-width": highlight ? "5" : "3",
        class: highlight ? "curve-geom highlight" : "curve-geom",
      });
      group.appendChild(base);
    }
    if (segments !== null && polylines.length === 1) {
      const runs = splitByFractions(
        polylines[0]!.points,
        polylines[0]!.closed,
        segments,
      );
      for (const run of runs) {
        const coords = run.points
          .map((p) => {
            const q = this.camera.project(p);
            return `${q[0]},${q[1]}`;
          })
          .join(" ");
        group.appendChild(
          svgEl("polyline", {
            points: coords,
            fill: "none",
            stroke: classColor(linearity, run.cls),
            "stroke-width": "2",
            class: "curve-segment",
            "data-class": run.cls,
          }),
        );
      }
    }
    this.contentLayer.appendChild(group);
  }

  addLinkLabel(value: string, near: number[][]): void {
    let sx = 0;
    let sy = 0;
    for (const p of near) {
      const q = this.camera.project(p);
      sx += q[0];
      sy += q[1];
    }
    const n = Math.max(near.length, 1);
    const label = svgEl("text", {
      x: String(sx / n),
      y: String(sy / n),
      class: "link-label",
      "text-anchor": "middle",
    });
    label.textContent = value;
    this.contentLayer.appendChild(label);
  }
}
