import { classColor, EDGE_STROKE, HIGHLIGHT, REGION_FILL } from "./colors";
import type { GraphNode, TopoGraph } from "./types";
import { edgeId } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";
const CELL_X = 110;
const CELL_Y = 96;
const MARGIN = 60;
const SQUARE = 56;
const RING_R = 20;

export interface GraphPanelOptions {
  onSelect?: (id: string) => void;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  return el;
}

function nodeCenter(node: GraphNode): [number, number] {
  return [MARGIN + node.col * CELL_X, MARGIN + node.row * CELL_Y];
}

function formatLinking(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(3);
}

function arcPath(
  cx: number,
  cy: number,
  r: number,
  a0: number,
  a1: number,
): string {
  const x0 = cx + r * Math.cos(a0);
  const y0 = cy + r * Math.sin(a0);
  const x1 = cx + r * Math.cos(a1);
  const y1 = cy + r * Math.sin(a1);
  const large = a1 - a0 > Math.PI ? 1 : 0;
  return `M ${x0} ${y0} A ${r} ${r} 0 ${large} 1 ${x1} ${y1}`;
}

function renderRegionNode(node: GraphNode, group: SVGGElement): void {
  const [cx, cy] = nodeCenter(node);
  group.appendChild(
    svgEl("rect", {
      x: String(cx - SQUARE / 2),
      y: String(cy - SQUARE / 2),
      width: String(SQUARE),
      height: String(SQUARE),
      fill: REGION_FILL[node.linearity],
      stroke: "#333",
      class: "region-square",
    }),
  );
  const [b1, b2] = node.betti ?? [0, 0];
  if (b1 === 0 && b2 === 0) return;
  // beta2 counts enclosed bubbles of the opposite linearity, so it sits
  // on the side of the square facing the other region row
  const b2Top = node.linearity === "Linear";
  const b2Y = b2Top ? cy - SQUARE / 4 : cy + SQUARE / 4;
  const b1Y = b2Top ? cy + SQUARE / 4 : cy - SQUARE / 4;
  const annotate = (
    value: number,
    y: number,
    cls: string,
    glyph: "ellipse" | "ellipsoid",
  ): void => {
    group.appendChild(
      svgEl("ellipse", {
        cx: String(cx - 10),
        cy: String(y),
        rx: "7",
        ry: "4",
        fill: glyph === "ellipsoid" ? "#555" : "none",
        stroke: "#333",
        class: `betti-glyph-${glyph}`,
      }),
    );
    const text = svgEl("text", {
      x: String(cx + 4),
      y: String(y + 4),
      "text-anchor": "start",
      class: cls,
      "data-value": String(value),
    });
    text.textContent = String(value);
    group.appendChild(text);
  };
  annotate(b1, b1Y, "betti-b1", "ellipse");
  annotate(b2, b2Y, "betti-b2", "ellipsoid");
}

function renderCurveNode(node: GraphNode, group: SVGGElement): void {
  const [cx, cy] = nodeCenter(node);
  const curve = node.curve;
  const closed = curve?.closed ?? true;
  const segments =
    curve && curve.segments.length > 0
      ? curve.segments
      : [{ class: "Unresolved", fraction: 1.0 }];
  // closed loops render as full rings, open curves as half rings
  const span = closed ? 2 * Math.PI : Math.PI;
  const start = closed ? -Math.PI / 2 : Math.PI;
  const total = segments.reduce((acc, s) => acc + s.fraction, 0) || 1;
  if (closed && segments.length === 1) {
    group.appendChild(
      svgEl("circle", {
        cx: String(cx),
        cy: String(cy),
        r: String(RING_R),
        fill: "none",
        "stroke-width": "4",
        stroke: classColor(node.linearity, segments[0]!.class),
        class: "curve-segment-arc",
        "data-class": segments[0]!.class,
      }),
    );
  } else {
    let angle = start;
    for (const seg of segments) {
      const sweep = (span * seg.fraction) / total;
      group.appendChild(
        svgEl("path", {
          d: arcPath(cx, cy, RING_R, angle, angle + sweep),
          fill: "none",
          "stroke-width": "4",
          stroke: classColor(node.linearity, seg.class),
          class: "curve-segment-arc",
          "data-class": seg.class,
        }),
      );
      angle += sweep;
    }
  }
  if (curve && curve.writhe !== null) {
    const text = svgEl("text", {
      x: String(cx),
      y: String(cy + 4),
      "text-anchor": "middle",
      class: "writhe-label",
    });
    text.textContent = curve.writhe.toFixed(2);
    group.appendChild(text);
  }
  if (curve && curve.knotted === true) {
    const mark = svgEl("text", {
      x: String(cx + RING_R + 4),
      y: String(cy - RING_R + 4),
      class: "knot-mark",
    });
    mark.textContent = "∗";
    group.appendChild(mark);
  }
}

/**
 * Renders the 2D topological graph: planar curves, planar regions,
 * linear regions, and linear curves on four rows, with adjacency,
 * containment, membership, and link edges between them.
 */
export function renderGraphPanel(
  graph: TopoGraph,
  container: HTMLElement,
  options: GraphPanelOptions = {},
): SVGSVGElement {
  const maxCol = graph.nodes.reduce((acc, n) => Math.max(acc, n.col), 0);
  const width = 2 * MARGIN + CELL_X * maxCol + SQUARE;
  const height = 2 * MARGIN + CELL_Y * 3 + SQUARE;
  const svg = svgEl("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
    class: "graph-panel",
  });

  const byId = new Map(graph.nodes.map((n) => [n.id, n]));
  const edgeLayer = svgEl("g", { class: "edge-layer" });
  svg.appendChild(edgeLayer);
  graph.edges.forEach((edge, i) => {
    const a = byId.get(edge.a);
    const b = byId.get(edge.b);
    if (!a || !b) return;
    const [ax, ay] = nodeCenter(a);
    const [bx, by] = nodeCenter(b);
    const group = svgEl("g", {
      class: `edge kind-${edge.kind.toLowerCase()}`,
      "data-edge-id": edgeId(i),
      "data-kind": edge.kind,
    });
    const line = svgEl("line", {
      x1: String(ax),
      y1: String(ay),
      x2: String(bx),
      y2: String(by),
      stroke: EDGE_STROKE,
      "stroke-width": edge.kind === "Membership" ? "1" : "2",
    });
    if (edge.kind === "Link") line.setAttribute("stroke-dasharray", "6 4");
    group.appendChild(line);
    const mx = (ax + bx) / 2;
    const my = (ay + by) / 2;
    if (edge.kind === "Containment") {
      group.appendChild(
        svgEl("rect", {
          x: String(mx - 9),
          y: String(my - 6),
          width: "18",
          height: "12",
          fill: "#fff",
          stroke: "#333",
          class: "containment-glyph",
        }),
      );
    }
    if (edge.kind === "Link" && edge.linking !== null) {
      const label = svgEl("text", {
        x: String(mx + 8),
        y: String(my - 6),
        class: "link-label-graph",
      });
      label.textContent = formatLinking(edge.linking);
      group.appendChild(label);
    }
    group.addEventListener("click", () => options.onSelect?.(edgeId(i)));
    edgeLayer.appendChild(group);
  });

  const nodeLayer = svgEl("g", { class: "node-layer" });
  svg.appendChild(nodeLayer);
  for (const node of graph.nodes) {
    const group = svgEl("g", {
      class: `node ${node.kind === "RegionNode" ? "region-node" : "curve-node"}`,
      "data-node-id": node.id,
      "data-kind": node.kind,
    });
    if (node.kind === "RegionNode") renderRegionNode(node, group);
    else renderCurveNode(node, group);
    group.addEventListener("click", () => options.onSelect?.(node.id));
    nodeLayer.appendChild(group);
  }

  container.appendChild(svg);
  return svg;
}

/** Applies the selected class to matching node and edge groups. */
export function applyGraphSelection(svg: SVGSVGElement, ids: Set<string>): void {
  for (const group of svg.querySelectorAll<SVGGElement>("[data-node-id]")) {
    group.classList.toggle("selected", ids.has(group.dataset.nodeId ?? ""));
  }
  for (const group of svg.querySelectorAll<SVGGElement>("[data-edge-id]")) {
    const selected = ids.has(group.dataset.edgeId ?? "");
    group.classList.toggle("selected", selected);
    const line = group.querySelector("line");
    if (line) line.setAttribute("stroke", selected ? HIGHLIGHT : EDGE_STROKE);
  }
}
