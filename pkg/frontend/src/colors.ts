import type { Linearity } from "./types";

/** Linear regions are cyan, planar regions yellow. */
export const REGION_FILL: Record<Linearity, string> = {
  Linear: "#5bc8d4",
  Planar: "#e8c94a",
};

/**
 * Degenerate point classes on curves: linear wedge green, linear
 * trisector blue, planar wedge yellow, planar trisector red. Transition
 * points and unresolved stretches fall outside that scheme and render
 * in neutral grays.
 */
export function classColor(linearity: Linearity, cls: string): string {
  if (cls === "Wedge") return linearity === "Linear" ? "#3bab4a" : "#e8c94a";
  if (cls === "Trisector") return linearity === "Linear" ? "#3a6fd8" : "#d84a3a";
  if (cls === "Transition") return "#666666";
  return "#aaaaaa";
}

export const HIGHLIGHT = "#ff7f2a";
export const OUTLINE = "#444444";
export const EDGE_STROKE = "#777777";
