import type { CurvePolyline, TriMesh } from "./types";

/** Parses the OBJ subset written by the analyzer: v and f lines only. */
export function parseObj(text: string): TriMesh {
  const positions: number[][] = [];
  const triangles: number[][] = [];
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (line.startsWith("v ")) {
      const parts = line.slice(2).trim().split(/\s+/).map(Number);
      if (parts.length !== 3 || parts.some(Number.isNaN)) {
        throw new Error(`bad vertex line: ${line}`);
      }
      positions.push(parts);
    } else if (line.startsWith("f ")) {
      const parts = line
        .slice(2)
        .trim()
        .split(/\s+/)
        .map((p) => Number(p.split("/")[0]) - 1);
      if (parts.length !== 3 || parts.some((i) => !Number.isInteger(i) || i < 0)) {
        throw new Error(`bad face line: ${line}`);
      }
      triangles.push(parts);
    }
  }
  for (const tri of triangles) {
    for (const idx of tri) {
      if (idx >= positions.length) throw new Error(`face index ${idx + 1} out of range`);
    }
  }
  return { positions, triangles };
}

export function parseCurves(text: string): CurvePolyline[] {
  const data = JSON.parse(text) as { points: number[][]; closed: boolean }[];
  if (!Array.isArray(data)) throw new Error("curve file must hold an array");
  return data.map((entry, i) => {
    if (!Array.isArray(entry.points) || typeof entry.closed !== "boolean") {
      throw new Error(`curve ${i} needs points and closed`);
    }
    return { points: entry.points, closed: entry.closed };
  });
}

export interface Bounds {
  min: number[];
  max: number[];
}

export function emptyBounds(): Bounds {
  return {
    min: [Infinity, Infinity, Infinity],
    max: [-Infinity, -Infinity, -Infinity],
  };
}

export function growBounds(b: Bounds, points: number[][]): void {
  for (const p of points) {
    for (let k = 0; k < 3; k++) {
      const v = p[k]!;
      if (v < b.min[k]!) b.min[k] = v;
      if (v > b.max[k]!) b.max[k] = v;
    }
  }
}

export function boundsValid(b: Bounds): boolean {
  return b.min[0]! <= b.max[0]!;
}

function triangleKey(mesh: TriMesh, tri: number[]): string {
  const corner = (i: number): string => {
    const p = mesh.positions[i]!;
    return `${p[0]!.toFixed(9)},${p[1]!.toFixed(9)},${p[2]!.toFixed(9)}`;
  };
  return tri
    .map(corner)
    .sort()
    .join("|");
}

/**
 * Triangles present in both meshes by vertex position. Region boundaries
 * are serialized per region, so the sheet shared by two adjacent regions
 * is exactly the set of coincident triangles.
 */
export function sharedTriangles(a: TriMesh, b: TriMesh): TriMesh {
  const seen = new Set<string>();
  for (const tri of b.triangles) seen.add(triangleKey(b, tri));
  const positions: number[][] = [];
  const triangles: number[][] = [];
  for (const tri of a.triangles) {
    if (!seen.has(triangleKey(a, tri))) continue;
    const base = positions.length;
    for (const idx of tri) positions.push(a.positions[idx]!);
    triangles.push([base, base + 1, base + 2]);
  }
  return { positions, triangles };
}
