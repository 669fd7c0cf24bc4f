import type { TopoGraph } from "./types";

export interface ValidationError {
  path: string;
  message: string;
}

export type ValidationResult =
  | { ok: true; graph: TopoGraph }
  | { ok: false; error: ValidationError };

const NODE_KEYS = [
  "id",
  "kind",
  "row",
  "col",
  "linearity",
  "betti",
  "volume",
  "curve",
  "geometry",
];
const CURVE_KEYS = [
  "closed",
  "writhe",
  "jones",
  "knotted",
  "index",
  "segments",
  "length",
];
const EDGE_KEYS = ["kind", "a", "b", "linking", "containedNode"];
const NODE_KINDS = ["RegionNode", "CurveNode"];
const EDGE_KINDS = ["Adjacency", "Containment", "Membership", "Link"];
const LINEARITIES = ["Linear", "Planar"];

class Failure extends Error {
  constructor(
    public path: string,
    message: string,
  ) {
    super(message);
  }
}

function fail(path: string, message: string): never {
  throw new Failure(path, message);
}

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function requireKeys(obj: Record<string, unknown>, keys: string[], path: string): void {
  for (const key of keys) {
    if (!(key in obj)) fail(`${path}.${key}`, "missing required key");
  }
  for (const key of Object.keys(obj)) {
    if (!keys.includes(key)) fail(`${path}.${key}`, "unexpected key");
  }
}

function checkString(v: unknown, path: string): void {
  if (typeof v !== "string") fail(path, "expected a string");
}

function checkEnum(v: unknown, values: string[], path: string): void {
  if (typeof v !== "string" || !values.includes(v)) {
    fail(path, `expected one of ${values.join(", ")}`);
  }
}

function checkInt(v: unknown, path: string, min: number, max?: number): void {
  if (typeof v !== "number" || !Number.isInteger(v)) fail(path, "expected an integer");
  if (v < min || (max !== undefined && v > max)) {
    fail(path, `expected an integer in [${min}, ${max ?? "inf"}]`);
  }
}

function checkNumberOrNull(v: unknown, path: string): void {
  if (v !== null && typeof v !== "number") fail(path, "expected a number or null");
}

function checkStringOrNull(v: unknown, path: string): void {
  if (v !== null && typeof v !== "string") fail(path, "expected a string or null");
}

function checkCurve(v: unknown, path: string): void {
  if (v === null) return;
  if (!isRecord(v)) fail(path, "expected an object or null");
  requireKeys(v, CURVE_KEYS, path);
  if (typeof v.closed !== "boolean") fail(`${path}.closed`, "expected a boolean");
  checkNumberOrNull(v.writhe, `${path}.writhe`);
  checkStringOrNull(v.jones, `${path}.jones`);
  if (v.knotted !== null && typeof v.knotted !== "boolean") {
    fail(`${path}.knotted`, "expected a boolean or null");
  }
  checkStringOrNull(v.index, `${path}.index`);
  if (!Array.isArray(v.segments)) fail(`${path}.segments`, "expected an array");
  v.segments.forEach((seg: unknown, i: number) => {
    const segPath = `${path}.segments[${i}]`;
    if (!isRecord(seg)) fail(segPath, "expected an object");
    requireKeys(seg, ["class", "fraction"], segPath);
    checkString(seg.class, `${segPath}.class`);
    if (typeof seg.fraction !== "number") fail(`${segPath}.fraction`, "expected a number");
  });
  if (typeof v.length !== "number") fail(`${path}.length`, "expected a number");
}

function checkNode(v: unknown, path: string): void {
  if (!isRecord(v)) fail(path, "expected an object");
  requireKeys(v, NODE_KEYS, path);
  checkString(v.id, `${path}.id`);
  checkEnum(v.kind, NODE_KINDS, `${path}.kind`);
  checkInt(v.row, `${path}.row`, 0, 3);
  checkInt(v.col, `${path}.col`, 0);
  checkEnum(v.linearity, LINEARITIES, `${path}.linearity`);
  if (v.betti !== null) {
    if (!Array.isArray(v.betti) || v.betti.length !== 2) {
      fail(`${path}.betti`, "expected two integers or null");
    }
    v.betti.forEach((b: unknown, i: number) => checkInt(b, `${path}.betti[${i}]`, 0));
  }
  checkNumberOrNull(v.volume, `${path}.volume`);
  checkCurve(v.curve, `${path}.curve`);
  checkStringOrNull(v.geometry, `${path}.geometry`);
}

function checkEdge(v: unknown, path: string, ids: Set<string>): void {
  if (!isRecord(v)) fail(path, "expected an object");
  requireKeys(v, EDGE_KEYS, path);
  checkEnum(v.kind, EDGE_KINDS, `${path}.kind`);
  checkString(v.a, `${path}.a`);
  checkString(v.b, `${path}.b`);
  if (!ids.has(v.a as string)) fail(`${path}.a`, `unknown node id ${String(v.a)}`);
  if (!ids.has(v.b as string)) fail(`${path}.b`, `unknown node id ${String(v.b)}`);
  checkNumberOrNull(v.linking, `${path}.linking`);
  checkStringOrNull(v.containedNode, `${path}.containedNode`);
  if (v.containedNode !== null && v.containedNode !== v.a && v.containedNode !== v.b) {
    fail(`${path}.containedNode`, "must name one endpoint of the edge");
  }
}

/** Structural validation mirroring the serializer's schema, plus id references. */
export function validateGraph(data: unknown): ValidationResult {
  try {
    if (!isRecord(data)) fail("$", "expected a top-level object");
    requireKeys(data, ["version", "nodes", "edges"], "$");
    if (data.version !== "1") fail("$.version", 'expected "1"');
    if (!Array.isArray(data.nodes)) fail("$.nodes", "expected an array");
    if (!Array.isArray(data.edges)) fail("$.edges", "expected an array");
    const ids = new Set<string>();
    data.nodes.forEach((node: unknown, i: number) => {
      checkNode(node, `nodes[${i}]`);
      const id = (node as { id: string }).id;
      if (ids.has(id)) fail(`nodes[${i}].id`, `duplicate node id ${id}`);
      ids.add(id);
    });
    data.edges.forEach((edge: unknown, i: number) => checkEdge(edge, `edges[${i}]`, ids));
    return { ok: true, graph: data as unknown as TopoGraph };
  } catch (err) {
    if (err instanceof Failure) {
      return { ok: false, error: { path: err.path, message: err.message } };
    }
    throw err;
  }
}
