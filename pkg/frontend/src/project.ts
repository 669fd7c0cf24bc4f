import type { Bounds } from "./geometry";

/**
 * Orthographic projection of world points into panel coordinates. The
 * camera orbits the bounds center; depth is kept for painter's sorting.
 */
export class Camera {
  yaw = Math.PI / 6;
  pitch = Math.PI / 8;

  private center = [0, 0, 0];
  private scale = 1;
  private width = 1;
  private height = 1;

  fit(bounds: Bounds, width: number, height: number): void {
    this.width = width;
    this.height = height;
    this.center = [
      (bounds.min[0]! + bounds.max[0]!) / 2,
      (bounds.min[1]! + bounds.max[1]!) / 2,
      (bounds.min[2]! + bounds.max[2]!) / 2,
    ];
    const spans = [
      bounds.max[0]! - bounds.min[0]!,
      bounds.max[1]! - bounds.min[1]!,
      bounds.max[2]! - bounds.min[2]!,
    ];
    const radius = Math.max(Math.hypot(spans[0]!, spans[1]!, spans[2]!) / 2, 1e-9);
    this.scale = (0.42 * Math.min(width, height)) / radius;
  }

  /** Returns [x, y, depth]; larger depth is closer to the camera. */
  project(p: number[]): [number, number, number] {
    const x = p[0]! - this.center[0]!;
    const y = p[1]! - this.center[1]!;
    const z = p[2]! - this.center[2]!;
    const cy = Math.cos(this.yaw);
    const sy = Math.sin(this.yaw);
    const cp = Math.cos(this.pitch);
    const sp = Math.sin(this.pitch);
    const rx = cy * x + sy * z;
    const rz = -sy * x + cy * z;
    const ry = cp * y - sp * rz;
    const depth = sp * y + cp * rz;
    return [
      this.width / 2 + this.scale * rx,
      this.height / 2 - this.scale * ry,
      depth,
    ];
  }
}
