/** Ray/sphere picking math, kept free of three.js so it can be tested
 * headless. The renderer builds the ray from the mouse event and camera. */

import type { Vec3 } from "./types.js";

export interface PickRay {
  origin: Vec3;
  direction: Vec3; // must be normalized
}

/** Nearest node (by hit distance along the ray) whose bounding sphere of
 * the given radius intersects the ray; null when nothing is hit. */
export function pickNearest(
  ray: PickRay,
  nodeIds: string[],
  positions: Float32Array,
  radius: number,
): string | null {
  let best: string | null = null;
  let bestT = Infinity;
  const r2 = radius * radius;
  const [ox, oy, oz] = ray.origin;
  const [dx, dy, dz] = ray.direction;
  for (let i = 0; i < nodeIds.length; i++) {
    const px = positions[i * 3] - ox;
    const py = positions[i * 3 + 1] - oy;
    const pz = positions[i * 3 + 2] - oz;
    const t = px * dx + py * dy + pz * dz;
    if (t < 0 || t >= bestT) {
      continue; // behind the camera, or a farther hit than the current best
    }
    const off2 = px * px + py * py + pz * pz - t * t;
    if (off2 <= r2) {
      best = nodeIds[i];
      bestT = t;
    }
  }
  return best;
}
