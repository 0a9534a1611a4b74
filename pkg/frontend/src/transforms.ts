/** Display-space transforms. Both mirror the engine's documented math:
 * rotation stays locked to the vertical axis so the hierarchy reading of
 * the picture cannot flip, and "spacing" scales node positions about the
 * layout centroid instead of zooming the camera (global vs local view). */

import type { Vec3 } from "./types.js";

/** (x, y, z) -> (x cos a + z sin a, y, -x sin a + z cos a); y untouched. */
export function rotateAboutVertical(p: Vec3, angle: number): Vec3 {
  const c = Math.cos(angle);
  const s = Math.sin(angle);
  return [p[0] * c + p[2] * s, p[1], -p[0] * s + p[2] * c];
}

export function scaleAbout(p: Vec3, factor: number, pivot: Vec3): Vec3 {
  return [
    pivot[0] + factor * (p[0] - pivot[0]),
    pivot[1] + factor * (p[1] - pivot[1]),
    pivot[2] + factor * (p[2] - pivot[2]),
  ];
}

export function centroid(points: Iterable<Vec3>): Vec3 {
  let x = 0;
  let y = 0;
  let z = 0;
  let n = 0;
  for (const p of points) {
    x += p[0];
    y += p[1];
    z += p[2];
    n += 1;
  }
  return n === 0 ? [0, 0, 0] : [x / n, y / n, z / n];
}

export function distance(a: Vec3, b: Vec3): number {
  const dx = a[0] - b[0];
  const dy = a[1] - b[1];
  const dz = a[2] - b[2];
  return Math.sqrt(dx * dx + dy * dy + dz * dz);
}
