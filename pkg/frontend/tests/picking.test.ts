import { describe, expect, it } from "vitest";

import { pickNearest } from "../src/picking.js";

const ids = ["near", "far", "offside"];
// near at z=-5, far straight behind it at z=-15, offside out of the beam
const positions = new Float32Array([
  0, 0, -5,
  0, 0, -15,
  3, 0, -5,
]);

const forward = { origin: [0, 0, 0] as [number, number, number],
                  direction: [0, 0, -1] as [number, number, number] };

describe("pickNearest", () => {
  it("returns the closest intersected node", () => {
    expect(pickNearest(forward, ids, positions, 0.5)).toBe("near");
  });

  it("misses when nothing is inside the pick radius", () => {
    const ray = { origin: [0, 10, 0] as [number, number, number],
                  direction: [0, 1, 0] as [number, number, number] };
    expect(pickNearest(ray, ids, positions, 0.5)).toBeNull();
  });

  it("ignores nodes behind the ray origin", () => {
    const ray = { origin: [0, 0, -10] as [number, number, number],
                  direction: [0, 0, -1] as [number, number, number] };
    // "near" (z=-5) is behind this origin; "far" (z=-15) is ahead
    expect(pickNearest(ray, ids, positions, 0.5)).toBe("far");
  });

  it("a grazing ray within the radius still hits", () => {
    const ray = { origin: [0.4, 0, 0] as [number, number, number],
                  direction: [0, 0, -1] as [number, number, number] };
    expect(pickNearest(ray, ids, positions, 0.5)).toBe("near");
  });
});
