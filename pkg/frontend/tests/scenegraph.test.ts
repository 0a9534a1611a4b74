import { describe, expect, it } from "vitest";

import { darkShade, kindColor, lightShade, luminance, toUnit } from "../src/colors.js";
import { buildSceneModel } from "../src/scenegraph.js";
import { ViewerStore } from "../src/state.js";
import type { GraphDoc, Rgb } from "../src/types.js";

const doc: GraphDoc = {
  kinds: [
    { name: "import", color: [64, 64, 255] },
    { name: "view", color: [255, 140, 0] },
  ],
  nodes: [
    { id: "a", label: "A", uri: "u:a" },
    { id: "b", label: "B", uri: "u:b" },
    { id: "c", label: "C", uri: "u:c" },
  ],
  edges: [
    { id: "e1", from: "a", to: "b", kind: "import", uri: "u:e1" },
    { id: "e2", from: "b", to: "c", kind: "view", uri: "u:e2" },
  ],
};

function loadedStore(): ViewerStore {
  const store = new ViewerStore();
  store.loadGraph(doc);
  store.setPositions({ a: [0, 0, 0], b: [4, 1, 0], c: [0, 2, 3] });
  return store;
}

const CAMERA: [number, number, number] = [0, 0, 20];

describe("scene model", () => {
  it("draws exactly the visible node and edge sets", () => {
    const store = loadedStore();
    let model = buildSceneModel(store, CAMERA);
    expect(model.nodeIds).toEqual(["a", "b", "c"]);
    expect(model.edgeIds).toEqual(["e1", "e2"]);

    store.applyVisible(["a", "b"], ["e1"]);
    model = buildSceneModel(store, CAMERA);
    expect(model.nodeIds).toEqual(["a", "b"]);
    expect(model.edgeIds).toEqual(["e1"]);
    expect(model.ghostNodeIds).toEqual([]);
  });

  it("an empty store yields an empty scene without crashing", () => {
    const store = new ViewerStore();
    store.loadGraph({ nodes: [], edges: [] });
    const model = buildSceneModel(store, CAMERA);
    expect(model.nodeIds).toEqual([]);
    expect(model.edgeIds).toEqual([]);
    expect(model.edgeSegments.length).toBe(0);
  });

  it("edge segments connect the endpoint display positions", () => {
    const store = loadedStore();
    const model = buildSceneModel(store, CAMERA);
    const display = store.displayPositions();
    const i = model.edgeIds.indexOf("e1");
    expect([...model.edgeSegments.slice(i * 6, i * 6 + 3)]).toEqual(
      [...display.get("a")!],
    );
    expect([...model.edgeSegments.slice(i * 6 + 3, i * 6 + 6)]).toEqual(
      [...display.get("b")!],
    );
  });

  it("edge endpoint indices point at the right drawn nodes", () => {
    const store = loadedStore();
    const model = buildSceneModel(store, CAMERA);
    for (const [i, edgeId] of model.edgeIds.entries()) {
      const edge = doc.edges.find((e) => e.id === edgeId)!;
      expect(model.nodeIds[model.edgeNodeIndices[i * 2]]).toBe(edge.from);
      expect(model.nodeIds[model.edgeNodeIndices[i * 2 + 1]]).toBe(edge.to);
    }
  });

  it("every edge fades from a light source shade to a dark target shade of its kind color", () => {
    const store = loadedStore();
    const model = buildSceneModel(store, CAMERA);
    for (const [i, edgeId] of model.edgeIds.entries()) {
      const edge = doc.edges.find((e) => e.id === edgeId)!;
      const base = kindColor(store.kinds, edge.kind);
      const source = [...model.edgeColors.slice(i * 6, i * 6 + 3)] as Rgb;
      const target = [...model.edgeColors.slice(i * 6 + 3, i * 6 + 6)] as Rgb;
      // exact expected shades
      expect(source.map((v) => +v.toFixed(6))).toEqual(
        toUnit(lightShade(base)).map((v) => +v.toFixed(6)),
      );
      expect(target.map((v) => +v.toFixed(6))).toEqual(
        toUnit(darkShade(base)).map((v) => +v.toFixed(6)),
      );
      // and the reading: lighter at the source, darker at the target
      expect(luminance(source)).toBeGreaterThan(luminance(target));
    }
  });

  it("toggling a kind off and on restores the exact prior edge set", () => {
    const store = loadedStore();
    const before = buildSceneModel(store, CAMERA).edgeIds;

    store.setKindEnabled("view", false);
    // what the service would answer for {enabledKinds: ["import"]}
    store.applyVisible(["a", "b", "c"], ["e1"]);
    const filtered = buildSceneModel(store, CAMERA).edgeIds;
    expect(filtered).toEqual(["e1"]);

    store.setKindEnabled("view", true);
    store.applyVisible(["a", "b", "c"], ["e1", "e2"]);
    const restored = buildSceneModel(store, CAMERA).edgeIds;
    expect(restored).toEqual(before);
  });

  it("ghost mode renders hidden nodes separately without touching visible sets", () => {
    const store = loadedStore();
    store.ghostHiddenNodes = true;
    store.applyVisible(["a"], []);
    const model = buildSceneModel(store, CAMERA);
    expect(model.nodeIds).toEqual(["a"]);
    expect(model.ghostNodeIds.sort()).toEqual(["b", "c"]);
    expect(model.ghostPositions.length).toBe(6);
  });

  it("labels appear only within the culling radius of the camera", () => {
    const store = loadedStore();
    store.labelRadiusFraction = 10; // radius far beyond the layout: all labelled
    let model = buildSceneModel(store, [0, 0, 0]);
    expect(model.labelVisible).toEqual(["a", "b", "c"]);

    store.labelRadiusFraction = 0.5;
    model = buildSceneModel(store, [0, 0, 0]); // camera at the origin, near a
    expect(model.labelVisible).toContain("a");
    expect(model.labelVisible).not.toContain("b");
    expect(model.labelRadius).toBeCloseTo(0.5 * model.boundingRadius, 12);
  });

  it("highlights the selected node", () => {
    const store = loadedStore();
    store.select("b");
    const model = buildSceneModel(store, CAMERA);
    const a = [...model.nodeColors.slice(0, 3)];
    const b = [...model.nodeColors.slice(3, 6)];
    expect(b).not.toEqual(a);
  });
});
