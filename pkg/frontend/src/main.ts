/** App bootstrap: fetch the graph, wire the store to the renderer and the
 * control panel, and translate UI events into API calls. */

import { ApiClient } from "./api.js";
import { LayoutPlayback } from "./playback.js";
import { buildSceneModel } from "./scenegraph.js";
import { ViewerStore } from "./state.js";
import { GraphRenderer } from "./renderer.js";
import type { FilterSpecDoc, FocusDoc } from "./types.js";

const api = new ApiClient("");
const store = new ViewerStore();

const canvasHost = document.getElementById("scene")!;
const renderer = new GraphRenderer(canvasHost);
const playback = new LayoutPlayback(api, store, () => renderReadout());

const el = (id: string) => document.getElementById(id)!;

function labelTexts(): Map<string, string> {
  const texts = new Map<string, string>();
  for (const node of store.graph?.nodes ?? []) {
    texts.set(node.id, node.label);
  }
  return texts;
}

let framed = false;

function redraw(): void {
  const model = buildSceneModel(store, renderer.cameraPosition());
  renderer.apply(model, labelTexts());
  if (!framed && model.boundingRadius > 0) {
    renderer.frame(model.boundingRadius);
    framed = true;
  }
  renderPanel();
  renderKindToggles();
}

store.subscribe(redraw);

// ---------------------------------------------------------------------------
// Filters

async function pushFilter(): Promise<void> {
  const spec: FilterSpecDoc = { enabledKinds: [...store.enabledKinds] };
  const focusMode = (el("focus-mode") as HTMLSelectElement).value;
  if (focusMode !== "none" && store.selected !== null) {
    const focus: FocusDoc = {
      node: store.selected,
      mode: focusMode as FocusDoc["mode"],
    };
    if (focusMode === "neighborhood") {
      focus.k = Number((el("focus-k") as HTMLInputElement).value) || 1;
    }
    spec.focus = focus;
  }
  const visible = await api.applyFilter(spec);
  store.applyVisible(visible.visibleNodes, visible.visibleEdges);
}

function renderKindToggles(): void {
  const host = el("kind-toggles");
  if (host.childElementCount === store.presentKinds.length) {
    return; // checkboxes already built; their checked state is the source
  }
  host.replaceChildren();
  for (const kind of store.presentKinds) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = store.enabledKinds.has(kind);
    box.addEventListener("change", () => {
      store.setKindEnabled(kind, box.checked);
      void pushFilter();
    });
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    const color = store.kinds.get(kind)?.color ?? [160, 160, 160];
    swatch.style.background = `rgb(${color[0]},${color[1]},${color[2]})`;
    label.append(box, swatch, kind);
    host.appendChild(label);
  }
}

// ---------------------------------------------------------------------------
// Selection panel

function renderPanel(): void {
  const panel = el("panel");
  if (store.panel === null) {
    panel.classList.add("hidden");
    return;
  }
  panel.classList.remove("hidden");
  const { details } = store.panel;
  el("panel-label").textContent = details.label;
  const uri = el("panel-uri") as HTMLAnchorElement;
  uri.textContent = details.uri;
  uri.href = details.detailsUrl ?? "#";
  const neighbor = store.currentNeighbor();
  el("panel-neighbor").textContent = neighbor
    ? `${neighbor.direction === "incoming" ? "←" : "→"} ` +
      `${neighbor.nodeId} (${neighbor.edgeKind}, ` +
      `${store.panel.neighborIndex + 1}/${details.neighbors.length})`
    : "no neighbors";
}

canvasHost.addEventListener("click", (event) => {
  const id = renderer.pick(event as MouseEvent);
  store.select(id);
  if (id !== null) {
    void api.nodeDetails(id).then((details) => store.showPanel(details));
  }
});

el("neighbor-next").addEventListener("click", () => store.cycleNeighbor(1));
el("neighbor-prev").addEventListener("click", () => store.cycleNeighbor(-1));
el("panel-uri").addEventListener("click", (event) => {
  event.preventDefault();
  const url = store.panel?.details.detailsUrl;
  if (url) {
    window.open(url, "_blank", "noopener");
  }
});

// ---------------------------------------------------------------------------
// Layout job controls

function renderReadout(): void {
  el("readout").textContent =
    playback.readout.state === "idle"
      ? "no layout yet"
      : `${playback.readout.state} | iteration ${playback.readout.iteration}` +
        (playback.readout.maxDisplacement !== null
          ? ` | max step ${playback.readout.maxDisplacement.toExponential(2)}`
          : "") +
        (playback.readout.error ? ` | ${playback.readout.error}` : "");
}

el("run-layout").addEventListener("click", () => {
  const seed = Number((el("seed") as HTMLInputElement).value) || 0;
  framed = false; // re-frame the camera once positions arrive
  void playback.start({ seed }).catch((err) => {
    el("readout").textContent = String(err);
  });
});

el("stop-layout").addEventListener("click", () => void playback.stop());

// ---------------------------------------------------------------------------
// View controls

el("rotation").addEventListener("input", () => {
  store.setRotation(Number((el("rotation") as HTMLInputElement).value));
});
el("spacing").addEventListener("input", () => {
  store.setSpacing(Number((el("spacing") as HTMLInputElement).value));
});
el("label-radius").addEventListener("input", () => {
  store.labelRadiusFraction = Number((el("label-radius") as HTMLInputElement).value);
  store.notify();
});
el("ghost-hidden").addEventListener("change", () => {
  store.ghostHiddenNodes = (el("ghost-hidden") as HTMLInputElement).checked;
  store.notify();
});
el("reset-camera").addEventListener("click", () => renderer.resetCamera());
el("focus-mode").addEventListener("change", () => void pushFilter());
el("focus-k").addEventListener("change", () => void pushFilter());
el("clear-filter").addEventListener("click", () => {
  (el("focus-mode") as HTMLSelectElement).value = "none";
  for (const input of el("kind-toggles").querySelectorAll("input")) {
    (input as HTMLInputElement).checked = true;
  }
  store.enabledKinds = new Set(store.presentKinds);
  void pushFilter();
});

// ---------------------------------------------------------------------------

async function boot(): Promise<void> {
  const graph = await api.graph();
  store.loadGraph(graph);
  renderReadout();
  // fetch any layout computed earlier in this session
  try {
    const status = await api.jobStatus("job-1");
    if (status.layout) {
      store.setPositions(status.layout.positions);
    }
  } catch {
    // no prior job; the scene stays empty until one is started
  }
}

void boot();
