/** three.js wiring: instanced node markers, one batched LineSegments
 * geometry for every edge (vertex colors carry the direction gradient),
 * HTML overlay labels for nearby nodes, orbit camera. Everything it draws
 * comes from a SceneModel; it owns no graph state of its own.
 *
 * Node positions animate: each frame the displayed coordinates chase the
 * model's targets, so successive layout snapshots play back as a smooth
 * settling motion instead of jumps; edge segments follow their endpoint
 * nodes through the per-edge endpoint indices in the model. */

import * as THREE from "three";
import { OrbitControls } from "three/addons/controls/OrbitControls.js";

import type { SceneModel } from "./scenegraph.js";
import { ghostColorUnit } from "./scenegraph.js";
import type { Vec3 } from "./types.js";

const NODE_RADIUS = 0.18;
const LERP_ALPHA = 0.18; // fraction of the remaining distance per frame

export class GraphRenderer {
  readonly camera: THREE.PerspectiveCamera;
  private scene = new THREE.Scene();
  private renderer: THREE.WebGLRenderer;
  private controls: OrbitControls;
  private nodes: THREE.InstancedMesh | null = null;
  private ghosts: THREE.InstancedMesh | null = null;
  private edges: THREE.LineSegments | null = null;
  private labelLayer: HTMLDivElement;
  private labels = new Map<string, HTMLDivElement>();
  private model: SceneModel | null = null;
  private displayed: Float32Array = new Float32Array(0);
  private animating = false;
  private raycaster = new THREE.Raycaster();
  private homePose: { position: THREE.Vector3; target: THREE.Vector3 };

  constructor(private container: HTMLElement) {
    this.renderer = new THREE.WebGLRenderer({ antialias: true });
    this.renderer.setPixelRatio(window.devicePixelRatio);
    this.renderer.setClearColor(0x10131a);
    container.appendChild(this.renderer.domElement);

    this.camera = new THREE.PerspectiveCamera(55, 1, 0.01, 5000);
    this.camera.position.set(0, 4, 18);
    this.controls = new OrbitControls(this.camera, this.renderer.domElement);
    this.controls.enableDamping = true;
    this.homePose = {
      position: this.camera.position.clone(),
      target: this.controls.target.clone(),
    };

    this.scene.add(new THREE.AmbientLight(0xffffff, 0.9));
    const key = new THREE.DirectionalLight(0xffffff, 1.2);
    key.position.set(5, 10, 7);
    this.scene.add(key);

    this.labelLayer = document.createElement("div");
    this.labelLayer.className = "label-layer";
    container.appendChild(this.labelLayer);

    this.resize();
    window.addEventListener("resize", () => this.resize());
    this.renderer.setAnimationLoop(() => {
      this.controls.update();
      this.animate();
      this.renderer.render(this.scene, this.camera);
      this.updateLabels();
    });
  }

  cameraPosition(): Vec3 {
    return [this.camera.position.x, this.camera.position.y, this.camera.position.z];
  }

  resetCamera(): void {
    this.camera.position.copy(this.homePose.position);
    this.controls.target.copy(this.homePose.target);
    this.controls.update();
  }

  /** Fit the home pose to the layout extent and jump the camera there. */
  frame(boundingRadius: number): void {
    const d = Math.max(6, boundingRadius * 2.4);
    this.homePose = {
      position: new THREE.Vector3(0, boundingRadius * 0.4, d),
      target: new THREE.Vector3(0, 0, 0),
    };
    this.resetCamera();
  }

  /** Pick the nearest node instance under a pointer event. */
  pick(event: PointerEvent | MouseEvent): string | null {
    if (this.nodes === null || this.model === null) {
      return null;
    }
    const rect = this.renderer.domElement.getBoundingClientRect();
    const ndc = new THREE.Vector2(
      ((event.clientX - rect.left) / rect.width) * 2 - 1,
      -(((event.clientY - rect.top) / rect.height) * 2 - 1),
    );
    this.raycaster.setFromCamera(ndc, this.camera);
    const hits = this.raycaster.intersectObject(this.nodes, false);
    const hit = hits.find((h: THREE.Intersection) => h.instanceId !== undefined);
    return hit ? this.model.nodeIds[hit.instanceId!] : null;
  }

  apply(model: SceneModel, labelTexts: Map<string, string>): void {
    // carry over displayed coordinates for nodes that persist, so new
    // targets animate from where the node is currently drawn
    const carried = new Float32Array(model.nodePositions);
    if (this.model !== null) {
      const oldIndex = new Map(this.model.nodeIds.map((id, i) => [id, i]));
      model.nodeIds.forEach((id, i) => {
        const previous = oldIndex.get(id);
        if (previous !== undefined) {
          carried[i * 3] = this.displayed[previous * 3];
          carried[i * 3 + 1] = this.displayed[previous * 3 + 1];
          carried[i * 3 + 2] = this.displayed[previous * 3 + 2];
        }
      });
    }
    this.displayed = carried;
    this.model = model;
    this.animating = true;
    this.rebuildNodes(model);
    this.rebuildEdges(model);
    this.rebuildLabels(model, labelTexts);
    this.writePositions();
  }

  /** Advance displayed positions toward the model's targets. */
  private animate(): void {
    if (!this.animating || this.model === null) {
      return;
    }
    const target = this.model.nodePositions;
    let worst = 0;
    for (let i = 0; i < this.displayed.length; i++) {
      const delta = target[i] - this.displayed[i];
      this.displayed[i] += delta * LERP_ALPHA;
      worst = Math.max(worst, Math.abs(delta));
    }
    if (worst < 1e-4 * (1 + this.model.boundingRadius)) {
      this.displayed.set(target);
      this.animating = false;
    }
    this.writePositions();
  }

  /** Push displayed coordinates into instance matrices and edge buffers. */
  private writePositions(): void {
    const model = this.model;
    if (model === null) {
      return;
    }
    if (this.nodes !== null) {
      const matrix = new THREE.Matrix4();
      for (let i = 0; i < model.nodeIds.length; i++) {
        matrix.setPosition(
          this.displayed[i * 3],
          this.displayed[i * 3 + 1],
          this.displayed[i * 3 + 2],
        );
        this.nodes.setMatrixAt(i, matrix);
      }
      this.nodes.instanceMatrix.needsUpdate = true;
    }
    if (this.edges !== null) {
      const attr = this.edges.geometry.getAttribute("position") as THREE.BufferAttribute;
      const segments = attr.array as Float32Array;
      for (let e = 0; e < model.edgeIds.length; e++) {
        const s = model.edgeNodeIndices[e * 2] * 3;
        const t = model.edgeNodeIndices[e * 2 + 1] * 3;
        segments[e * 6] = this.displayed[s];
        segments[e * 6 + 1] = this.displayed[s + 1];
        segments[e * 6 + 2] = this.displayed[s + 2];
        segments[e * 6 + 3] = this.displayed[t];
        segments[e * 6 + 4] = this.displayed[t + 1];
        segments[e * 6 + 5] = this.displayed[t + 2];
      }
      attr.needsUpdate = true;
    }
  }

  private rebuildNodes(model: SceneModel): void {
    this.nodes?.geometry.dispose();
    if (this.nodes) this.scene.remove(this.nodes);
    this.ghosts?.geometry.dispose();
    if (this.ghosts) this.scene.remove(this.ghosts);

    this.nodes = this.makeInstances(model.nodeIds.length, model.nodePositions,
      (i, color) => color.fromArray(model.nodeColors, i * 3), 1.0);
    if (this.nodes) this.scene.add(this.nodes);

    const ghostUnit = ghostColorUnit();
    this.ghosts = this.makeInstances(model.ghostNodeIds.length, model.ghostPositions,
      (_i, color) => color.setRGB(ghostUnit[0], ghostUnit[1], ghostUnit[2]), 0.35);
    if (this.ghosts) this.scene.add(this.ghosts);
  }

  private makeInstances(
    count: number,
    positions: Float32Array,
    colorize: (index: number, color: THREE.Color) => void,
    opacity: number,
  ): THREE.InstancedMesh | null {
    if (count === 0) {
      return null;
    }
    const geometry = new THREE.SphereGeometry(NODE_RADIUS, 16, 12);
    const material = new THREE.MeshLambertMaterial({
      transparent: opacity < 1,
      opacity,
    });
    const mesh = new THREE.InstancedMesh(geometry, material, count);
    const matrix = new THREE.Matrix4();
    const color = new THREE.Color();
    for (let i = 0; i < count; i++) {
      matrix.setPosition(positions[i * 3], positions[i * 3 + 1], positions[i * 3 + 2]);
      mesh.setMatrixAt(i, matrix);
      colorize(i, color);
      mesh.setColorAt(i, color);
    }
    mesh.instanceMatrix.needsUpdate = true;
    if (mesh.instanceColor) mesh.instanceColor.needsUpdate = true;
    return mesh;
  }

  private rebuildEdges(model: SceneModel): void {
    this.edges?.geometry.dispose();
    if (this.edges) this.scene.remove(this.edges);
    this.edges = null;
    if (model.edgeIds.length === 0) {
      return;
    }
    const geometry = new THREE.BufferGeometry();
    geometry.setAttribute(
      "position",
      new THREE.BufferAttribute(new Float32Array(model.edgeSegments), 3),
    );
    geometry.setAttribute("color", new THREE.BufferAttribute(model.edgeColors, 3));
    const material = new THREE.LineBasicMaterial({ vertexColors: true });
    this.edges = new THREE.LineSegments(geometry, material);
    this.scene.add(this.edges);
  }

  private rebuildLabels(model: SceneModel, texts: Map<string, string>): void {
    this.labelLayer.replaceChildren();
    this.labels.clear();
    for (const id of model.labelVisible) {
      const div = document.createElement("div");
      div.className = "node-label";
      div.textContent = texts.get(id) ?? id;
      this.labelLayer.appendChild(div);
      this.labels.set(id, div);
    }
  }

  private updateLabels(): void {
    if (this.model === null || this.labels.size === 0) {
      return;
    }
    const rect = this.renderer.domElement.getBoundingClientRect();
    const v = new THREE.Vector3();
    for (const [id, div] of this.labels) {
      const i = this.model.nodeIds.indexOf(id);
      if (i === -1) continue;
      v.set(
        this.displayed[i * 3],
        this.displayed[i * 3 + 1],
        this.displayed[i * 3 + 2],
      ).project(this.camera);
      const behind = v.z > 1;
      div.style.display = behind ? "none" : "block";
      if (!behind) {
        div.style.left = `${((v.x + 1) / 2) * rect.width}px`;
        div.style.top = `${((1 - v.y) / 2) * rect.height}px`;
      }
    }
  }

  private resize(): void {
    const w = this.container.clientWidth || 800;
    const h = this.container.clientHeight || 600;
    this.renderer.setSize(w, h);
    this.camera.aspect = w / h;
    this.camera.updateProjectionMatrix();
  }
}
