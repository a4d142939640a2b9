// three.js scene construction from a RenderSpec: box meshes, two-segment
// link lines, lights, orbit controls. Rebuilt wholesale on every refresh
// (scene swaps are atomic; no incremental diffing).

import * as THREE from 'three';
import { OrbitControls } from 'three/examples/jsm/controls/OrbitControls.js';
import type { BoxSpec, RenderSpec } from './transform.js';

export interface CityView {
  scene: THREE.Scene;
  camera: THREE.PerspectiveCamera;
  renderer: THREE.WebGLRenderer;
  controls: OrbitControls;
  pickables: THREE.Mesh[];
  dispose(): void;
}

function boxMesh(spec: BoxSpec): THREE.Mesh {
  const geometry = new THREE.BoxGeometry(spec.size[0], spec.size[1], spec.size[2]);
  const [r, g, b, a] = spec.color;
  const material = new THREE.MeshLambertMaterial({
    color: new THREE.Color(r, g, b),
    transparent: a < 1,
    opacity: a,
  });
  if (spec.illumination > 0) {
    material.emissive = new THREE.Color(r, g, b);
    material.emissiveIntensity = spec.illumination;
  }
  const mesh = new THREE.Mesh(geometry, material);
  mesh.position.set(spec.position[0], spec.position[1], spec.position[2]);
  mesh.visible = spec.visible;
  mesh.userData = { entity: spec.entity, nodeId: spec.id, kind: spec.kind };
  return mesh;
}

export function createView(canvas: HTMLCanvasElement): CityView {
  const scene = new THREE.Scene();
  scene.background = new THREE.Color(0x10141c);

  const camera = new THREE.PerspectiveCamera(
    50,
    window.innerWidth / window.innerHeight,
    0.1,
    5000,
  );
  camera.position.set(30, 40, -60);

  const renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
  renderer.setSize(window.innerWidth, window.innerHeight);
  renderer.setPixelRatio(window.devicePixelRatio);

  const controls = new OrbitControls(camera, renderer.domElement);
  controls.enableDamping = true;

  const ambient = new THREE.AmbientLight(0xffffff, 0.65);
  const sun = new THREE.DirectionalLight(0xffffff, 1.4);
  sun.position.set(80, 140, -60);
  scene.add(ambient, sun);

  const view: CityView = {
    scene,
    camera,
    renderer,
    controls,
    pickables: [],
    dispose() {
      renderer.dispose();
      controls.dispose();
    },
  };

  window.addEventListener('resize', () => {
    camera.aspect = window.innerWidth / window.innerHeight;
    camera.updateProjectionMatrix();
    renderer.setSize(window.innerWidth, window.innerHeight);
  });

  return view;
}

const CITY_GROUP = 'city';

export function showSpec(view: CityView, spec: RenderSpec): void {
  const previous = view.scene.getObjectByName(CITY_GROUP);
  if (previous) {
    previous.traverse((obj) => {
      const mesh = obj as THREE.Mesh;
      mesh.geometry?.dispose?.();
      (mesh.material as THREE.Material | undefined)?.dispose?.();
    });
    view.scene.remove(previous);
  }

  const group = new THREE.Group();
  group.name = CITY_GROUP;
  view.pickables = [];
  for (const box of spec.boxes) {
    const mesh = boxMesh(box);
    group.add(mesh);
    if (box.pickable) {
      view.pickables.push(mesh);
    }
  }

  for (const segment of spec.segments) {
    const geometry = new THREE.BufferGeometry().setFromPoints([
      new THREE.Vector3(...segment.start),
      new THREE.Vector3(...segment.end),
    ]);
    const [r, g, b] = segment.color;
    const material = new THREE.LineBasicMaterial({ color: new THREE.Color(r, g, b) });
    const line = new THREE.Line(geometry, material);
    line.userData = { linkId: segment.linkId, kind: segment.kind };
    group.add(line);
  }
  view.scene.add(group);
}

export function frameCity(view: CityView, spec: RenderSpec): void {
  const { min, max } = spec.bounds;
  const center = new THREE.Vector3(
    (min[0] + max[0]) / 2,
    0,
    (min[2] + max[2]) / 2,
  );
  const span = Math.max(max[0] - min[0], max[2] - min[2], 10);
  view.controls.target.copy(center);
  view.camera.position.set(center.x, span * 0.9, center.z - span * 1.1);
  view.controls.update();
}

export function pickEntity(
  view: CityView,
  clientX: number,
  clientY: number,
): string | null {
  const pointer = new THREE.Vector2(
    (clientX / window.innerWidth) * 2 - 1,
    -(clientY / window.innerHeight) * 2 + 1,
  );
  const raycaster = new THREE.Raycaster();
  raycaster.setFromCamera(pointer, view.camera);
  const hits = raycaster.intersectObjects(view.pickables, false);
  if (!hits.length) {
    return null;
  }
  return (hits[0].object.userData.entity as string) ?? null;
}
