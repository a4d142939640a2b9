import { ApiClient, ApiError } from './api.js';
import { buildPanel, showEntity, showGrouping, showStatus, showSummary } from './panel.js';
import { createView, frameCity, pickEntity, showSpec } from './render.js';
import {
  groupingPatch,
  hexToRgba,
  initialPanelState,
  orderPatch,
  palettePatch,
  toggleKindPatch,
} from './state.js';
import { toRenderSpec } from './transform.js';
import type { ConfigPatch } from './types.js';

const api = new ApiClient();
const state = initialPanelState();

const canvas = document.querySelector<HTMLCanvasElement>('#city')!;
const sidebar = document.querySelector<HTMLElement>('#sidebar')!;
const view = createView(canvas);

async function refreshScene(reframe = false): Promise<void> {
  const doc = await api.fetchScene();
  const spec = toRenderSpec(doc);
  showSpec(view, spec);
  if (reframe) {
    frameCity(view, spec);
  }
}

async function refreshGrouping(): Promise<void> {
  showGrouping(sidebar, await api.fetchGrouping());
}

// one in-flight update at a time; the scene swap happens after the server
// confirms the new revision, so the view never shows a half-applied config
async function applyPatch(send: () => Promise<{ revision: number }>): Promise<void> {
  if (state.updateInFlight) {
    return;
  }
  state.updateInFlight = true;
  showStatus(sidebar, 'updating...');
  try {
    const { revision } = await send();
    state.revision = revision;
    await refreshScene();
    await refreshGrouping();
    showStatus(sidebar, `revision ${revision}`);
  } catch (error) {
    if (error instanceof ApiError) {
      showStatus(sidebar, `rejected: ${JSON.stringify(error.detail)}`, true);
    } else {
      showStatus(sidebar, 'server unreachable, showing stale data', true);
    }
  } finally {
    state.updateInFlight = false;
  }
}

const sendConfig = (patch: ConfigPatch) => applyPatch(() => api.updateConfig(patch));

buildPanel(sidebar, state, {
  onGrouping: (spec) => {
    state.grouping = spec;
    void sendConfig(groupingPatch(spec));
  },
  onRecluster: (algorithm) => {
    state.grouping = `recovered:${algorithm}`;
    void applyPatch(() => api.recluster(algorithm));
  },
  onOrder: (orderBy, descending) => {
    state.orderBy = orderBy;
    state.descending = descending;
    void sendConfig(orderPatch(orderBy, descending));
  },
  onKindToggle: (kind, enabled) => {
    const patch = toggleKindPatch(state, kind, enabled);
    if (enabled) {
      state.enabledKinds.add(kind);
    } else {
      state.enabledKinds.delete(kind);
    }
    void sendConfig(patch);
  },
  onPodColor: (hex) => {
    void sendConfig(palettePatch('pod_color', hexToRgba(hex)));
  },
});

canvas.addEventListener('click', (event) => {
  const entity = pickEntity(view, event.clientX, event.clientY);
  state.selectedEntity = entity;
  if (entity === null) {
    showEntity(sidebar, null);
    return;
  }
  api
    .fetchEntity(entity)
    .then((detail) => showEntity(sidebar, detail))
    .catch(() => showStatus(sidebar, 'entity fetch failed, showing stale data', true));
});

function animate(): void {
  requestAnimationFrame(animate);
  view.controls.update();
  view.renderer.render(view.scene, view.camera);
}

async function boot(): Promise<void> {
  try {
    showSummary(sidebar, await api.fetchSummary());
    await refreshScene(true);
    await refreshGrouping();
    showStatus(sidebar, `revision ${state.revision}`);
  } catch (error) {
    showStatus(sidebar, `failed to load scene: ${error}`, true);
  }
  animate();
}

void boot();
