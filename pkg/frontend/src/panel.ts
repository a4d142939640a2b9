// Configuration sidebar and entity-detail panel (plain DOM, no framework).

import type { EntityDetail, GroupingDoc, ModelSummary } from './types.js';
import { ALL_KINDS, KindName, PanelState } from './state.js';

export interface PanelHooks {
  onGrouping(spec: string): void;
  onRecluster(algorithm: 'lp' | 'greedy'): void;
  onOrder(orderBy: string, descending: boolean): void;
  onKindToggle(kind: KindName, enabled: boolean): void;
  onPodColor(hex: string): void;
}

const KIND_LABELS: Record<KindName, string> = {
  isa: 'inheritance (is-a)',
  partof: 'containment (part-of)',
  uses: 'usage (pointer/ref)',
  templatearg: 'template arguments',
};

export function buildPanel(root: HTMLElement, state: PanelState, hooks: PanelHooks): void {
  root.innerHTML = `
    <h1>code city</h1>
    <div id="summary" class="muted"></div>
    <label>grouping
      <select id="grouping">
        <option value="ns">namespaces</option>
        <option value="recovered:lp">recovered (label propagation)</option>
        <option value="recovered:greedy">recovered (modularity)</option>
      </select>
    </label>
    <div id="quality" class="muted"></div>
    <label>order blocks by
      <select id="order">
        <option value="loc">lines of code</option>
        <option value="classes">class count</option>
        <option value="commits">total commits</option>
        <option value="contributors">contributors</option>
        <option value="age">summative age</option>
      </select>
    </label>
    <label><input type="checkbox" id="descending" checked> descending</label>
    <fieldset id="kinds"><legend>dependency links</legend></fieldset>
    <label>POD color <input type="color" id="podcolor" value="#ff0000"></label>
    <div id="status" class="muted"></div>
    <div id="detail"></div>
  `;

  const groupingSelect = root.querySelector<HTMLSelectElement>('#grouping')!;
  groupingSelect.value = state.grouping;
  groupingSelect.addEventListener('change', () => {
    const value = groupingSelect.value;
    if (value.startsWith('recovered:')) {
      hooks.onRecluster(value.split(':')[1] as 'lp' | 'greedy');
    } else {
      hooks.onGrouping(value);
    }
  });

  const orderSelect = root.querySelector<HTMLSelectElement>('#order')!;
  const descendingBox = root.querySelector<HTMLInputElement>('#descending')!;
  orderSelect.value = state.orderBy;
  descendingBox.checked = state.descending;
  const emitOrder = () => hooks.onOrder(orderSelect.value, descendingBox.checked);
  orderSelect.addEventListener('change', emitOrder);
  descendingBox.addEventListener('change', emitOrder);

  const kindsBox = root.querySelector<HTMLElement>('#kinds')!;
  for (const kind of ALL_KINDS) {
    const label = document.createElement('label');
    const input = document.createElement('input');
    input.type = 'checkbox';
    input.checked = state.enabledKinds.has(kind);
    input.addEventListener('change', () => hooks.onKindToggle(kind, input.checked));
    label.append(input, ` ${KIND_LABELS[kind]}`);
    kindsBox.append(label);
  }

  const podColor = root.querySelector<HTMLInputElement>('#podcolor')!;
  podColor.addEventListener('change', () => hooks.onPodColor(podColor.value));
}

export function showSummary(root: HTMLElement, summary: ModelSummary): void {
  root.querySelector('#summary')!.textContent =
    `${summary.class_count} classes, ${summary.method_count} methods, ` +
    `${summary.package_count} packages`;
}

export function showGrouping(root: HTMLElement, grouping: GroupingDoc): void {
  const quality =
    grouping.quality === null ? '' : ` Q=${grouping.quality.toFixed(3)}`;
  root.querySelector('#quality')!.textContent =
    `${grouping.groups.length} blocks (${grouping.mode}${quality})`;
}

export function showStatus(root: HTMLElement, text: string, isError = false): void {
  const status = root.querySelector<HTMLElement>('#status')!;
  status.textContent = text;
  status.className = isError ? 'error' : 'muted';
}

function metricRows(metrics: Record<string, number> | undefined): string {
  if (!metrics) {
    return '';
  }
  return Object.entries(metrics)
    .map(([key, value]) => `<tr><td>${key}</td><td>${value}</td></tr>`)
    .join('');
}

export function showEntity(root: HTMLElement, detail: EntityDetail | null): void {
  const box = root.querySelector<HTMLElement>('#detail')!;
  if (!detail) {
    box.innerHTML = '';
    return;
  }
  const title = detail.qualified_name ?? detail.label ?? detail.name ?? detail.id;
  const subtitle =
    detail.kind === 'method' ? `${detail.access} method of ${detail.class_name}` : detail.kind;
  const smells = (detail.smells ?? [])
    .map((s) => `<li>${s.predicate} (severity ${s.severity.toFixed(2)})</li>`)
    .join('');
  box.innerHTML = `
    <h2>${title}</h2>
    <div class="muted">${subtitle}</div>
    <table>${metricRows(detail.metrics)}</table>
    ${smells ? `<h3>smells</h3><ul>${smells}</ul>` : ''}
  `;
}
