// Panel state and the config patches it emits. Pure helpers, unit-tested.

import type { ConfigPatch, RGBA } from './types.js';

export const ALL_KINDS = ['isa', 'partof', 'uses', 'templatearg'] as const;
export type KindName = (typeof ALL_KINDS)[number];

// scene documents carry snake_case kind names; checkboxes use the short ones
export const KIND_TO_DOC: Record<KindName, string> = {
  isa: 'is_a',
  partof: 'part_of',
  uses: 'uses',
  templatearg: 'template_arg',
};

export interface PanelState {
  grouping: string;
  orderBy: string;
  descending: boolean;
  enabledKinds: Set<KindName>;
  selectedEntity: string | null;
  revision: number;
  updateInFlight: boolean;
}

export function initialPanelState(): PanelState {
  return {
    grouping: 'ns',
    orderBy: 'loc',
    descending: true,
    enabledKinds: new Set(ALL_KINDS),
    selectedEntity: null,
    revision: 0,
    updateInFlight: false,
  };
}

export function toggleKindPatch(state: PanelState, kind: KindName, enabled: boolean): ConfigPatch {
  const kinds = new Set(state.enabledKinds);
  if (enabled) {
    kinds.add(kind);
  } else {
    kinds.delete(kind);
  }
  return { enabled_kinds: ALL_KINDS.filter((k) => kinds.has(k)) };
}

export function groupingPatch(spec: string): ConfigPatch {
  return { grouping: spec };
}

export function orderPatch(orderBy: string, descending: boolean): ConfigPatch {
  return { order_by: orderBy, descending };
}

export function palettePatch(field: string, color: RGBA): ConfigPatch {
  return { palette: { [field]: color } };
}

export function hexToRgba(hex: string, alpha = 1): RGBA {
  const value = hex.replace('#', '');
  return [
    parseInt(value.slice(0, 2), 16) / 255,
    parseInt(value.slice(2, 4), 16) / 255,
    parseInt(value.slice(4, 6), 16) / 255,
    alpha,
  ];
}

export function rgbaToHex(color: RGBA): string {
  const channel = (c: number) =>
    Math.max(0, Math.min(255, Math.round(c * 255)))
      .toString(16)
      .padStart(2, '0');
  return `#${channel(color[0])}${channel(color[1])}${channel(color[2])}`;
}
