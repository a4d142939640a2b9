// Wire types for the scene/analysis API. The scene document is consumed
// verbatim: the viewer never recomputes layout or metrics.

export type Vec3 = [number, number, number];
export type RGBA = [number, number, number, number];

export type NodeKind = 'block' | 'building' | 'floor' | 'window';

export interface SceneNodeDoc {
  id: string;
  kind: NodeKind;
  entity: string;
  position: Vec3;
  size: Vec3;
  color: RGBA;
  material: string | null;
  texture: string | null;
  illumination: number;
}

export interface SceneLinkDoc {
  id: string;
  referrer: string;
  referent: string;
  kind: string;
  polyline: Vec3[];
  first_half_color: RGBA;
  second_half_color: RGBA;
}

export interface SceneDoc {
  nodes: SceneNodeDoc[];
  links: SceneLinkDoc[];
}

export interface GroupingDoc {
  mode: string;
  quality: number | null;
  groups: { id: string; label: string; members: string[] }[];
  revision: number;
}

export interface ModelSummary {
  package_count: number;
  class_count: number;
  method_count: number;
  file_count: number;
  reference_time: number;
  has_repo_stats: boolean;
  revision: number;
}

export interface SmellDoc {
  id: string;
  predicate: string;
  subject: { class_id?: string; method_id?: string; pair?: string[] };
  severity: number;
  evidence: Record<string, number>;
}

export interface ConfigPatch {
  grouping?: string;
  order_by?: string;
  descending?: boolean;
  enabled_kinds?: string[];
  palette?: Record<string, RGBA>;
  floor_height?: number;
  window_width?: number;
  building_gap?: number;
  block_padding?: number;
  block_gap?: number;
}

export interface EntityDetail {
  kind: 'class' | 'method' | 'package' | 'group';
  id: string;
  name?: string;
  label?: string;
  qualified_name?: string;
  class_id?: string;
  class_name?: string;
  access?: string;
  metrics?: Record<string, number>;
  smells?: SmellDoc[];
  members?: string[];
  methods?: string[];
}
