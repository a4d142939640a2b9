// Pure scene-document -> render-spec transform. One box per node, two
// colored segments per link; everything the renderer draws originates here,
// so the document-to-mesh mapping stays 1:1 and testable without WebGL.

import type { RGBA, SceneDoc, SceneLinkDoc, Vec3 } from './types.js';

export interface BoxSpec {
  id: string;
  entity: string;
  kind: string;
  position: Vec3;
  size: Vec3;
  color: RGBA;
  illumination: number;
  texture: string | null;
  visible: boolean;
  pickable: boolean;
}

export interface SegmentSpec {
  linkId: string;
  kind: string;
  start: Vec3;
  end: Vec3;
  color: RGBA;
}

export interface RenderSpec {
  boxes: BoxSpec[];
  segments: SegmentSpec[];
  linkIds: string[];
  bounds: { min: Vec3; max: Vec3 };
}

function segmentsOf(link: SceneLinkDoc): SegmentSpec[] {
  const segments: SegmentSpec[] = [];
  const points = link.polyline;
  const mid = (points.length - 1) / 2;
  for (let i = 0; i + 1 < points.length; i++) {
    segments.push({
      linkId: link.id,
      kind: link.kind,
      start: points[i],
      end: points[i + 1],
      color: i < mid ? link.first_half_color : link.second_half_color,
    });
  }
  return segments;
}

export function toRenderSpec(doc: SceneDoc): RenderSpec {
  const boxes: BoxSpec[] = doc.nodes.map((node) => ({
    id: node.id,
    entity: node.entity,
    kind: node.kind,
    position: node.position,
    size: node.size,
    color: node.color,
    illumination: node.illumination ?? 0,
    texture: node.texture,
    visible: node.color[3] > 0.001,
    pickable: node.color[3] > 0.001,
  }));

  const segments: SegmentSpec[] = [];
  for (const link of doc.links) {
    segments.push(...segmentsOf(link));
  }

  const min: Vec3 = [Infinity, Infinity, Infinity];
  const max: Vec3 = [-Infinity, -Infinity, -Infinity];
  for (const box of boxes) {
    for (let axis = 0; axis < 3; axis++) {
      min[axis] = Math.min(min[axis], box.position[axis] - box.size[axis] / 2);
      max[axis] = Math.max(max[axis], box.position[axis] + box.size[axis] / 2);
    }
  }
  if (!boxes.length) {
    min.fill(0);
    max.fill(0);
  }
  return {
    boxes,
    segments,
    linkIds: doc.links.map((l) => l.id),
    bounds: { min, max },
  };
}

export function linkKindsIn(doc: SceneDoc): Set<string> {
  return new Set(doc.links.map((l) => l.kind));
}
