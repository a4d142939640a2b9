"""Scene-graph generation and exports.

Mapping rules: one building per class (height = methods x floor height, or a
single red slab for method-less plain-data classes), one floor per method
stacked bottom-up in declaration order (light blue public, normal blue
private), one window per formal argument on the floor's front facade, one
bicolored two-segment link per enabled dependency edge (referrer half cyan,
referent half pink). Geometry is axis-aligned boxes in a Y-up right-handed
space; the front facade faces -z.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from enum import Enum

from .analysis import RGBA, VisualOverride
from .graph import DepKind, DependencyGraph, build_graph
from .layout import BlockPlacement, OrderCriterion
from .model import Access, CodeModel

logger = logging.getLogger(__name__)

ALL_KINDS = tuple(sorted(DepKind, key=lambda k: k.value))

BLOCK_SLAB_HEIGHT = 0.2
POD_SLAB_FACTOR = 0.5  # slab height as a fraction of floor height
WINDOW_WIDTH_FACTOR = 0.6
WINDOW_HEIGHT_FACTOR = 0.5
WINDOW_DEPTH = 0.04
WINDOW_COLOR: RGBA = (0.92, 0.96, 1.0, 1.0)
ENVELOPE_COLOR: RGBA = (0.0, 0.0, 0.0, 0.0)  # invisible picking shell
LINK_RAISE_FLOORS = 2.0


class NodeKind(str, Enum):
    BLOCK = "block"
    BUILDING = "building"
    FLOOR = "floor"
    WINDOW = "window"


@dataclass(frozen=True)
class Palette:
    pod_color: RGBA = (1.0, 0.0, 0.0, 1.0)
    public_floor: RGBA = (0.55, 0.78, 1.0, 1.0)
    private_floor: RGBA = (0.15, 0.35, 0.85, 1.0)
    referrer_color: RGBA = (0.0, 1.0, 1.0, 1.0)
    referent_color: RGBA = (1.0, 0.41, 0.71, 1.0)
    block_color: RGBA = (0.45, 0.45, 0.45, 1.0)


@dataclass(frozen=True)
class SceneConfig:
    grouping: str = "ns"  # ns | recovered:lp | recovered:greedy | adhoc
    order_by: OrderCriterion = OrderCriterion.LOC
    descending: bool = True
    enabled_kinds: tuple[DepKind, ...] = ALL_KINDS
    palette: Palette = field(default_factory=Palette)
    floor_height: float = 1.0
    window_width: float = 1.0
    building_gap: float = 1.0
    block_padding: float = 2.0
    block_gap: float = 4.0
    overrides: tuple[VisualOverride, ...] = ()


@dataclass(frozen=True)
class SceneNode:
    id: str
    kind: NodeKind
    entity: str
    position: tuple[float, float, float]
    size: tuple[float, float, float]
    color: RGBA
    material: str | None = None
    texture: str | None = None
    illumination: float = 0.0


@dataclass(frozen=True)
class SceneLink:
    id: str
    referrer: str
    referent: str
    kind: DepKind
    polyline: tuple[tuple[float, float, float], ...]  # anchor, raised midpoint, anchor
    first_half_color: RGBA
    second_half_color: RGBA


@dataclass(frozen=True)
class SceneGraph:
    nodes: tuple[SceneNode, ...]
    links: tuple[SceneLink, ...]


def build_scene(
    placements: list[BlockPlacement],
    model: CodeModel,
    table,
    overrides: list[VisualOverride] | None = None,
    cfg: SceneConfig | None = None,
    graph: DependencyGraph | None = None,
) -> SceneGraph:
    cfg = cfg or SceneConfig()
    graph = graph if graph is not None else build_graph(model)
    pal = cfg.palette
    fh = cfg.floor_height
    by_id = {c.id: c for c in model.classes}

    nodes: list[SceneNode] = []
    roof: dict[str, tuple[float, float, float]] = {}

    for block in placements:
        width = block.x1 - block.x0
        depth = block.z1 - block.z0
        nodes.append(
            SceneNode(
                id=f"blk:{block.group_id}",
                kind=NodeKind.BLOCK,
                entity=block.group_id,
                position=(
                    block.x0 + width / 2.0,
                    -BLOCK_SLAB_HEIGHT / 2.0,
                    block.z0 + depth / 2.0,
                ),
                size=(width, BLOCK_SLAB_HEIGHT, depth),
                color=pal.block_color,
            )
        )
        for b in block.buildings:
            cls = by_id[b.class_id]
            method_count = len(cls.methods)
            is_pod = method_count == 0
            height = method_count * fh if not is_pod else POD_SLAB_FACTOR * fh
            nodes.append(
                SceneNode(
                    id=f"bld:{cls.id}",
                    kind=NodeKind.BUILDING,
                    entity=cls.id,
                    position=(b.x, height / 2.0, b.z),
                    size=(b.footprint, height, b.footprint),
                    color=pal.pod_color if is_pod else ENVELOPE_COLOR,
                )
            )
            roof[cls.id] = (b.x, height, b.z)
            facade_z = b.z - b.footprint / 2.0
            for level, method in enumerate(cls.methods):
                floor_color = (
                    pal.public_floor if method.access is Access.PUBLIC else pal.private_floor
                )
                floor_y = (level + 0.5) * fh
                nodes.append(
                    SceneNode(
                        id=f"flr:{method.id}",
                        kind=NodeKind.FLOOR,
                        entity=method.id,
                        position=(b.x, floor_y, b.z),
                        size=(b.footprint, fh, b.footprint),
                        color=floor_color,
                    )
                )
                arg_count = len(method.params)
                for slot in range(arg_count):
                    cx = b.x - b.footprint / 2.0 + b.footprint * (slot + 1) / (arg_count + 1)
                    nodes.append(
                        SceneNode(
                            id=f"win:{method.id}@{slot}",
                            kind=NodeKind.WINDOW,
                            entity=method.id,
                            position=(cx, floor_y, facade_z - WINDOW_DEPTH / 2.0),
                            size=(
                                WINDOW_WIDTH_FACTOR * cfg.window_width,
                                WINDOW_HEIGHT_FACTOR * fh,
                                WINDOW_DEPTH,
                            ),
                            color=WINDOW_COLOR,
                        )
                    )

    links: list[SceneLink] = []
    enabled = set(cfg.enabled_kinds)
    for e in graph.edges:
        if e.kind not in enabled:
            continue
        a = roof.get(e.referrer)
        b = roof.get(e.referent)
        if a is None or b is None:
            continue
        mid = (
            (a[0] + b[0]) / 2.0,
            max(a[1], b[1]) + LINK_RAISE_FLOORS * fh,
            (a[2] + b[2]) / 2.0,
        )
        links.append(
            SceneLink(
                id=f"lnk:{e.kind.value}:{e.referrer}->{e.referent}",
                referrer=e.referrer,
                referent=e.referent,
                kind=e.kind,
                polyline=(a, mid, b),
                first_half_color=pal.referrer_color,
                second_half_color=pal.referent_color,
            )
        )

    nodes = _apply_overrides(nodes, list(cfg.overrides) + list(overrides or []))
    return SceneGraph(nodes=tuple(nodes), links=tuple(links))


def _apply_overrides(
    nodes: list[SceneNode], overrides: list[VisualOverride]
) -> list[SceneNode]:
    # Overrides address blocks, buildings and floors; windows share their
    # floor's entity id and stay untouched.
    index: dict[str, int] = {}
    for i, node in enumerate(nodes):
        if node.kind is not NodeKind.WINDOW:
            index[node.entity] = i
    for ov in overrides:
        i = index.get(ov.target)
        if i is None:
            logger.warning("visual override targets unknown entity '%s'; skipped", ov.target)
            continue
        node = nodes[i]
        changes: dict = {}
        if ov.color is not None:
            changes["color"] = ov.color
        if ov.scale is not None:
            w, h, d = node.size
            sx, sy, sz = ov.scale
            changes["size"] = (w * sx, h * sy, d * sz)
        if ov.illumination is not None:
            changes["illumination"] = ov.illumination
        if ov.material is not None:
            changes["material"] = ov.material
        if ov.texture is not None:
            changes["texture"] = ov.texture
        if changes:
            nodes[i] = replace(node, **changes)
    return nodes


# ---------------------------------------------------------------------------
# Scene document (canonical JSON)


def _num(x: float) -> float:
    r = round(float(x), 6)
    return 0.0 if r == 0 else r


def _vec(v) -> list[float]:
    return [_num(c) for c in v]


def scene_to_doc(scene: SceneGraph) -> dict:
    return {
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind.value,
                "entity": n.entity,
                "position": _vec(n.position),
                "size": _vec(n.size),
                "color": _vec(n.color),
                "material": n.material,
                "texture": n.texture,
                "illumination": _num(n.illumination),
            }
            for n in scene.nodes
        ],
        "links": [
            {
                "id": l.id,
                "referrer": l.referrer,
                "referent": l.referent,
                "kind": l.kind.value,
                "polyline": [_vec(p) for p in l.polyline],
                "first_half_color": _vec(l.first_half_color),
                "second_half_color": _vec(l.second_half_color),
            }
            for l in scene.links
        ],
    }


def export_scene_doc(scene: SceneGraph) -> str:
    return json.dumps(scene_to_doc(scene), sort_keys=True, indent=2) + "\n"


class SceneDocError(ValueError):
    pass


def load_scene_doc(document: str) -> SceneGraph:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SceneDocError(f"scene document is not valid JSON ({exc})") from None
    if not isinstance(doc, dict) or "nodes" not in doc or "links" not in doc:
        raise SceneDocError("scene document must carry 'nodes' and 'links'")
    try:
        nodes = tuple(
            SceneNode(
                id=n["id"],
                kind=NodeKind(n["kind"]),
                entity=n["entity"],
                position=tuple(n["position"]),
                size=tuple(n["size"]),
                color=tuple(n["color"]),
                material=n.get("material"),
                texture=n.get("texture"),
                illumination=n.get("illumination", 0.0),
            )
            for n in doc["nodes"]
        )
        links = tuple(
            SceneLink(
                id=l["id"],
                referrer=l["referrer"],
                referent=l["referent"],
                kind=DepKind(l["kind"]),
                polyline=tuple(tuple(p) for p in l["polyline"]),
                first_half_color=tuple(l["first_half_color"]),
                second_half_color=tuple(l["second_half_color"]),
            )
            for l in doc["links"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneDocError(f"malformed scene document: {exc}") from None
    return SceneGraph(nodes=nodes, links=links)


# ---------------------------------------------------------------------------
# Wavefront OBJ / MTL export


def _color_key(color: RGBA) -> str:
    return "".join(f"{max(0, min(255, round(c * 255))):02x}" for c in color)


def _box_vertices(node: SceneNode) -> list[tuple[float, float, float]]:
    cx, cy, cz = node.position
    w, h, d = node.size
    x0, x1 = cx - w / 2.0, cx + w / 2.0
    y0, y1 = cy - h / 2.0, cy + h / 2.0
    z0, z1 = cz - d / 2.0, cz + d / 2.0
    return [
        (x0, y0, z0),
        (x1, y0, z0),
        (x1, y1, z0),
        (x0, y1, z0),
        (x0, y0, z1),
        (x1, y0, z1),
        (x1, y1, z1),
        (x0, y1, z1),
    ]


_BOX_FACES = [
    (1, 4, 3, 2),  # -z
    (5, 6, 7, 8),  # +z
    (1, 2, 6, 5),  # -y
    (4, 8, 7, 3),  # +y
    (1, 5, 8, 4),  # -x
    (2, 3, 7, 6),  # +x
]


def export_obj(scene: SceneGraph, mtl_name: str = "city.mtl") -> str:
    """Wavefront OBJ: one object per node, 8 vertices and 6 quad faces per box."""
    lines = [
        "# code city scene export",
        f"# nodes: {len(scene.nodes)}",
    ]
    if not scene.nodes:
        return "\n".join(lines) + "\n"
    lines.append(f"mtllib {mtl_name}")
    base = 0
    for node in scene.nodes:
        lines.append(f"o {node.id}")
        for x, y, z in _box_vertices(node):
            lines.append(f"v {x:.6f} {y:.6f} {z:.6f}")
        lines.append(f"usemtl mat_{_color_key(node.color)}")
        for face in _BOX_FACES:
            lines.append("f " + " ".join(str(base + i) for i in face))
        base += 8
    return "\n".join(lines) + "\n"


def export_mtl(scene: SceneGraph) -> str:
    lines = ["# materials for the code city scene export"]
    seen: dict[str, RGBA] = {}
    for node in scene.nodes:
        seen.setdefault(_color_key(node.color), node.color)
    for key in sorted(seen):
        r, g, b, a = seen[key]
        lines.append(f"newmtl mat_{key}")
        lines.append(f"Kd {r:.6f} {g:.6f} {b:.6f}")
        lines.append(f"d {a:.6f}")
    return "\n".join(lines) + "\n"
