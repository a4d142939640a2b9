"""Acceptance gate: one test per release criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -s` to see the verdict lines.
"""

import json
import random
import time
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from arcades.analysis import compute_metrics, default_thresholds, evaluate_smells
from arcades.cli import main
from arcades.extract import SourceUnit, extract_units
from arcades.graph import DepEdge, DepKind, DependencyGraph, build_graph
from arcades.grouping import (
    ClusterAlgorithm,
    group_by_namespace,
    projection_weights,
    recover_components,
)
from arcades.layout import layout
from arcades.model import load_model, save_model
from arcades.pipeline import compose_scene
from arcades.scene import NodeKind, export_obj, export_scene_doc, load_scene_doc
from arcades.service import Session, create_app
from modularity_oracle import set_partitions
from obj_reader import read_obj
from randmodels import random_model

REPO = Path(__file__).resolve().parent.parent
SAMPLE = REPO / "sample"
GOLDEN = REPO / "tests" / "golden"


def _verdict(ok: bool, name: str, detail: str = "") -> None:
    state = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{state}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


def _sample_model():
    units = [
        SourceUnit(p.name, p.read_text(encoding="utf-8"))
        for p in sorted(SAMPLE.glob("*.moo"))
    ]
    model, diags = extract_units(units)
    assert diags == []
    return model


# ---------------------------------------------------------------------------
# 1. Visual-mapping fidelity


def test_visual_mapping_fidelity_500_models():
    started = time.monotonic()
    rng = random.Random(20_240)
    pod_color = (1.0, 0.0, 0.0, 1.0)
    checked_classes = 0
    for _ in range(500):
        model = random_model(rng)
        scene, _ = compose_scene(model)
        floors: dict[str, list] = {}
        windows: dict[str, int] = {}
        buildings = {}
        for node in scene.nodes:
            if node.kind is NodeKind.BUILDING:
                buildings[node.entity] = node
            elif node.kind is NodeKind.FLOOR:
                floors.setdefault(node.entity, []).append(node)
            elif node.kind is NodeKind.WINDOW:
                windows[node.id] = windows.get(node.id, 0) + 1
        window_by_method: dict[str, int] = {}
        for node in scene.nodes:
            if node.kind is NodeKind.WINDOW:
                window_by_method[node.entity] = window_by_method.get(node.entity, 0) + 1
        for cls in model.classes:
            checked_classes += 1
            floor_nodes = [f for m in cls.methods for f in floors.get(m.id, [])]
            assert len(floor_nodes) == len(cls.methods)
            for method in cls.methods:
                assert window_by_method.get(method.id, 0) == len(method.params)
            if not cls.methods:
                slab = buildings[cls.id]
                assert slab.color == pod_color
                assert not floors.get(cls.id)
    elapsed = time.monotonic() - started
    _verdict(
        elapsed < 10.0,
        "visual-mapping fidelity",
        f"500 models, {checked_classes} classes, {elapsed:.2f}s",
    )


# ---------------------------------------------------------------------------
# 2. Dependency semantics on the hand-built 12-class corpus


HAND_DERIVED_EDGES = [
    ("class:core::Entity", "class:core::Entity", DepKind.USES, 1),
    ("class:core::Entity", "class:core::Vec3", DepKind.PART_OF, 1),
    ("class:core::Registry", "class:core::Entity", DepKind.TEMPLATE_ARG, 1),
    ("class:core::Registry", "class:core::Entity", DepKind.USES, 1),
    ("class:core::World", "class:core::Clock", DepKind.PART_OF, 1),
    ("class:core::World", "class:core::Entity", DepKind.USES, 1),
    ("class:core::World", "class:core::Registry", DepKind.PART_OF, 1),
    ("class:gfx::Buffer", "class:gfx::Mesh", DepKind.USES, 1),
    ("class:gfx::Camera", "class:core::Entity", DepKind.IS_A, 1),
    ("class:gfx::Camera", "class:core::Vec3", DepKind.PART_OF, 1),
    ("class:gfx::Camera", "class:core::Vec3", DepKind.USES, 1),
    ("class:gfx::Mesh", "class:gfx::Buffer", DepKind.USES, 3),
    ("class:gfx::Renderer", "class:core::Clock", DepKind.USES, 1),
    ("class:gfx::Renderer", "class:core::Entity", DepKind.IS_A, 1),
    ("class:gfx::Renderer", "class:core::Registry", DepKind.USES, 1),
    ("class:gfx::Renderer", "class:gfx::Camera", DepKind.USES, 1),
    ("class:gfx::Renderer", "class:gfx::Mesh", DepKind.TEMPLATE_ARG, 1),
    ("class:gfx::Renderer", "class:gfx::Mesh", DepKind.USES, 1),
    ("class:util::Pool", "class:core::Registry", DepKind.USES, 1),
    ("class:util::Pool", "class:gfx::Buffer", DepKind.TEMPLATE_ARG, 1),
    ("class:util::Pool", "class:gfx::Buffer", DepKind.USES, 1),
]


def test_dependency_semantics_exact():
    model = _sample_model()
    graph = build_graph(model)
    expected = tuple(DepEdge(*e) for e in HAND_DERIVED_EDGES)
    ok = graph.edges == expected
    _verdict(ok, "dependency semantics", f"{len(graph.edges)} edges, all four kinds")


# ---------------------------------------------------------------------------
# 3. Clustering correctness


def _connected_graph_batches(n: int):
    """All connected labeled simple graphs on n nodes, as an edge-mask matrix."""
    from itertools import combinations

    pairs = list(combinations(range(n), 2))
    masks = []
    for mask in range(1 << len(pairs)):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        edge_bits = [i for i in range(len(pairs)) if mask >> i & 1]
        for i in edge_bits:
            a, b = pairs[i]
            parent[find(a)] = find(b)
        if len({find(i) for i in range(n)}) == 1:
            masks.append([1.0 if mask >> i & 1 else 0.0 for i in range(len(pairs))])
    return pairs, np.array(masks)


def _bruteforce_best_q(n: int, pairs, weight_rows: np.ndarray) -> np.ndarray:
    """Vectorized max-modularity over all partitions, one value per graph row."""
    partitions = set_partitions(list(range(n)))
    pair_indicator = np.zeros((len(partitions), len(pairs)))
    community_indicator = np.zeros((len(partitions), n * n))
    for p_index, partition in enumerate(partitions):
        community_of = {}
        for community in partition:
            for node in community:
                community_of[node] = id(community)
        for pair_index, (a, b) in enumerate(pairs):
            if community_of[a] == community_of[b]:
                pair_indicator[p_index, pair_index] = 1.0
        for a in range(n):
            for b in range(n):
                if community_of[a] == community_of[b]:
                    community_indicator[p_index, a * n + b] = 1.0

    m = weight_rows.sum(axis=1)
    degrees = np.zeros((weight_rows.shape[0], n))
    for pair_index, (a, b) in enumerate(pairs):
        degrees[:, a] += weight_rows[:, pair_index]
        degrees[:, b] += weight_rows[:, pair_index]
    dd = degrees[:, :, None] * degrees[:, None, :]
    intra = weight_rows @ pair_indicator.T  # (graphs, partitions)
    aterm = dd.reshape(len(weight_rows), -1) @ community_indicator.T
    with np.errstate(divide="ignore", invalid="ignore"):
        q = intra / m[:, None] - aterm / (4.0 * m[:, None] ** 2)
    return np.nanmax(q, axis=1)


def _graph_from_mask(n: int, pairs, row) -> DependencyGraph:
    nodes = tuple(f"class:n{i:02d}" for i in range(n))
    edges = tuple(
        DepEdge(nodes[a], nodes[b], DepKind.USES, 1)
        for (a, b), present in zip(pairs, row)
        if present
    )
    return DependencyGraph(nodes=nodes, edges=edges)


def test_clustering_correctness():
    started = time.monotonic()
    worst_gap = 0.0
    graph_count = 0
    for n in range(1, 7):
        pairs, masks = _connected_graph_batches(n)
        if masks.size == 0:
            masks = np.zeros((1, 0))
            pairs = []
        best_q = (
            _bruteforce_best_q(n, pairs, masks)
            if pairs
            else np.zeros(len(masks))
        )
        for row, target in zip(masks, best_q):
            graph = _graph_from_mask(n, pairs, row)
            grouping = recover_components(graph, ClusterAlgorithm.GREEDY_MODULARITY)
            worst_gap = max(worst_gap, float(target) - grouping.quality)
            graph_count += 1
    assert worst_gap <= 0.05, f"greedy fell {worst_gap:.4f} below brute force"

    # two four-cliques joined by one bridge: both algorithms find the cliques
    weights = {}
    for a in range(4):
        for b in range(a + 1, 4):
            weights[(a, b)] = 1
    for a in range(4, 8):
        for b in range(a + 1, 8):
            weights[(a, b)] = 1
    weights[(3, 4)] = 1
    nodes = tuple(f"class:n{i:02d}" for i in range(8))
    graph = DependencyGraph(
        nodes=nodes,
        edges=tuple(
            DepEdge(nodes[a], nodes[b], DepKind.USES, w) for (a, b), w in sorted(weights.items())
        ),
    )
    expected = [
        tuple(f"class:n{i:02d}" for i in range(4)),
        tuple(f"class:n{i:02d}" for i in range(4, 8)),
    ]
    for algorithm in ClusterAlgorithm:
        grouping = recover_components(graph, algorithm)
        assert [g.members for g in grouping.groups] == expected, algorithm

    elapsed = time.monotonic() - started
    _verdict(
        elapsed < 30.0 and worst_gap <= 0.05,
        "clustering correctness",
        f"{graph_count} connected graphs <= 6 nodes, worst gap {worst_gap:.4f}, {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# 4. Determinism of the full chain


def _run_chain(tmp_path: Path, tag: str, file_order: list[str]) -> tuple[bytes, bytes, bytes]:
    model_path = tmp_path / f"model-{tag}.json"
    report_path = tmp_path / f"report-{tag}.json"
    scene_path = tmp_path / f"scene-{tag}.json"
    assert (
        main(
            [
                "extract",
                *file_order,
                "-o",
                str(model_path),
                "--repo-log",
                str(SAMPLE / "repo.log"),
            ]
        )
        == 0
    )
    assert main(["analyze", str(model_path), "-o", str(report_path)]) == 0
    assert main(["scene", str(model_path), "-o", str(scene_path)]) == 0
    return model_path.read_bytes(), report_path.read_bytes(), scene_path.read_bytes()


def test_chain_determinism(tmp_path, monkeypatch):
    # run from the corpus directory so unit names match the repo log paths
    monkeypatch.chdir(SAMPLE)
    files = ["core.moo", "gfx.moo", "util.moo"]
    orders = [files, files, files, list(reversed(files)), files[1:] + files[:1]]
    results = [_run_chain(tmp_path, str(i), order) for i, order in enumerate(orders)]
    ok = all(r == results[0] for r in results[1:])
    golden = (
        (GOLDEN / "model.json").read_bytes(),
        (GOLDEN / "report.json").read_bytes(),
        (GOLDEN / "scene.json").read_bytes(),
    )
    ok = ok and results[0] == golden
    _verdict(ok, "chain determinism", "3 repeat runs + 2 permutations + golden match")


# ---------------------------------------------------------------------------
# 5. Layout soundness


def _rects_overlap(a, b, eps=1e-9):
    return a[0] < b[2] - eps and b[0] < a[2] - eps and a[1] < b[3] - eps and b[1] < a[3] - eps


def test_layout_soundness_500_models():
    rng = random.Random(77_000)
    building_total = 0
    for _ in range(500):
        model = random_model(rng)
        graph = build_graph(model)
        grouping = group_by_namespace(model)
        table = compute_metrics(model, graph, grouping)
        placements = layout(model, table, grouping)
        rects = []
        for block in placements:
            for b in block.buildings:
                half = b.footprint / 2.0
                rect = (b.x - half, b.z - half, b.x + half, b.z + half)
                assert rect[0] >= block.x0 - 1e-9 and rect[2] <= block.x1 + 1e-9
                assert rect[1] >= block.z0 - 1e-9 and rect[3] <= block.z1 + 1e-9
                rects.append(rect)
        building_total += len(rects)
        for i in range(len(rects)):
            for j in range(i + 1, len(rects)):
                assert not _rects_overlap(rects[i], rects[j])
        block_rects = [(p.x0, p.z0, p.x1, p.z1) for p in placements]
        for i in range(len(block_rects)):
            for j in range(i + 1, len(block_rects)):
                assert not _rects_overlap(block_rects[i], block_rects[j])
    _verdict(True, "layout soundness", f"500 models, {building_total} buildings, 0 overlaps")


# ---------------------------------------------------------------------------
# 6. Smell monotonicity


def test_smell_monotonicity_on_sample():
    model = _sample_model()
    graph = build_graph(model)
    table = compute_metrics(model, graph, group_by_namespace(model))
    base = {r.id for r in evaluate_smells(table, graph)}
    ok = True
    for key, default in default_thresholds().items():
        doubled = {r.id for r in evaluate_smells(table, graph, {key: default * 2})}
        ok = ok and doubled <= base
    _verdict(ok, "smell monotonicity", f"{len(default_thresholds())} thresholds doubled")


# ---------------------------------------------------------------------------
# 7. Round-trips


def test_round_trips_and_obj_topology():
    fixtures = [_sample_model()]
    rng = random.Random(404)
    fixtures += [random_model(rng) for _ in range(25)]
    fixtures.append(load_model('{"packages":[],"classes":[]}'))
    ok = True
    for model in fixtures:
        text = save_model(model)
        ok = ok and save_model(load_model(text)) == text
        scene, _ = compose_scene(model)
        doc = export_scene_doc(scene)
        ok = ok and export_scene_doc(load_scene_doc(doc)) == doc

    scene, _ = compose_scene(_sample_model())
    parsed = read_obj(export_obj(scene))
    box_nodes = len(scene.nodes)
    ok = ok and parsed["vertex_count"] == 8 * box_nodes
    _verdict(ok, "round-trips", f"{len(fixtures)} fixtures; OBJ vertices = 8 x {box_nodes}")


# ---------------------------------------------------------------------------
# 8. Service purity


CONFIG_SEQUENCE = [
    ("config", {"enabled_kinds": ["uses", "partof"]}),
    ("config", {"order_by": "classes"}),
    ("recluster", {"algorithm": "greedy"}),
    ("config", {"palette": {"pod_color": [0.9, 0.1, 0.1, 1.0]}}),
    ("config", {"floor_height": 1.5}),
    ("recluster", {"algorithm": "lp"}),
    ("config", {"grouping": "ns"}),
    ("config", {"enabled_kinds": ["isa", "uses", "partof", "templatearg"]}),
    ("config", {"descending": False}),
    ("config", {"block_gap": 6.0, "order_by": "age"}),
]


def test_service_purity_replay():
    model = _sample_model()
    transcripts = []
    for _ in range(2):
        client = TestClient(create_app(Session(model)))
        transcript = [client.get("/api/scene").content]
        for kind, body in CONFIG_SEQUENCE:
            response = client.post(f"/api/{kind}", json=body)
            assert response.status_code == 200, response.text
            transcript.append(client.get("/api/scene").content)
        transcripts.append(transcript)
    ok = transcripts[0] == transcripts[1]
    distinct = len({t for t in transcripts[0]})
    _verdict(ok, "service purity", f"10-step replay, {distinct} distinct scenes, byte-identical")
