"""End-to-end composition: model -> graph -> grouping -> metrics -> scene.

Shared by the command-line interface and the HTTP service so that exported
documents and served documents are always byte-identical for the same
configuration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .analysis import (
    MetricsTable,
    OverrideTemplate,
    SmellRecord,
    compute_metrics,
    default_style,
    evaluate_smells,
    metrics_to_doc,
    smells_to_doc,
    smells_to_overrides,
)
from .graph import DependencyGraph, build_graph
from .grouping import (
    ClusterAlgorithm,
    Grouping,
    GroupingError,
    group_by_namespace,
    grouping_to_doc,
    load_adhoc_grouping,
    recover_components,
)
from .layout import layout
from .model import CodeModel
from .scene import SceneConfig, SceneGraph, build_scene, export_scene_doc


def resolve_grouping(
    model: CodeModel,
    graph: DependencyGraph,
    spec: str,
    adhoc_document: str | None = None,
) -> Grouping:
    """Turn a grouping spec ('ns', 'recovered:lp', 'recovered:greedy', 'adhoc')
    into a concrete partition."""
    if spec == "ns":
        return group_by_namespace(model)
    if spec in ("recovered:lp", "recovered:greedy"):
        algorithm = ClusterAlgorithm(spec.split(":", 1)[1])
        return recover_components(graph, algorithm)
    if spec == "adhoc":
        if adhoc_document is None:
            raise GroupingError("ad-hoc grouping requested but no mapping document given")
        return load_adhoc_grouping(adhoc_document, model)
    raise GroupingError(f"unknown grouping spec '{spec}'")


@dataclass(frozen=True)
class Analysis:
    graph: DependencyGraph
    grouping: Grouping
    table: MetricsTable
    smells: list[SmellRecord]


def analyze_model(
    model: CodeModel,
    grouping_spec: str = "ns",
    thresholds: dict[str, float] | None = None,
    adhoc_document: str | None = None,
    graph: DependencyGraph | None = None,
) -> Analysis:
    graph = graph if graph is not None else build_graph(model)
    grouping = resolve_grouping(model, graph, grouping_spec, adhoc_document)
    table = compute_metrics(model, graph, grouping)
    smells = evaluate_smells(table, graph, thresholds)
    return Analysis(graph=graph, grouping=grouping, table=table, smells=smells)


def report_to_json(analysis: Analysis) -> str:
    doc = {
        "grouping": grouping_to_doc(analysis.grouping),
        "metrics": metrics_to_doc(analysis.table),
        "smells": smells_to_doc(analysis.smells),
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def compose_scene(
    model: CodeModel,
    cfg: SceneConfig | None = None,
    thresholds: dict[str, float] | None = None,
    style: dict[str, OverrideTemplate] | None = None,
    adhoc_document: str | None = None,
) -> tuple[SceneGraph, Analysis]:
    """Run the full chain for one configuration; pure given its inputs."""
    cfg = cfg or SceneConfig()
    if style is None:
        style = default_style(pod_color=cfg.palette.pod_color)
    analysis = analyze_model(
        model,
        grouping_spec=cfg.grouping,
        thresholds=thresholds,
        adhoc_document=adhoc_document,
    )
    placements = layout(
        model,
        analysis.table,
        analysis.grouping,
        criterion=cfg.order_by,
        descending=cfg.descending,
        window_width=cfg.window_width,
        building_gap=cfg.building_gap,
        block_padding=cfg.block_padding,
        block_gap=cfg.block_gap,
    )
    overrides = smells_to_overrides(analysis.smells, style)
    scene = build_scene(
        placements,
        model,
        analysis.table,
        overrides=overrides,
        cfg=cfg,
        graph=analysis.graph,
    )
    return scene, analysis


def scene_json(
    model: CodeModel,
    cfg: SceneConfig | None = None,
    thresholds: dict[str, float] | None = None,
    style: dict[str, OverrideTemplate] | None = None,
    adhoc_document: str | None = None,
) -> str:
    scene, _ = compose_scene(model, cfg, thresholds, style, adhoc_document)
    return export_scene_doc(scene)
