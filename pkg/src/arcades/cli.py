"""Command-line interface: extract, graph, analyze, scene, serve.

Thin wrapper over the pipeline; everything the CLI exports is byte-identical
to what the HTTP service reports for the same configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .extract import SOURCE_SUFFIX, SourceUnit, extract_units
from .graph import build_graph, graph_to_dot, graph_to_json, parse_kinds
from .layout import OrderCriterion
from .model import CodeModel, RepoStats, ingest_repo_stats, load_model, save_model
from .pipeline import analyze_model, compose_scene, report_to_json
from .scene import SceneConfig, export_mtl, export_obj, export_scene_doc

DEFAULT_PORT = 8000


class CliError(Exception):
    pass


def _collect_units(paths: list[str]) -> list[SourceUnit]:
    units: list[SourceUnit] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            for source in sorted(path.rglob(f"*{SOURCE_SUFFIX}")):
                units.append(
                    SourceUnit(
                        name=source.relative_to(path).as_posix(),
                        text=source.read_text(encoding="utf-8-sig"),
                    )
                )
        elif path.is_file():
            units.append(
                SourceUnit(name=path.as_posix(), text=path.read_text(encoding="utf-8-sig"))
            )
        else:
            raise CliError(f"no such file or directory: {raw}")
    if not units:
        raise CliError("no source files found (expected *.moo)")
    return units


def _load_model_file(path: str) -> CodeModel:
    try:
        return load_model(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read model '{path}': {exc.strerror}")


def _load_thresholds(path: str | None) -> dict | None:
    if path is None:
        return None
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read thresholds '{path}': {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise CliError(f"thresholds '{path}' is not valid JSON ({exc})")
    if not isinstance(doc, dict):
        raise CliError(f"thresholds '{path}' must be a JSON object")
    return doc


def _grouping_spec(raw: str) -> tuple[str, str | None]:
    """Split 'adhoc:<file>' into spec + mapping document; pass others through."""
    if raw.startswith("adhoc:"):
        path = raw.split(":", 1)[1]
        try:
            return "adhoc", Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot read grouping '{path}': {exc.strerror}")
    if raw in ("ns", "recovered:lp", "recovered:greedy"):
        return raw, None
    raise CliError(
        f"unknown grouping '{raw}' (expected ns, recovered:lp, recovered:greedy, adhoc:<file>)"
    )


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_extract(args) -> int:
    units = _collect_units(args.paths)
    model, diagnostics = extract_units(units)
    for diag in diagnostics:
        print(str(diag), file=sys.stderr)

    repo_stats: RepoStats | None = None
    reference_time = args.reference_time
    if args.repo_log is not None:
        log_text = Path(args.repo_log).read_text(encoding="utf-8")
        file_map = {unit.name: unit.name for unit in units}
        repo_stats = ingest_repo_stats(log_text, file_map)
        if reference_time is None and repo_stats.files:
            reference_time = max(st.last_modified for st in repo_stats.files.values())
    model = CodeModel(
        packages=model.packages,
        classes=model.classes,
        repo_stats=repo_stats,
        reference_time=reference_time if reference_time is not None else 0,
    )
    _write(args.output, save_model(model))
    return 0


def cmd_graph(args) -> int:
    model = _load_model_file(args.model)
    graph = build_graph(model)
    _write(args.output, graph_to_json(graph))
    if args.dot is not None:
        _write(args.dot, graph_to_dot(graph, model))
    return 0


def cmd_analyze(args) -> int:
    model = _load_model_file(args.model)
    spec, adhoc_doc = _grouping_spec(args.grouping)
    analysis = analyze_model(
        model,
        grouping_spec=spec,
        thresholds=_load_thresholds(args.thresholds),
        adhoc_document=adhoc_doc,
    )
    _write(args.output, report_to_json(analysis))
    return 0


def _scene_config(args) -> tuple[SceneConfig, str | None]:
    spec, adhoc_doc = _grouping_spec(args.grouping)
    return (
        SceneConfig(
            grouping=spec,
            order_by=OrderCriterion(args.order),
            descending=args.direction == "desc",
            enabled_kinds=parse_kinds(args.kinds),
        ),
        adhoc_doc,
    )


def cmd_scene(args) -> int:
    model = _load_model_file(args.model)
    cfg, adhoc_doc = _scene_config(args)
    scene, _ = compose_scene(
        model,
        cfg=cfg,
        thresholds=_load_thresholds(args.thresholds),
        adhoc_document=adhoc_doc,
    )
    if args.format == "json":
        _write(args.output, export_scene_doc(scene))
        return 0
    if args.output is None or args.output == "-":
        raise CliError("obj output needs -o <path>")
    base = Path(args.output)
    if base.suffix in (".obj", ".json"):
        base = base.with_suffix("")
    obj_path = base.with_suffix(".obj")
    mtl_path = base.with_suffix(".mtl")
    obj_path.write_text(export_obj(scene, mtl_name=mtl_path.name), encoding="utf-8")
    mtl_path.write_text(export_mtl(scene), encoding="utf-8")
    if args.format == "both":
        base.with_suffix(".json").write_text(export_scene_doc(scene), encoding="utf-8")
    return 0


def resolve_port(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    return int(os.environ.get("ARCADES_PORT", DEFAULT_PORT))


def cmd_serve(args) -> int:
    import uvicorn

    from .service import Session, create_app

    model = _load_model_file(args.model)
    spec, adhoc_doc = _grouping_spec(args.grouping)
    session = Session(
        model,
        config=SceneConfig(grouping=spec),
        thresholds=_load_thresholds(args.thresholds),
        adhoc_document=adhoc_doc,
    )
    static_dir = args.static
    if static_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = str(bundled) if bundled.is_dir() else None
    app = create_app(session, static_dir=static_dir)
    uvicorn.run(app, host=args.host, port=resolve_port(args.port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arcades",
        description="Render object-oriented code as an interactive 3D city.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_extract = sub.add_parser("extract", help="parse sources into a model document")
    p_extract.add_argument("paths", nargs="+", help="source files or directories")
    p_extract.add_argument("-o", "--output", default=None, help="model JSON path (default stdout)")
    p_extract.add_argument("--repo-log", default=None, help="commit log to fold into the model")
    p_extract.add_argument(
        "--reference-time",
        type=int,
        default=None,
        help="analysis timestamp (default: newest commit, else 0)",
    )
    p_extract.set_defaults(fn=cmd_extract)

    p_graph = sub.add_parser("graph", help="emit the class dependency graph")
    p_graph.add_argument("model")
    p_graph.add_argument("-o", "--output", default=None, help="edge list JSON (default stdout)")
    p_graph.add_argument("--dot", default=None, help="also write a DOT debug view")
    p_graph.set_defaults(fn=cmd_graph)

    p_analyze = sub.add_parser("analyze", help="compute metrics and the smell catalogue")
    p_analyze.add_argument("model")
    p_analyze.add_argument("-o", "--output", default=None)
    p_analyze.add_argument("--grouping", default="ns", help="ns | recovered:lp | recovered:greedy | adhoc:<file>")
    p_analyze.add_argument("--thresholds", default=None, help="JSON map predicate -> number")
    p_analyze.set_defaults(fn=cmd_analyze)

    p_scene = sub.add_parser("scene", help="lay out and export the city scene")
    p_scene.add_argument("model")
    p_scene.add_argument("-o", "--output", default=None)
    p_scene.add_argument("--grouping", default="ns")
    p_scene.add_argument(
        "--order",
        default="loc",
        choices=[c.value for c in OrderCriterion],
        help="block ordering criterion",
    )
    p_scene.add_argument("--direction", default="desc", choices=["asc", "desc"])
    p_scene.add_argument(
        "--kinds",
        default="isa,partof,uses,templatearg",
        help="comma-separated dependency kinds to draw",
    )
    p_scene.add_argument("--format", default="json", choices=["json", "obj", "both"])
    p_scene.add_argument("--thresholds", default=None)
    p_scene.set_defaults(fn=cmd_scene)

    p_serve = sub.add_parser("serve", help="serve the API and viewer for a model")
    p_serve.add_argument("model")
    p_serve.add_argument("--port", type=int, default=None, help="default: $ARCADES_PORT or 8000")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--grouping", default="ns")
    p_serve.add_argument("--thresholds", default=None)
    p_serve.add_argument("--static", default=None, help="viewer bundle directory")
    p_serve.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"arcades: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"arcades: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
