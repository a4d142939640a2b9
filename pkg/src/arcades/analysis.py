"""Software metrics and the code-smell predicate catalogue.

Fine-grained method metrics (size, formal arguments, call sites), class
metrics (member counts, access split, incoming dependency counts) and group
metrics (size, history) feed an extensible registry of smell predicates.
Each detected smell can be turned into a visual override that the scene
builder applies to the matching building, floor or block.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterator

from .graph import DepKind, DependencyGraph, pair_coupling
from .grouping import Grouping
from .model import SECONDS_PER_DAY, Access, CodeModel

RGBA = tuple[float, float, float, float]


@dataclass(frozen=True)
class MethodMetrics:
    size_lines: int
    formal_args: int
    call_sites: int


@dataclass(frozen=True)
class ClassMetrics:
    field_count: int
    method_count: int
    member_count: int
    public_methods: int
    private_methods: int
    inheritors: int
    components: int
    deployments: int
    parts_count: int  # outgoing containment: how many classes this one embeds
    line_count: int


@dataclass(frozen=True)
class GroupMetrics:
    class_count: int
    loc: int
    total_commits: int
    contributor_count: int
    summative_age_days: float


@dataclass(frozen=True)
class MetricsTable:
    methods: dict[str, MethodMetrics]
    classes: dict[str, ClassMetrics]
    groups: dict[str, GroupMetrics]
    group_of: dict[str, str]  # class id -> group id
    method_owner: dict[str, str]  # method id -> class id


def compute_metrics(
    model: CodeModel, graph: DependencyGraph, grouping: Grouping
) -> MetricsTable:
    methods: dict[str, MethodMetrics] = {}
    method_owner: dict[str, str] = {}
    inheritors: dict[str, set[str]] = {}
    components: dict[str, int] = {}
    deployments: dict[str, set[str]] = {}
    parts: dict[str, int] = {}
    for e in graph.edges:
        if e.kind is DepKind.IS_A:
            inheritors.setdefault(e.referent, set()).add(e.referrer)
        elif e.kind is DepKind.PART_OF:
            components[e.referent] = components.get(e.referent, 0) + 1
            parts[e.referrer] = parts.get(e.referrer, 0) + 1
        elif e.kind is DepKind.USES:
            deployments.setdefault(e.referent, set()).add(e.referrer)

    classes: dict[str, ClassMetrics] = {}
    for cls in model.classes:
        public = sum(1 for m in cls.methods if m.access is Access.PUBLIC)
        classes[cls.id] = ClassMetrics(
            field_count=len(cls.fields),
            method_count=len(cls.methods),
            member_count=len(cls.fields) + len(cls.methods),
            public_methods=public,
            private_methods=len(cls.methods) - public,
            inheritors=len(inheritors.get(cls.id, ())),
            components=components.get(cls.id, 0),
            deployments=len(deployments.get(cls.id, ())),
            parts_count=parts.get(cls.id, 0),
            line_count=cls.line_count,
        )
        for m in cls.methods:
            methods[m.id] = MethodMetrics(
                size_lines=m.body_line_count,
                formal_args=len(m.params),
                call_sites=m.call_site_count,
            )
            method_owner[m.id] = cls.id

    by_id = {c.id: c for c in model.classes}
    stats = model.repo_stats.files if model.repo_stats is not None else {}
    groups: dict[str, GroupMetrics] = {}
    for g in grouping.groups:
        member_classes = [by_id[cid] for cid in g.members if cid in by_id]
        files = sorted({c.file_id for c in member_classes if c.file_id})
        commits = sum(stats[f].commit_count for f in files if f in stats)
        contributors: set[str] = set()
        age = 0.0
        for f in files:
            if f in stats:
                contributors |= stats[f].contributors
                age += (model.reference_time - stats[f].last_modified) / SECONDS_PER_DAY
        groups[g.id] = GroupMetrics(
            class_count=len(member_classes),
            loc=sum(c.line_count for c in member_classes),
            total_commits=commits,
            contributor_count=len(contributors),
            summative_age_days=age,
        )

    return MetricsTable(
        methods=methods,
        classes=classes,
        groups=groups,
        group_of=grouping.group_of(),
        method_owner=method_owner,
    )


def metrics_to_doc(table: MetricsTable) -> dict:
    return {
        "methods": {
            mid: {
                "size_lines": m.size_lines,
                "formal_args": m.formal_args,
                "call_sites": m.call_sites,
            }
            for mid, m in table.methods.items()
        },
        "classes": {
            cid: {
                "field_count": c.field_count,
                "method_count": c.method_count,
                "member_count": c.member_count,
                "public_methods": c.public_methods,
                "private_methods": c.private_methods,
                "inheritors": c.inheritors,
                "components": c.components,
                "deployments": c.deployments,
                "parts_count": c.parts_count,
                "line_count": c.line_count,
            }
            for cid, c in table.classes.items()
        },
        "groups": {
            gid: {
                "class_count": g.class_count,
                "loc": g.loc,
                "total_commits": g.total_commits,
                "contributor_count": g.contributor_count,
                "summative_age_days": round(g.summative_age_days, 6),
            }
            for gid, g in table.groups.items()
        },
        "group_of": dict(table.group_of),
    }


# ---------------------------------------------------------------------------
# Smell predicates


@dataclass(frozen=True)
class SmellRecord:
    id: str
    predicate: str
    class_id: str | None = None
    method_id: str | None = None
    pair: tuple[str, str] | None = None  # class pair or group pair
    severity: float = 1.0
    evidence: dict[str, float] = field(default_factory=dict)

    def subject_key(self) -> str:
        if self.pair is not None:
            return "|".join(self.pair)
        if self.method_id is not None:
            return self.method_id
        return self.class_id or ""


@dataclass(frozen=True)
class EvalContext:
    table: MetricsTable
    graph: DependencyGraph


# A predicate yields (class_id, method_id, pair, value, evidence) hits; the
# severity and record identity are filled in by evaluate_smells.
Hit = tuple[str | None, str | None, tuple[str, str] | None, float, dict[str, float]]
PredicateFn = Callable[[EvalContext, float], Iterator[Hit]]


@dataclass(frozen=True)
class SmellPredicate:
    name: str
    fn: PredicateFn
    default_threshold: float | None  # None: binary predicate, not configurable


class SmellConfigError(ValueError):
    pass


def _pod_class(ctx: EvalContext, _threshold: float) -> Iterator[Hit]:
    for cid, c in ctx.table.classes.items():
        if c.method_count == 0:
            yield cid, None, None, 0.0, {"method_count": 0.0}


def _god_class(ctx: EvalContext, threshold: float) -> Iterator[Hit]:
    for cid, c in ctx.table.classes.items():
        if c.member_count >= threshold:
            yield cid, None, None, float(c.member_count), {
                "member_count": float(c.member_count),
                "threshold": threshold,
            }


def _long_method(ctx: EvalContext, threshold: float) -> Iterator[Hit]:
    for mid, m in ctx.table.methods.items():
        if m.size_lines >= threshold:
            yield ctx.table.method_owner[mid], mid, None, float(m.size_lines), {
                "size_lines": float(m.size_lines),
                "threshold": threshold,
            }


def _long_parameter_list(ctx: EvalContext, threshold: float) -> Iterator[Hit]:
    for mid, m in ctx.table.methods.items():
        if m.formal_args >= threshold:
            yield ctx.table.method_owner[mid], mid, None, float(m.formal_args), {
                "formal_args": float(m.formal_args),
                "threshold": threshold,
            }


def _class_merge_candidate(ctx: EvalContext, threshold: float) -> Iterator[Hit]:
    for pc in pair_coupling(ctx.graph):
        if pc.bidirectional and pc.multiplicity >= threshold:
            yield None, None, (pc.first, pc.second), float(pc.multiplicity), {
                "combined_multiplicity": float(pc.multiplicity),
                "threshold": threshold,
            }


def _non_modular_packages(ctx: EvalContext, threshold: float) -> Iterator[Hit]:
    """Inter-group multiplicity at least `threshold` times the weaker intra sum."""
    group_of = ctx.table.group_of
    intra: dict[str, int] = {}
    inter: dict[tuple[str, str], int] = {}
    for e in ctx.graph.edges:
        ga, gb = group_of.get(e.referrer), group_of.get(e.referent)
        if ga is None or gb is None:
            continue
        if ga == gb:
            intra[ga] = intra.get(ga, 0) + e.multiplicity
        else:
            pair = (min(ga, gb), max(ga, gb))
            inter[pair] = inter.get(pair, 0) + e.multiplicity
    for (ga, gb), weight in sorted(inter.items()):
        floor = max(min(intra.get(ga, 0), intra.get(gb, 0)), 1)
        ratio = weight / floor
        if ratio >= threshold:
            yield None, None, (ga, gb), ratio, {
                "inter_multiplicity": float(weight),
                "min_intra_multiplicity": float(min(intra.get(ga, 0), intra.get(gb, 0))),
                "threshold": threshold,
            }


BUILTIN_PREDICATES: dict[str, SmellPredicate] = {}


def register_predicate(
    name: str, fn: PredicateFn, default_threshold: float | None
) -> None:
    BUILTIN_PREDICATES[name] = SmellPredicate(name, fn, default_threshold)


register_predicate("pod_class", _pod_class, None)
register_predicate("god_class", _god_class, 40.0)
register_predicate("long_method", _long_method, 50.0)
register_predicate("long_parameter_list", _long_parameter_list, 6.0)
register_predicate("class_merge_candidate", _class_merge_candidate, 4.0)
register_predicate("non_modular_packages", _non_modular_packages, 1.0)


def default_thresholds() -> dict[str, float]:
    return {
        p.name: p.default_threshold
        for p in BUILTIN_PREDICATES.values()
        if p.default_threshold is not None
    }


def _severity(value: float, threshold: float) -> float:
    return max(0.0, min(1.0, value / threshold - 0.5))


def evaluate_smells(
    table: MetricsTable,
    graph: DependencyGraph,
    cfg: dict[str, float] | None = None,
) -> list[SmellRecord]:
    """Run every registered predicate; output sorted by (predicate, subject)."""
    thresholds = default_thresholds()
    for key, value in (cfg or {}).items():
        if key not in thresholds:
            raise SmellConfigError(f"unknown threshold key '{key}'")
        if not isinstance(value, (int, float)) or value <= 0:
            raise SmellConfigError(f"threshold '{key}' must be a positive number")
        thresholds[key] = float(value)

    ctx = EvalContext(table=table, graph=graph)
    records: list[SmellRecord] = []
    for name in sorted(BUILTIN_PREDICATES):
        predicate = BUILTIN_PREDICATES[name]
        threshold = thresholds.get(name, 0.0)
        for class_id, method_id, pair, value, evidence in predicate.fn(ctx, threshold):
            severity = 1.0 if predicate.default_threshold is None else _severity(value, threshold)
            record = SmellRecord(
                id="",
                predicate=name,
                class_id=class_id,
                method_id=method_id,
                pair=pair,
                severity=round(severity, 6),
                evidence=evidence,
            )
            records.append(replace(record, id=f"{name}:{record.subject_key()}"))
    records.sort(key=lambda r: (r.predicate, r.subject_key()))
    return records


def smells_to_doc(records: list[SmellRecord]) -> list[dict]:
    out = []
    for r in records:
        subject: dict = {}
        if r.class_id is not None:
            subject["class_id"] = r.class_id
        if r.method_id is not None:
            subject["method_id"] = r.method_id
        if r.pair is not None:
            subject["pair"] = list(r.pair)
        out.append(
            {
                "id": r.id,
                "predicate": r.predicate,
                "subject": subject,
                "severity": r.severity,
                "evidence": {k: v for k, v in sorted(r.evidence.items())},
            }
        )
    return out


# ---------------------------------------------------------------------------
# Visual overrides


@dataclass(frozen=True)
class VisualOverride:
    target: str
    color: RGBA | None = None
    scale: tuple[float, float, float] | None = None
    illumination: float | None = None
    material: str | None = None
    texture: str | None = None


@dataclass(frozen=True)
class OverrideTemplate:
    color: RGBA | None = None
    scale_min: tuple[float, float, float] | None = None
    scale_max: tuple[float, float, float] | None = None
    illumination_min: float | None = None
    illumination_max: float | None = None
    material: str | None = None
    texture: str | None = None


DEFAULT_HIGHLIGHT = OverrideTemplate(
    color=(1.0, 0.85, 0.1, 0.8),
    illumination_min=0.2,
    illumination_max=1.0,
)


def default_style(pod_color: RGBA = (1.0, 0.0, 0.0, 1.0)) -> dict[str, OverrideTemplate]:
    """Built-in smell styling; the pod slab follows the scene palette."""
    return {
        "pod_class": OverrideTemplate(color=pod_color),
        "god_class": OverrideTemplate(
            color=(1.0, 0.45, 0.1, 0.5),
            illumination_min=0.3,
            illumination_max=1.0,
            texture="cracked",
        ),
        "long_method": OverrideTemplate(color=(1.0, 0.55, 0.0, 1.0)),
        "long_parameter_list": OverrideTemplate(color=(0.85, 0.1, 0.75, 1.0)),
        "class_merge_candidate": OverrideTemplate(
            color=(1.0, 0.9, 0.1, 0.55),
            illumination_min=0.1,
            illumination_max=0.8,
        ),
        "non_modular_packages": OverrideTemplate(color=(0.75, 0.25, 0.2, 1.0)),
    }


DEFAULT_STYLE: dict[str, OverrideTemplate] = default_style()


def _lerp(a: float, b: float, t: float) -> float:
    return a + (b - a) * t


def smells_to_overrides(
    records: list[SmellRecord],
    style: dict[str, OverrideTemplate] | None = None,
) -> list[VisualOverride]:
    """One override per record; severity interpolates scalar template attributes."""
    style = DEFAULT_STYLE if style is None else style
    overrides: list[VisualOverride] = []
    for r in records:
        template = style.get(r.predicate, DEFAULT_HIGHLIGHT)
        if r.method_id is not None:
            target = r.method_id
        elif r.class_id is not None:
            target = r.class_id
        else:
            target = min(r.pair) if r.pair else ""
        scale = None
        if template.scale_min is not None and template.scale_max is not None:
            scale = tuple(
                _lerp(lo, hi, r.severity)
                for lo, hi in zip(template.scale_min, template.scale_max)
            )
        illumination = None
        if template.illumination_min is not None and template.illumination_max is not None:
            illumination = _lerp(
                template.illumination_min, template.illumination_max, r.severity
            )
        overrides.append(
            VisualOverride(
                target=target,
                color=template.color,
                scale=scale,
                illumination=illumination,
                material=template.material,
                texture=template.texture,
            )
        )
    return overrides
