"""Typed class-dependency graph and degree/coupling queries.

Edges run referrer -> referent (dependent -> depended-on) and come in four
kinds: inheritance, by-value containment, pointer/reference usage, and
template-argument instrumentation. Parallel occurrences collapse into one
edge per (referrer, referent, kind) with a multiplicity count.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum

from .model import ClassEntity, CodeModel, RefMode, walk_template_args

logger = logging.getLogger(__name__)


class DepKind(str, Enum):
    IS_A = "is_a"
    PART_OF = "part_of"
    USES = "uses"
    TEMPLATE_ARG = "template_arg"


KIND_ALIASES = {
    "isa": DepKind.IS_A,
    "is_a": DepKind.IS_A,
    "partof": DepKind.PART_OF,
    "part_of": DepKind.PART_OF,
    "uses": DepKind.USES,
    "templatearg": DepKind.TEMPLATE_ARG,
    "template_arg": DepKind.TEMPLATE_ARG,
}


@dataclass(frozen=True)
class DepEdge:
    referrer: str
    referent: str
    kind: DepKind
    multiplicity: int = 1


@dataclass(frozen=True)
class DependencyGraph:
    nodes: tuple[str, ...]
    edges: tuple[DepEdge, ...]

    def out_edges(self, class_id: str) -> list[DepEdge]:
        return [e for e in self.edges if e.referrer == class_id]

    def in_edges(self, class_id: str) -> list[DepEdge]:
        return [e for e in self.edges if e.referent == class_id]


@dataclass(frozen=True)
class DegreeStats:
    in_degree: int = 0
    out_degree: int = 0
    in_weight: int = 0
    out_weight: int = 0


@dataclass(frozen=True)
class PairCoupling:
    first: str
    second: str
    multiplicity: int
    bidirectional: bool


def _occurrences(cls: ClassEntity) -> list[tuple[str, DepKind]]:
    """One (target, kind) entry per source occurrence; external targets skipped."""
    out: list[tuple[str, DepKind]] = []

    def add(target: str, kind: DepKind) -> None:
        out.append((target, kind))

    for base in cls.bases:
        if not base.external:
            add(base.target, DepKind.IS_A)
        for arg in walk_template_args(base):
            if not arg.external:
                add(arg.target, DepKind.TEMPLATE_ARG)
    for f in cls.fields:
        ref = f.type_ref
        if not ref.external:
            if ref.mode is RefMode.VALUE:
                if ref.target == cls.id:
                    logger.warning(
                        "class '%s' declares a by-value field of its own type; "
                        "no containment edge emitted",
                        cls.id,
                    )
                else:
                    add(ref.target, DepKind.PART_OF)
            else:
                add(ref.target, DepKind.USES)
        for arg in walk_template_args(ref):
            if not arg.external:
                add(arg.target, DepKind.TEMPLATE_ARG)
    for m in cls.methods:
        for p in m.params:
            if not p.external and p.mode is not RefMode.VALUE:
                add(p.target, DepKind.USES)
            for arg in walk_template_args(p):
                if not arg.external:
                    add(arg.target, DepKind.TEMPLATE_ARG)
    return out


def build_graph(model: CodeModel) -> DependencyGraph:
    """Derive all edges from the model; deterministic regardless of class order."""
    counts: dict[tuple[str, str, DepKind], int] = {}
    for cls in model.classes:
        for target, kind in _occurrences(cls):
            key = (cls.id, target, kind)
            counts[key] = counts.get(key, 0) + 1

    edges = tuple(
        DepEdge(referrer=r, referent=t, kind=k, multiplicity=n)
        for (r, t, k), n in sorted(counts.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2]))
    )
    graph = DependencyGraph(
        nodes=tuple(sorted(c.id for c in model.classes)),
        edges=edges,
    )
    for cycle in _isa_cycles(graph):
        logger.warning("inheritance cycle: %s", " -> ".join(cycle))
    return graph


def _isa_cycles(graph: DependencyGraph) -> list[list[str]]:
    adjacency: dict[str, list[str]] = {}
    for e in graph.edges:
        if e.kind is DepKind.IS_A:
            adjacency.setdefault(e.referrer, []).append(e.referent)
    cycles: list[list[str]] = []
    state: dict[str, int] = {}  # 1 = on stack, 2 = done

    def visit(node: str, stack: list[str]) -> None:
        state[node] = 1
        stack.append(node)
        for nxt in adjacency.get(node, []):
            if state.get(nxt) == 1:
                cycles.append(stack[stack.index(nxt) :] + [nxt])
            elif nxt not in state:
                visit(nxt, stack)
        stack.pop()
        state[node] = 2

    for node in sorted(adjacency):
        if node not in state:
            visit(node, [])
    return cycles


def degree_stats(graph: DependencyGraph) -> dict[str, DegreeStats]:
    """In/out degree per class, both by distinct edges and by multiplicity sum."""
    acc = {node: [0, 0, 0, 0] for node in graph.nodes}
    for e in graph.edges:
        if e.referent in acc:
            acc[e.referent][0] += 1
            acc[e.referent][2] += e.multiplicity
        if e.referrer in acc:
            acc[e.referrer][1] += 1
            acc[e.referrer][3] += e.multiplicity
    return {
        node: DegreeStats(in_degree=v[0], out_degree=v[1], in_weight=v[2], out_weight=v[3])
        for node, v in acc.items()
    }


def pair_coupling(graph: DependencyGraph) -> list[PairCoupling]:
    """Combined multiplicity and direction info per connected unordered class pair."""
    total: dict[tuple[str, str], int] = {}
    directions: dict[tuple[str, str], set[str]] = {}
    for e in graph.edges:
        if e.referrer == e.referent:
            continue
        pair = (min(e.referrer, e.referent), max(e.referrer, e.referent))
        total[pair] = total.get(pair, 0) + e.multiplicity
        directions.setdefault(pair, set()).add(e.referrer)
    return [
        PairCoupling(
            first=a,
            second=b,
            multiplicity=total[(a, b)],
            bidirectional=len(directions[(a, b)]) == 2,
        )
        for a, b in sorted(total)
    ]


# ---------------------------------------------------------------------------
# Exports


def graph_to_json(graph: DependencyGraph) -> str:
    doc = {
        "nodes": list(graph.nodes),
        "edges": [
            {
                "referrer": e.referrer,
                "referent": e.referent,
                "kind": e.kind.value,
                "multiplicity": e.multiplicity,
            }
            for e in graph.edges
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def graph_to_dot(graph: DependencyGraph, model: CodeModel) -> str:
    """DOT debug view: one edge per line, kind as the edge label."""
    names = {c.id: model.qualified_name(c) for c in model.classes}
    lines = ["digraph dependencies {"]
    for e in graph.edges:
        referrer = names.get(e.referrer, e.referrer)
        referent = names.get(e.referent, e.referent)
        lines.append(f'  "{referrer}" -> "{referent}" [label="{e.kind.value}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_kinds(spec: str) -> tuple[DepKind, ...]:
    """Parse a comma-separated kind list such as 'isa,uses'; order-normalized."""
    kinds: list[DepKind] = []
    for raw in spec.split(","):
        name = raw.strip().lower()
        if not name:
            continue
        if name not in KIND_ALIASES:
            raise ValueError(f"unknown dependency kind '{raw.strip()}'")
        kind = KIND_ALIASES[name]
        if kind not in kinds:
            kinds.append(kind)
    return tuple(sorted(kinds, key=lambda k: k.value))
