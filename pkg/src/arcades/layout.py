"""Deterministic placement of blocks and buildings.

Blocks line up on a single west-to-east strip, ordered by a group-level
criterion. Inside a block, classes are sorted by the class-level projection
of the criterion and placed row-major (left-to-right, then front-to-back)
in rows of ceil(sqrt(n)) buildings. All coordinates are abstract meters in
a Y-up right-handed space; rows advance toward +z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .analysis import MetricsTable
from .grouping import Grouping
from .model import CodeModel


class OrderCriterion(str, Enum):
    CLASS_COUNT = "classes"
    LOC = "loc"
    COMMITS = "commits"
    CONTRIBUTORS = "contributors"
    SUMMATIVE_AGE = "age"


@dataclass(frozen=True)
class BuildingPlacement:
    class_id: str
    x: float  # footprint center
    z: float
    footprint: float


@dataclass(frozen=True)
class BlockPlacement:
    group_id: str
    label: str
    x0: float
    z0: float
    x1: float
    z1: float
    buildings: tuple[BuildingPlacement, ...]


def footprint_for(max_formal_args: int, window_width: float) -> float:
    return max(1.0, window_width * (1 + max_formal_args))


def _group_criterion_value(
    criterion: OrderCriterion, table: MetricsTable, group_id: str
) -> float:
    g = table.groups[group_id]
    if criterion is OrderCriterion.CLASS_COUNT:
        return float(g.class_count)
    if criterion is OrderCriterion.COMMITS:
        return float(g.total_commits)
    if criterion is OrderCriterion.CONTRIBUTORS:
        return float(g.contributor_count)
    if criterion is OrderCriterion.SUMMATIVE_AGE:
        return g.summative_age_days
    return float(g.loc)


def _class_criterion_value(
    criterion: OrderCriterion, table: MetricsTable, class_id: str
) -> float:
    # Only LOC projects onto single classes; the rest fall back to line count.
    return float(table.classes[class_id].line_count)


def layout(
    model: CodeModel,
    table: MetricsTable,
    grouping: Grouping,
    criterion: OrderCriterion = OrderCriterion.LOC,
    descending: bool = True,
    window_width: float = 1.0,
    building_gap: float = 1.0,
    block_padding: float = 2.0,
    block_gap: float = 4.0,
) -> list[BlockPlacement]:
    by_id = {c.id: c for c in model.classes}

    def group_key(group) -> tuple:
        value = _group_criterion_value(criterion, table, group.id)
        return (-value if descending else value, group.id)

    def class_key(class_id: str) -> tuple:
        value = _class_criterion_value(criterion, table, class_id)
        return (-value if descending else value, class_id)

    blocks: list[BlockPlacement] = []
    x_offset = 0.0
    for group in sorted(grouping.groups, key=group_key):
        ordered = sorted(group.members, key=class_key)
        row_width = max(1, math.ceil(math.sqrt(len(ordered))))
        placements: list[BuildingPlacement] = []
        x_cursor = 0.0
        z_cursor = 0.0
        row_depth = 0.0
        extent_x = 0.0
        extent_z = 0.0
        for index, class_id in enumerate(ordered):
            if index > 0 and index % row_width == 0:
                z_cursor += row_depth + building_gap
                x_cursor = 0.0
                row_depth = 0.0
            cls = by_id[class_id]
            max_args = max((len(m.params) for m in cls.methods), default=0)
            fp = footprint_for(max_args, window_width)
            placements.append(
                BuildingPlacement(
                    class_id=class_id,
                    x=x_cursor + fp / 2.0,
                    z=z_cursor + fp / 2.0,
                    footprint=fp,
                )
            )
            x_cursor += fp + building_gap
            row_depth = max(row_depth, fp)
            extent_x = max(extent_x, x_cursor - building_gap)
            extent_z = max(extent_z, z_cursor + fp)

        width = extent_x + 2 * block_padding
        depth = extent_z + 2 * block_padding
        blocks.append(
            BlockPlacement(
                group_id=group.id,
                label=group.label,
                x0=x_offset,
                z0=0.0,
                x1=x_offset + width,
                z1=depth,
                buildings=tuple(
                    BuildingPlacement(
                        class_id=p.class_id,
                        x=p.x + x_offset + block_padding,
                        z=p.z + block_padding,
                        footprint=p.footprint,
                    )
                    for p in placements
                ),
            )
        )
        x_offset += width + block_gap
    return blocks
