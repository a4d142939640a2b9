"""Server-side session: one model, one current scene configuration.

Every accepted configuration change recomputes the derived artifacts
(grouping, metrics, smells, scene bytes) into a fresh immutable snapshot and
bumps the revision. Readers grab the current snapshot atomically, so a
request never observes a half-applied configuration.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace

from ..analysis import OverrideTemplate, VisualOverride
from ..graph import parse_kinds
from ..layout import OrderCriterion
from ..model import CodeModel
from ..pipeline import Analysis, compose_scene
from ..scene import SceneConfig, export_scene_doc
from .schemas import ConfigPatch


@dataclass(frozen=True)
class Snapshot:
    revision: int
    config: SceneConfig
    analysis: Analysis
    scene_bytes: bytes


class SessionError(ValueError):
    pass


class Session:
    def __init__(
        self,
        model: CodeModel,
        config: SceneConfig | None = None,
        thresholds: dict[str, float] | None = None,
        style: dict[str, OverrideTemplate] | None = None,
        adhoc_document: str | None = None,
    ):
        self.model = model
        self.thresholds = thresholds
        self.style = style
        self.adhoc_document = adhoc_document
        self._lock = threading.Lock()
        self._snapshot = self._compute(config or SceneConfig(), revision=0)

    @property
    def snapshot(self) -> Snapshot:
        return self._snapshot

    def _compute(self, config: SceneConfig, revision: int) -> Snapshot:
        scene, analysis = compose_scene(
            self.model,
            cfg=config,
            thresholds=self.thresholds,
            style=self.style,
            adhoc_document=self.adhoc_document,
        )
        return Snapshot(
            revision=revision,
            config=config,
            analysis=analysis,
            scene_bytes=export_scene_doc(scene).encode("utf-8"),
        )

    def apply_patch(self, patch: ConfigPatch) -> Snapshot:
        with self._lock:
            config = _merge(self._snapshot.config, patch)
            if config.grouping == "adhoc" and self.adhoc_document is None:
                raise SessionError(
                    "grouping: no ad-hoc mapping was loaded for this session"
                )
            snapshot = self._compute(config, self._snapshot.revision + 1)
            self._snapshot = snapshot
            return snapshot

    def recluster(self, algorithm: str) -> Snapshot:
        with self._lock:
            config = replace(self._snapshot.config, grouping=f"recovered:{algorithm}")
            snapshot = self._compute(config, self._snapshot.revision + 1)
            self._snapshot = snapshot
            return snapshot


def _merge(config: SceneConfig, patch: ConfigPatch) -> SceneConfig:
    changes: dict = {}
    if patch.grouping is not None:
        changes["grouping"] = patch.grouping
    if patch.order_by is not None:
        changes["order_by"] = OrderCriterion(patch.order_by)
    if patch.descending is not None:
        changes["descending"] = patch.descending
    if patch.enabled_kinds is not None:
        try:
            changes["enabled_kinds"] = parse_kinds(",".join(patch.enabled_kinds))
        except ValueError as exc:
            raise SessionError(f"enabled_kinds: {exc}") from None
    if patch.palette is not None:
        palette_changes = {
            key: tuple(value)
            for key, value in patch.palette.model_dump(exclude_none=True).items()
        }
        changes["palette"] = replace(config.palette, **palette_changes)
    for size_field in (
        "floor_height",
        "window_width",
        "building_gap",
        "block_padding",
        "block_gap",
    ):
        value = getattr(patch, size_field)
        if value is not None:
            changes[size_field] = value
    if patch.overrides is not None:
        changes["overrides"] = tuple(
            VisualOverride(
                target=o.target,
                color=tuple(o.color) if o.color is not None else None,
                scale=tuple(o.scale) if o.scale is not None else None,
                illumination=o.illumination,
                material=o.material,
                texture=o.texture,
            )
            for o in patch.overrides
        )
    if not changes:
        return config
    return replace(config, **changes)
