"""Request/response bodies for the HTTP API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

Color = tuple[float, float, float, float]

GROUPING_SPECS = ("ns", "recovered:lp", "recovered:greedy", "adhoc")


class PalettePatch(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pod_color: Color | None = None
    public_floor: Color | None = None
    private_floor: Color | None = None
    referrer_color: Color | None = None
    referent_color: Color | None = None
    block_color: Color | None = None


class OverrideBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    target: str
    color: Color | None = None
    scale: tuple[float, float, float] | None = None
    illumination: float | None = Field(default=None, ge=0)
    material: str | None = None
    texture: str | None = None

    @field_validator("scale")
    @classmethod
    def positive_scale(cls, value):
        if value is not None and any(c <= 0 for c in value):
            raise ValueError("scale factors must be > 0")
        return value


class ConfigPatch(BaseModel):
    """Partial scene configuration; absent fields keep their current value."""

    model_config = ConfigDict(extra="forbid")

    grouping: str | None = None
    order_by: Literal["classes", "loc", "commits", "contributors", "age"] | None = None
    descending: bool | None = None
    enabled_kinds: list[str] | None = None
    palette: PalettePatch | None = None
    floor_height: float | None = Field(default=None, gt=0)
    window_width: float | None = Field(default=None, gt=0)
    building_gap: float | None = Field(default=None, gt=0)
    block_padding: float | None = Field(default=None, gt=0)
    block_gap: float | None = Field(default=None, gt=0)
    overrides: list[OverrideBody] | None = None

    @field_validator("grouping")
    @classmethod
    def known_grouping(cls, value):
        if value is not None and value not in GROUPING_SPECS:
            raise ValueError(f"must be one of: {', '.join(GROUPING_SPECS)}")
        return value


class ReclusterRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    algorithm: Literal["lp", "greedy"]


class ModelSummary(BaseModel):
    package_count: int
    class_count: int
    method_count: int
    file_count: int
    reference_time: int
    has_repo_stats: bool
    revision: int


class GroupBody(BaseModel):
    id: str
    label: str
    members: list[str]


class GroupingResponse(BaseModel):
    mode: str
    quality: float | None
    groups: list[GroupBody]
    revision: int


class RevisionResponse(BaseModel):
    revision: int
