"""Global symbol table for an object-oriented code base.

Holds packages, classes, methods, fields and per-file repository statistics,
plus loading/saving of the JSON interchange document. The model is immutable
after loading; every downstream stage (graph, grouping, metrics, scene)
reads it concurrently without locks.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

logger = logging.getLogger(__name__)

SECONDS_PER_DAY = 86400


class ModelFormatError(ValueError):
    """Document does not conform to the model schema; message carries the JSON path."""


class ModelValidationError(ValueError):
    """Document parsed but violates a model invariant (duplicate ids, dangling refs)."""


class Access(str, Enum):
    PUBLIC = "public"
    PRIVATE = "private"


class RefMode(str, Enum):
    VALUE = "value"
    POINTER = "pointer"
    REFERENCE = "reference"


@dataclass(frozen=True)
class TypeRef:
    """Reference to a class id, or to an external name when unresolved."""

    target: str
    mode: RefMode = RefMode.VALUE
    external: bool = False
    template_args: tuple["TypeRef", ...] = ()


@dataclass(frozen=True)
class FieldEntity:
    id: str
    name: str
    type_ref: TypeRef
    access: Access = Access.PRIVATE


@dataclass(frozen=True)
class MethodEntity:
    id: str
    name: str
    access: Access = Access.PRIVATE
    params: tuple[TypeRef, ...] = ()
    body_line_count: int = 0
    call_site_count: int = 0


@dataclass(frozen=True)
class ClassEntity:
    """A class declaration; ``methods`` keeps declaration order (floors stack bottom-up)."""

    id: str
    name: str
    package_id: str
    file_id: str
    line_count: int = 1
    bases: tuple[TypeRef, ...] = ()
    fields: tuple[FieldEntity, ...] = ()
    methods: tuple[MethodEntity, ...] = ()


@dataclass(frozen=True)
class PackageEntity:
    id: str
    name: str
    file_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class FileStats:
    commit_count: int
    contributors: frozenset[str]
    last_modified: int


@dataclass(frozen=True)
class RepoStats:
    files: dict[str, FileStats] = field(default_factory=dict)

    def __hash__(self) -> int:  # dict field; hash by content
        return hash(tuple(sorted(self.files.items())))


@dataclass(frozen=True)
class CodeModel:
    packages: tuple[PackageEntity, ...] = ()
    classes: tuple[ClassEntity, ...] = ()
    repo_stats: RepoStats | None = None
    reference_time: int = 0

    def class_by_id(self, class_id: str) -> ClassEntity | None:
        return {c.id: c for c in self.classes}.get(class_id)

    def qualified_name(self, cls: ClassEntity) -> str:
        pkg = next((p for p in self.packages if p.id == cls.package_id), None)
        if pkg is None or pkg.name == "::":
            return cls.name
        return f"{pkg.name}::{cls.name}"


def iter_typerefs(cls: ClassEntity) -> Iterator[TypeRef]:
    """All type references a class deploys: bases, field types, method params."""
    yield from cls.bases
    for f in cls.fields:
        yield f.type_ref
    for m in cls.methods:
        yield from m.params


def walk_template_args(ref: TypeRef) -> Iterator[TypeRef]:
    """Template arguments of a type reference, flattened over all nesting depths."""
    for arg in ref.template_args:
        yield arg
        yield from walk_template_args(arg)


# ---------------------------------------------------------------------------
# Loading


def _fail(path: str, message: str) -> None:
    raise ModelFormatError(f"{path}: {message}")


def _get(obj: dict, key: str, kind: type, path: str, default: Any = ...) -> Any:
    if key not in obj:
        if default is not ...:
            return default
        _fail(path, f"missing key '{key}'")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        _fail(f"{path}.{key}", "expected an integer")
    if not isinstance(value, kind):
        _fail(f"{path}.{key}", f"expected {kind.__name__}")
    return value


def _parse_enum(enum_cls: type, value: str, path: str):
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        _fail(path, f"'{value}' is not one of: {allowed}")


def _parse_typeref(obj: Any, path: str, class_ids: set[str]) -> TypeRef:
    if not isinstance(obj, dict):
        _fail(path, "expected object")
    target = _get(obj, "target", str, path)
    mode = _parse_enum(RefMode, _get(obj, "mode", str, path, RefMode.VALUE.value), f"{path}.mode")
    args_raw = _get(obj, "template_args", list, path, [])
    args = tuple(
        _parse_typeref(a, f"{path}.template_args[{i}]", class_ids) for i, a in enumerate(args_raw)
    )
    # When the document does not say, a target that is no known class id is external.
    external = obj.get("external")
    if external is None:
        external = target not in class_ids
    elif not isinstance(external, bool):
        _fail(f"{path}.external", "expected bool")
    return TypeRef(target=target, mode=mode, external=external, template_args=args)


def _parse_field(obj: Any, path: str, class_ids: set[str]) -> FieldEntity:
    if not isinstance(obj, dict):
        _fail(path, "expected object")
    return FieldEntity(
        id=_get(obj, "id", str, path),
        name=_get(obj, "name", str, path),
        type_ref=_parse_typeref(_get(obj, "type_ref", dict, path), f"{path}.type_ref", class_ids),
        access=_parse_enum(Access, _get(obj, "access", str, path, "private"), f"{path}.access"),
    )


def _parse_method(obj: Any, path: str, class_ids: set[str]) -> MethodEntity:
    if not isinstance(obj, dict):
        _fail(path, "expected object")
    params_raw = _get(obj, "params", list, path, [])
    body_lines = _get(obj, "body_line_count", int, path, 0)
    call_sites = _get(obj, "call_site_count", int, path, 0)
    if body_lines < 0:
        _fail(f"{path}.body_line_count", "must be >= 0")
    if call_sites < 0:
        _fail(f"{path}.call_site_count", "must be >= 0")
    return MethodEntity(
        id=_get(obj, "id", str, path),
        name=_get(obj, "name", str, path),
        access=_parse_enum(Access, _get(obj, "access", str, path, "private"), f"{path}.access"),
        params=tuple(
            _parse_typeref(p, f"{path}.params[{i}]", class_ids) for i, p in enumerate(params_raw)
        ),
        body_line_count=body_lines,
        call_site_count=call_sites,
    )


def _parse_class(obj: Any, path: str, class_ids: set[str]) -> ClassEntity:
    if not isinstance(obj, dict):
        _fail(path, "expected object")
    line_count = _get(obj, "line_count", int, path, 1)
    if line_count < 1:
        _fail(f"{path}.line_count", "must be >= 1")
    return ClassEntity(
        id=_get(obj, "id", str, path),
        name=_get(obj, "name", str, path),
        package_id=_get(obj, "package_id", str, path),
        file_id=_get(obj, "file_id", str, path, ""),
        line_count=line_count,
        bases=tuple(
            _parse_typeref(b, f"{path}.bases[{i}]", class_ids)
            for i, b in enumerate(_get(obj, "bases", list, path, []))
        ),
        fields=tuple(
            _parse_field(f, f"{path}.fields[{i}]", class_ids)
            for i, f in enumerate(_get(obj, "fields", list, path, []))
        ),
        methods=tuple(
            _parse_method(m, f"{path}.methods[{i}]", class_ids)
            for i, m in enumerate(_get(obj, "methods", list, path, []))
        ),
    )


def _parse_repo_stats(obj: Any, path: str) -> RepoStats:
    if not isinstance(obj, dict):
        _fail(path, "expected object")
    files: dict[str, FileStats] = {}
    for file_id, entry in obj.items():
        entry_path = f"{path}.{file_id}"
        if not isinstance(entry, dict):
            _fail(entry_path, "expected object")
        commit_count = _get(entry, "commit_count", int, entry_path)
        if commit_count < 1:
            _fail(f"{entry_path}.commit_count", "must be >= 1")
        contributors = _get(entry, "contributors", list, entry_path)
        if not all(isinstance(c, str) for c in contributors):
            _fail(f"{entry_path}.contributors", "expected list of strings")
        files[file_id] = FileStats(
            commit_count=commit_count,
            contributors=frozenset(contributors),
            last_modified=_get(entry, "last_modified", int, entry_path),
        )
    return RepoStats(files=files)


def _validate(model: CodeModel) -> None:
    seen: set[str] = set()
    for entity_id in _all_entity_ids(model):
        if entity_id in seen:
            raise ModelValidationError(f"duplicate id '{entity_id}'")
        seen.add(entity_id)

    package_ids = {p.id for p in model.packages}
    class_ids = {c.id for c in model.classes}
    for p in model.packages:
        if not p.name:
            raise ModelValidationError(f"package '{p.id}' has an empty name")
    for c in model.classes:
        if c.package_id not in package_ids:
            raise ModelValidationError(
                f"class '{c.id}' references unknown package '{c.package_id}'"
            )
        field_names = [f.name for f in c.fields]
        if len(field_names) != len(set(field_names)):
            raise ModelValidationError(f"class '{c.id}' has duplicate field names")
        for ref in _all_refs(c):
            if not ref.external and ref.target not in class_ids:
                raise ModelValidationError(
                    f"class '{c.id}' references unknown class '{ref.target}'"
                )
    if model.repo_stats is not None:
        for file_id, stats in model.repo_stats.files.items():
            if stats.last_modified > model.reference_time:
                raise ModelValidationError(
                    f"file '{file_id}' modified after the model reference time"
                )


def _all_entity_ids(model: CodeModel) -> Iterator[str]:
    for p in model.packages:
        yield p.id
    for c in model.classes:
        yield c.id
        for f in c.fields:
            yield f.id
        for m in c.methods:
            yield m.id


def _all_refs(cls: ClassEntity) -> Iterator[TypeRef]:
    for ref in iter_typerefs(cls):
        yield ref
        yield from walk_template_args(ref)


def load_model(document: str) -> CodeModel:
    """Parse and validate a model document; unresolved type names become external refs."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"$: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        _fail("$", "expected top-level object")

    classes_raw = _get(doc, "classes", list, "$")
    class_ids = {
        c.get("id") for c in classes_raw if isinstance(c, dict) and isinstance(c.get("id"), str)
    }
    model = CodeModel(
        packages=tuple(
            PackageEntity(
                id=_get(p, "id", str, f"$.packages[{i}]"),
                name=_get(p, "name", str, f"$.packages[{i}]"),
                file_ids=tuple(_get(p, "file_ids", list, f"$.packages[{i}]", [])),
            )
            for i, p in enumerate(_get(doc, "packages", list, "$"))
            if isinstance(p, dict) or _fail(f"$.packages[{i}]", "expected object")
        ),
        classes=tuple(
            _parse_class(c, f"$.classes[{i}]", class_ids) for i, c in enumerate(classes_raw)
        ),
        repo_stats=(
            _parse_repo_stats(doc["repo_stats"], "$.repo_stats")
            if doc.get("repo_stats") is not None
            else None
        ),
        reference_time=_get(doc, "reference_time", int, "$", 0),
    )
    _validate(model)
    return model


# ---------------------------------------------------------------------------
# Saving


def _typeref_doc(ref: TypeRef) -> dict:
    return {
        "target": ref.target,
        "mode": ref.mode.value,
        "external": ref.external,
        "template_args": [_typeref_doc(a) for a in ref.template_args],
    }


def _class_doc(cls: ClassEntity) -> dict:
    return {
        "id": cls.id,
        "name": cls.name,
        "package_id": cls.package_id,
        "file_id": cls.file_id,
        "line_count": cls.line_count,
        "bases": [_typeref_doc(b) for b in cls.bases],
        "fields": [
            {
                "id": f.id,
                "name": f.name,
                "type_ref": _typeref_doc(f.type_ref),
                "access": f.access.value,
            }
            for f in cls.fields
        ],
        "methods": [
            {
                "id": m.id,
                "name": m.name,
                "access": m.access.value,
                "params": [_typeref_doc(p) for p in m.params],
                "body_line_count": m.body_line_count,
                "call_site_count": m.call_site_count,
            }
            for m in cls.methods
        ],
    }


def save_model(model: CodeModel) -> str:
    """Canonical serialization: keys sorted, entity lists sorted by id, stable bytes."""
    doc = {
        "reference_time": model.reference_time,
        "packages": [
            {"id": p.id, "name": p.name, "file_ids": list(p.file_ids)}
            for p in sorted(model.packages, key=lambda p: p.id)
        ],
        "classes": [_class_doc(c) for c in sorted(model.classes, key=lambda c: c.id)],
        "repo_stats": (
            {
                file_id: {
                    "commit_count": st.commit_count,
                    "contributors": sorted(st.contributors),
                    "last_modified": st.last_modified,
                }
                for file_id, st in model.repo_stats.files.items()
            }
            if model.repo_stats is not None
            else None
        ),
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Repository statistics


class RepoLogError(ValueError):
    """Malformed repository log line; message names the line number."""


def ingest_repo_stats(log: str, file_map: dict[str, str]) -> RepoStats:
    """Fold a commit log into per-file statistics.

    The log is a sequence of records: a ``commit <hash> <author> <unix-ts>``
    line followed by one path line per touched file. Paths missing from
    ``file_map`` are skipped with a warning.
    """
    counts: dict[str, int] = {}
    contributors: dict[str, set[str]] = {}
    last_modified: dict[str, int] = {}
    author: str | None = None
    timestamp = 0

    for lineno, raw in enumerate(log.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("commit "):
            parts = line.split()
            if len(parts) < 4:
                raise RepoLogError(f"line {lineno}: expected 'commit <hash> <author> <unix-ts>'")
            try:
                timestamp = int(parts[-1])
            except ValueError:
                raise RepoLogError(f"line {lineno}: timestamp '{parts[-1]}' is not an integer")
            author = " ".join(parts[2:-1])
            if not author:
                raise RepoLogError(f"line {lineno}: missing author")
            continue
        if author is None:
            raise RepoLogError(f"line {lineno}: file path before any commit line")
        file_id = file_map.get(line)
        if file_id is None:
            logger.warning("repo log line %d: path '%s' is not a model file, skipped", lineno, line)
            continue
        counts[file_id] = counts.get(file_id, 0) + 1
        contributors.setdefault(file_id, set()).add(author)
        last_modified[file_id] = max(last_modified.get(file_id, timestamp), timestamp)

    return RepoStats(
        files={
            file_id: FileStats(
                commit_count=counts[file_id],
                contributors=frozenset(contributors[file_id]),
                last_modified=last_modified[file_id],
            )
            for file_id in counts
        }
    )
