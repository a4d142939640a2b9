"""MiniOO source extraction: per-file parsing and cross-file linking.

MiniOO is a small object-oriented language: nested namespaces, classes with
base lists, public/private sections, typed fields and methods. Method bodies
are treated as brace-balanced token streams; only their line span and call
sites (``identifier(`` pairs, control keywords excluded) are extracted.

``parse_unit`` is pure per file and may run concurrently; ``link_units`` is
the single-threaded merge that resolves type names and assigns entity ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    Access,
    ClassEntity,
    CodeModel,
    FieldEntity,
    MethodEntity,
    PackageEntity,
    RefMode,
    TypeRef,
)

KEYWORDS = {"namespace", "class", "public", "private"}
NON_CALL_KEYWORDS = {"if", "while", "for", "switch", "return"}

GLOBAL_NAMESPACE = "::"
SOURCE_SUFFIX = ".moo"


@dataclass(frozen=True)
class SourceUnit:
    name: str
    text: str


@dataclass(frozen=True)
class ParseDiagnostic:
    file: str
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}: {self.severity}: {self.message}"


# Raw, unresolved declarations produced per unit; ids are assigned at link time.


@dataclass(frozen=True)
class RawTypeRef:
    name: str  # '::'-joined qualified name as written
    mode: RefMode = RefMode.VALUE
    template_args: tuple["RawTypeRef", ...] = ()


@dataclass(frozen=True)
class RawField:
    name: str
    type_ref: RawTypeRef
    access: Access


@dataclass(frozen=True)
class RawMethod:
    name: str
    access: Access
    params: tuple[RawTypeRef, ...]
    body_line_count: int
    call_site_count: int


@dataclass(frozen=True)
class RawClass:
    name: str
    namespace: tuple[str, ...]
    file: str
    first_line: int
    last_line: int
    bases: tuple[RawTypeRef, ...]
    fields: tuple[RawField, ...]
    methods: tuple[RawMethod, ...]

    @property
    def qualified_name(self) -> str:
        return "::".join(self.namespace + (self.name,))


@dataclass
class UnitFragment:
    file: str
    namespaces: list[tuple[str, ...]] = field(default_factory=list)
    classes: list[RawClass] = field(default_factory=list)


class LinkError(ValueError):
    """Conflicting declarations across units (duplicate fully-qualified names)."""


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | string | punct | eof
    value: str
    line: int
    column: int


def _tokenize(text: str) -> tuple[list[Token], list[tuple[int, int, str]]]:
    """Split into tokens; bad characters are reported, never fatal."""
    tokens: list[Token] = []
    problems: list[tuple[int, int, str]] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(count: int) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance(1)
            continue
        if text.startswith("/*", i):
            start_line, start_col = line, col
            advance(2)
            while i < n and not text.startswith("*/", i):
                advance(1)
            if i >= n:
                problems.append((start_line, start_col, "unterminated block comment"))
            else:
                advance(2)
            continue
        if ch.isalpha() or ch == "_":
            start = i
            start_line, start_col = line, col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                advance(1)
            tokens.append(Token("ident", text[start:i], start_line, start_col))
            continue
        if ch.isdigit():
            start = i
            start_line, start_col = line, col
            while i < n and (text[i].isalnum() or text[i] in "._"):
                advance(1)
            tokens.append(Token("number", text[start:i], start_line, start_col))
            continue
        if ch in "\"'":
            quote = ch
            start_line, start_col = line, col
            advance(1)
            buf = []
            while i < n and text[i] != quote:
                if text[i] == "\\" and i + 1 < n:
                    buf.append(text[i : i + 2])
                    advance(2)
                else:
                    if text[i] == "\n":
                        break
                    buf.append(text[i])
                    advance(1)
            if i < n and text[i] == quote:
                advance(1)
            else:
                problems.append((start_line, start_col, "unterminated string literal"))
            tokens.append(Token("string", "".join(buf), start_line, start_col))
            continue
        if text.startswith("::", i):
            tokens.append(Token("punct", "::", line, col))
            advance(2)
            continue
        tokens.append(Token("punct", ch, line, col))
        advance(1)

    tokens.append(Token("eof", "", line, col))
    return tokens, problems


# ---------------------------------------------------------------------------
# Parser


class _SyntaxError(Exception):
    def __init__(self, token: Token, message: str):
        super().__init__(message)
        self.token = token
        self.message = message
        self.open_depth = 0  # braces the failed construct left unclosed


class _Parser:
    def __init__(self, unit: SourceUnit):
        self.unit = unit
        self.tokens, lex_problems = _tokenize(unit.text)
        self.pos = 0
        self.diagnostics: list[ParseDiagnostic] = [
            ParseDiagnostic(unit.name, ln, col, msg, "warning") for ln, col, msg in lex_problems
        ]
        self.fragment = UnitFragment(file=unit.name)

    # -- token helpers

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok.value == value and tok.kind in ("ident", "punct")

    def expect(self, value: str, what: str) -> Token:
        tok = self.peek()
        if not self.at(value):
            raise _SyntaxError(tok, f"expected {what}")
        return self.next()

    def expect_ident(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.value in KEYWORDS:
            raise _SyntaxError(tok, f"expected {what}")
        return self.next()

    def error(self, err: _SyntaxError) -> None:
        self.diagnostics.append(
            ParseDiagnostic(self.unit.name, err.token.line, err.token.column, err.message)
        )

    def recover(self, depth: int = 0) -> None:
        """Skip to the next plausible declaration.

        Stops at a namespace/class keyword at the current unit's nesting
        level, or at any depth when the keyword clearly opens a declaration
        (followed by a name and '{' or ':'): garbage braces in the broken
        construct must not swallow the rest of the file.
        """
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return
            if tok.kind == "ident" and tok.value in ("namespace", "class"):
                if depth == 0:
                    return
                name = self.peek(1)
                opener = self.peek(2)
                if (
                    name.kind == "ident"
                    and name.value not in KEYWORDS
                    and opener.value in ("{", ":")
                ):
                    return
            if tok.value == "{":
                depth += 1
            elif tok.value == "}":
                if depth == 0:
                    return  # closes the enclosing unit; its parser consumes it
                depth -= 1
            self.next()

    # -- grammar

    def parse(self) -> tuple[UnitFragment, list[ParseDiagnostic]]:
        self.parse_unit_items(namespace=(), top_level=True)
        return self.fragment, self.diagnostics

    def parse_unit_items(self, namespace: tuple[str, ...], top_level: bool) -> None:
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return
            if not top_level and tok.value == "}":
                return
            try:
                if self.at("namespace"):
                    self.parse_namespace(namespace)
                elif self.at("class"):
                    cls = self.parse_class(namespace)
                    self.fragment.classes.append(cls)
                else:
                    raise _SyntaxError(tok, "expected 'namespace' or 'class'")
            except _SyntaxError as err:
                self.error(err)
                before = self.pos
                self.recover(err.open_depth)
                if self.pos == before:
                    self.next()  # force progress past a stray token

    def parse_namespace(self, namespace: tuple[str, ...]) -> None:
        self.expect("namespace", "'namespace'")
        name = self.expect_ident("namespace name")
        inner = namespace + (name.value,)
        if inner not in self.fragment.namespaces:
            self.fragment.namespaces.append(inner)
        self.expect("{", "'{' after namespace name")
        self.parse_unit_items(inner, top_level=False)
        self.expect("}", "'}' closing namespace")

    def parse_class(self, namespace: tuple[str, ...]) -> RawClass:
        first = self.expect("class", "'class'")
        name = self.expect_ident("class name")
        bases: list[RawTypeRef] = []
        if self.at(":"):
            self.next()
            bases.append(self.parse_base())
            while self.at(","):
                self.next()
                bases.append(self.parse_base())
        self.expect("{", "'{' opening class body")
        access = Access.PRIVATE
        fields: list[RawField] = []
        methods: list[RawMethod] = []
        try:
            while not self.at("}"):
                tok = self.peek()
                if tok.kind == "eof":
                    raise _SyntaxError(tok, "unterminated class body")
                if tok.value in ("public", "private") and self.peek(1).value == ":":
                    self.next()
                    self.next()
                    access = Access.PUBLIC if tok.value == "public" else Access.PRIVATE
                    continue
                member = self.parse_member(access)
                if isinstance(member, RawField):
                    fields.append(member)
                else:
                    methods.append(member)
        except _SyntaxError as err:
            err.open_depth = max(err.open_depth, 1)
            raise
        last = self.expect("}", "'}' closing class body")
        if self.at(";"):
            last = self.next()
        else:
            self.error(_SyntaxError(self.peek(), "expected ';' after class body"))
        return RawClass(
            name=name.value,
            namespace=namespace,
            file=self.unit.name,
            first_line=first.line,
            last_line=last.line,
            bases=tuple(bases),
            fields=tuple(fields),
            methods=tuple(methods),
        )

    def parse_base(self) -> RawTypeRef:
        if self.at("public"):
            self.next()
        return RawTypeRef(name=self.parse_qualified_name())

    def parse_qualified_name(self) -> str:
        parts = [self.expect_ident("type name").value]
        while self.at("::"):
            self.next()
            parts.append(self.expect_ident("name after '::'").value)
        return "::".join(parts)

    def parse_typeref(self) -> RawTypeRef:
        name = self.parse_qualified_name()
        args: list[RawTypeRef] = []
        if self.at("<"):
            self.next()
            args.append(self.parse_typeref())
            while self.at(","):
                self.next()
                args.append(self.parse_typeref())
            self.expect(">", "'>' closing template arguments")
        mode = RefMode.VALUE
        if self.at("*"):
            self.next()
            mode = RefMode.POINTER
        elif self.at("&"):
            self.next()
            mode = RefMode.REFERENCE
        return RawTypeRef(name=name, mode=mode, template_args=tuple(args))

    def parse_member(self, access: Access) -> RawField | RawMethod:
        type_ref = self.parse_typeref()
        name = self.expect_ident("member name")
        if self.at(";"):
            self.next()
            return RawField(name=name.value, type_ref=type_ref, access=access)
        if self.at("("):
            self.next()
            params: list[RawTypeRef] = []
            if not self.at(")"):
                params.append(self.parse_param())
                while self.at(","):
                    self.next()
                    params.append(self.parse_param())
            self.expect(")", "')' closing parameter list")
            if self.at(";"):
                self.next()
                body_lines, call_sites = 0, 0
            elif self.at("{"):
                body_lines, call_sites = self.parse_block()
            else:
                raise _SyntaxError(self.peek(), "expected ';' or method body")
            return RawMethod(
                name=name.value,
                access=access,
                params=tuple(params),
                body_line_count=body_lines,
                call_site_count=call_sites,
            )
        raise _SyntaxError(self.peek(), "expected ';' or '(' after member name")

    def parse_param(self) -> RawTypeRef:
        ref = self.parse_typeref()
        tok = self.peek()
        if tok.kind == "ident" and tok.value not in KEYWORDS:
            self.next()  # optional parameter name
        return ref

    def parse_block(self) -> tuple[int, int]:
        """Consume a brace-balanced body; return (line span, call-site count).

        The span is the newline count between the braces, so single-line
        bodies (and bodies sharing a line) count zero lines.
        """
        open_tok = self.expect("{", "'{'")
        depth = 1
        call_sites = 0
        prev: Token | None = None
        last_line = open_tok.line
        while depth > 0:
            tok = self.next()
            if tok.kind == "eof":
                raise _SyntaxError(tok, "unterminated method body")
            if tok.value == "{" and tok.kind == "punct":
                depth += 1
            elif tok.value == "}" and tok.kind == "punct":
                depth -= 1
            if (
                tok.kind == "punct"
                and tok.value == "("
                and prev is not None
                and prev.kind == "ident"
                and prev.value not in NON_CALL_KEYWORDS
            ):
                call_sites += 1
            prev = tok
            last_line = tok.line
        return last_line - open_tok.line, call_sites


def parse_unit(unit: SourceUnit) -> tuple[UnitFragment, list[ParseDiagnostic]]:
    """Parse one source file; syntax errors yield diagnostics, never exceptions."""
    return _Parser(unit).parse()


# ---------------------------------------------------------------------------
# Linking


def _package_id(namespace: tuple[str, ...]) -> str:
    return "pkg:" + ("::".join(namespace) if namespace else GLOBAL_NAMESPACE)


def _class_id(qualified_name: str) -> str:
    return "class:" + qualified_name


def _resolve(
    raw: RawTypeRef, context: tuple[str, ...], declared: dict[str, str]
) -> TypeRef:
    """Resolve a written name against declared classes, innermost namespace first."""
    target = None
    for depth in range(len(context), -1, -1):
        candidate = "::".join(context[:depth] + (raw.name,))
        if candidate in declared:
            target = declared[candidate]
            break
    args = tuple(_resolve(a, context, declared) for a in raw.template_args)
    if target is None:
        return TypeRef(target=raw.name, mode=raw.mode, external=True, template_args=args)
    return TypeRef(target=target, mode=raw.mode, external=False, template_args=args)


def link_units(fragments: list[UnitFragment]) -> CodeModel:
    """Merge per-file fragments into one model, resolving all type names.

    Output is independent of fragment order: packages and classes are sorted
    by id, and duplicate fully-qualified class names are an error either way.
    """
    declared: dict[str, str] = {}
    declaring_file: dict[str, str] = {}
    for fragment in sorted(fragments, key=lambda f: f.file):
        for cls in fragment.classes:
            fq = cls.qualified_name
            if fq in declared:
                files = sorted({declaring_file[fq], cls.file})
                raise LinkError(
                    f"class '{fq}' declared in both '{files[0]}' and '{files[1]}'"
                )
            declared[fq] = _class_id(fq)
            declaring_file[fq] = cls.file

    package_files: dict[tuple[str, ...], set[str]] = {}
    for fragment in fragments:
        for ns in fragment.namespaces:
            package_files.setdefault(ns, set()).add(fragment.file)
        for cls in fragment.classes:
            package_files.setdefault(cls.namespace, set()).add(fragment.file)

    classes: list[ClassEntity] = []
    for fragment in fragments:
        for raw in fragment.classes:
            fq = raw.qualified_name
            cid = declared[fq]
            fields = tuple(
                FieldEntity(
                    id=f"field:{fq}::{f.name}",
                    name=f.name,
                    type_ref=_resolve(f.type_ref, raw.namespace, declared),
                    access=f.access,
                )
                for f in raw.fields
            )
            methods = tuple(
                MethodEntity(
                    id=f"method:{fq}::{m.name}@{index}",
                    name=m.name,
                    access=m.access,
                    params=tuple(_resolve(p, raw.namespace, declared) for p in m.params),
                    body_line_count=m.body_line_count,
                    call_site_count=m.call_site_count,
                )
                for index, m in enumerate(raw.methods)
            )
            classes.append(
                ClassEntity(
                    id=cid,
                    name=raw.name,
                    package_id=_package_id(raw.namespace),
                    file_id=raw.file,
                    line_count=raw.last_line - raw.first_line + 1,
                    bases=tuple(_resolve(b, raw.namespace, declared) for b in raw.bases),
                    fields=fields,
                    methods=methods,
                )
            )

    packages = tuple(
        sorted(
            (
                PackageEntity(
                    id=_package_id(ns),
                    name="::".join(ns) if ns else GLOBAL_NAMESPACE,
                    file_ids=tuple(sorted(files)),
                )
                for ns, files in package_files.items()
            ),
            key=lambda p: p.id,
        )
    )
    return CodeModel(
        packages=packages,
        classes=tuple(sorted(classes, key=lambda c: c.id)),
    )


def extract_units(units: list[SourceUnit]) -> tuple[CodeModel, list[ParseDiagnostic]]:
    """Parse every unit and link the fragments into one model."""
    fragments = []
    diagnostics: list[ParseDiagnostic] = []
    for unit in units:
        fragment, diags = parse_unit(unit)
        fragments.append(fragment)
        diagnostics.extend(diags)
    return link_units(fragments), diagnostics
