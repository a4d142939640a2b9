import random

import pytest

from arcades.extract import (
    LinkError,
    SourceUnit,
    extract_units,
    link_units,
    parse_unit,
)
from arcades.model import RefMode, save_model


def parse(text, name="test.moo"):
    return parse_unit(SourceUnit(name=name, text=text))


def test_minimal_namespace_and_class():
    fragment, diags = parse("namespace a { class P { }; }")
    assert diags == []
    assert fragment.namespaces == [("a",)]
    assert len(fragment.classes) == 1
    cls = fragment.classes[0]
    assert cls.name == "P"
    assert cls.namespace == ("a",)
    assert cls.methods == ()
    assert cls.fields == ()


def test_call_site_counting():
    text = """\
namespace a {
  class C {
  public:
    void run() { setup(); }
    void go(int n, Thing* t) { x(); y(z()); }
  private:
    void hidden();
  };
}
"""
    fragment, diags = parse(text)
    assert diags == []
    cls = fragment.classes[0]
    assert [m.name for m in cls.methods] == ["run", "go", "hidden"]
    go = cls.methods[1]
    assert len(go.params) == 2
    assert go.call_site_count == 3
    assert [m.access.value for m in cls.methods] == ["public", "public", "private"]


def test_control_keywords_not_call_sites():
    text = "class C { void f() { if (a) { while (b) { go(); } } return (c); for (;;) {} } };"
    fragment, diags = parse(text)
    assert diags == []
    assert fragment.classes[0].methods[0].call_site_count == 1


def test_broken_class_yields_diagnostic_and_empty_fragment():
    fragment, diags = parse("class {")
    assert fragment.classes == []
    assert len(diags) == 1
    assert diags[0].severity == "error"
    assert diags[0].line == 1


def test_error_recovery_keeps_following_class():
    text = "class Broken { int ; };\nclass Good { };\n"
    fragment, diags = parse(text)
    assert [c.name for c in fragment.classes] == ["Good"]
    assert len(diags) == 1


def test_recovery_inside_namespace():
    text = "namespace a { class Broken { ?; }; class Good {}; }"
    fragment, diags = parse(text)
    assert [c.name for c in fragment.classes] == ["Good"]
    assert fragment.classes[0].namespace == ("a",)
    assert diags


def test_default_access_is_private():
    fragment, _ = parse("class C { int x; void f(); };")
    cls = fragment.classes[0]
    assert cls.fields[0].access.value == "private"
    assert cls.methods[0].access.value == "private"


def test_body_line_span():
    text = """\
class C {
  void one() { a(); }
  void four() {
    a();
    b();
  }
};
"""
    fragment, _ = parse(text)
    one, four = fragment.classes[0].methods
    assert one.body_line_count == 0
    assert four.body_line_count == 3
    assert one.call_site_count == 1
    assert four.call_site_count == 2


def test_typeref_modes_and_templates():
    text = "class C { List<Map<K, V*>>& items; void f(A* a, B& b, C c); };"
    fragment, diags = parse(text)
    assert diags == []
    cls = fragment.classes[0]
    items = cls.fields[0].type_ref
    assert items.name == "List"
    assert items.mode is RefMode.REFERENCE
    inner = items.template_args[0]
    assert inner.name == "Map"
    assert [a.name for a in inner.template_args] == ["K", "V"]
    assert inner.template_args[1].mode is RefMode.POINTER
    modes = [p.mode for p in cls.methods[0].params]
    assert modes == [RefMode.POINTER, RefMode.REFERENCE, RefMode.VALUE]


def test_link_resolves_value_field_across_units():
    ux = SourceUnit("x.moo", "namespace a { class X { }; }")
    uy = SourceUnit("y.moo", "namespace a { class Y { X member; }; }")
    model, diags = extract_units([ux, uy])
    assert diags == []
    y = next(c for c in model.classes if c.name == "Y")
    ref = y.fields[0].type_ref
    assert not ref.external
    assert ref.target == "class:a::X"


def test_undeclared_pointer_is_external():
    model, _ = extract_units([SourceUnit("u.moo", "class C { Undeclared* p; };")])
    ref = model.classes[0].fields[0].type_ref
    assert ref.external
    assert ref.target == "Undeclared"
    assert ref.mode is RefMode.POINTER


def test_same_name_distinct_namespaces():
    units = [
        SourceUnit("a.moo", "namespace a { class X {}; }"),
        SourceUnit("b.moo", "namespace b { class X {}; }"),
    ]
    model, _ = extract_units(units)
    assert sorted(c.id for c in model.classes) == ["class:a::X", "class:b::X"]


def test_duplicate_qualified_name_names_both_files():
    units = [
        SourceUnit("one.moo", "namespace a { class X {}; }"),
        SourceUnit("two.moo", "namespace a { class X {}; }"),
    ]
    with pytest.raises(LinkError) as err:
        extract_units(units)
    assert "one.moo" in str(err.value)
    assert "two.moo" in str(err.value)


def test_nested_namespace_package_identity():
    model, _ = extract_units(
        [SourceUnit("n.moo", "namespace a { namespace b { class X {}; } }")]
    )
    cls = model.classes[0]
    assert cls.package_id == "pkg:a::b"
    names = {p.name for p in model.packages}
    assert names == {"a", "a::b"}


def test_innermost_namespace_wins_resolution():
    text = """\
namespace a {
  class T {};
  namespace b {
    class T {};
    class U { T member; };
  }
}
"""
    model, _ = extract_units([SourceUnit("r.moo", text)])
    u = next(c for c in model.classes if c.name == "U")
    assert u.fields[0].type_ref.target == "class:a::b::T"


def test_qualified_reference_from_sibling_namespace():
    text = "namespace a { class X {}; } namespace b { class Y { a::X* link; }; }"
    model, _ = extract_units([SourceUnit("q.moo", text)])
    y = next(c for c in model.classes if c.name == "Y")
    assert y.fields[0].type_ref.target == "class:a::X"


def test_determinism_across_file_order():
    units = [
        SourceUnit("x.moo", "namespace a { class X { Y* y; }; }"),
        SourceUnit("y.moo", "namespace a { class Y { X val; }; }"),
        SourceUnit("z.moo", "namespace b { class Z : public a::X {}; }"),
    ]
    model_fwd, _ = extract_units(units)
    model_rev, _ = extract_units(list(reversed(units)))
    assert save_model(model_fwd) == save_model(model_rev)


def test_line_accounting_invariant():
    rng = random.Random(77)
    for _ in range(40):
        text = _random_valid_source(rng)
        model, diags = extract_units([SourceUnit("gen.moo", text)])
        assert diags == []
        for cls in model.classes:
            assert sum(m.body_line_count for m in cls.methods) <= cls.line_count


def test_methods_sharing_a_line_still_satisfy_accounting():
    text = "class C { void f(){ a(); } void g(){ b(); } };"
    model, _ = extract_units([SourceUnit("one.moo", text)])
    cls = model.classes[0]
    assert cls.line_count == 1
    assert sum(m.body_line_count for m in cls.methods) == 0


def test_parsing_is_total_on_noise():
    rng = random.Random(3)
    alphabet = "abc{}();:<>,*&/\"'\n \t0123456789_#@!%"
    for _ in range(300):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 120)))
        fragment, diags = parse(text, "noise.moo")
        assert isinstance(fragment.classes, list)
        assert all(d.line >= 1 and d.column >= 1 for d in diags)


def test_comments_are_skipped():
    text = "// heading\nclass C { /* int gone; */ int kept; };"
    fragment, diags = parse(text)
    assert diags == []
    assert [f.name for f in fragment.classes[0].fields] == ["kept"]


def _random_valid_source(rng: random.Random) -> str:
    lines = []
    class_counter = 0
    for _ in range(rng.randint(1, 3)):
        ns = f"n{rng.randint(0, 2)}"
        lines.append(f"namespace {ns} {{")
        for _ in range(rng.randint(1, 3)):
            name = f"K{class_counter}"
            class_counter += 1
            lines.append(f"class {name} {{")
            if rng.random() < 0.5:
                lines.append("public:")
            for f in range(rng.randint(0, 3)):
                lines.append(f"  int field{f};")
            for m in range(rng.randint(0, 4)):
                if rng.random() < 0.4:
                    lines.append(f"  void m{m}();")
                else:
                    lines.append(f"  void m{m}() {{")
                    for _ in range(rng.randint(0, 5)):
                        lines.append(f"    call{rng.randint(0, 9)}();")
                    lines.append("  }")
            lines.append("};")
        lines.append("}")
    return "\n".join(lines) + "\n"


def test_mutation_fuzz_never_crashes():
    # delete/insert/duplicate random chunks of a valid source; the parser
    # must always return a fragment plus diagnostics, never raise
    rng = random.Random(2024)
    base = _random_valid_source(random.Random(1))
    tokens_pool = ["class", "namespace", "{", "}", ";", "(", ")", "<", ">", "::", "public:", "*"]
    for _ in range(300):
        text = base
        for _ in range(rng.randint(1, 6)):
            op = rng.random()
            pos = rng.randint(0, max(0, len(text) - 1))
            if op < 0.4 and text:
                cut = rng.randint(1, min(15, len(text) - pos) or 1)
                text = text[:pos] + text[pos + cut :]
            elif op < 0.8:
                text = text[:pos] + rng.choice(tokens_pool) + text[pos:]
            else:
                chunk = text[pos : pos + 10]
                text = text[:pos] + chunk + text[pos:]
        fragment, diags = parse(text, "mutant.moo")
        assert isinstance(fragment.classes, list)
        assert all(d.line >= 1 and d.column >= 1 for d in diags)
