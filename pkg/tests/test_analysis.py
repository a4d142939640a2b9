import json
import random

import pytest

from arcades.analysis import (
    DEFAULT_STYLE,
    OverrideTemplate,
    SmellConfigError,
    compute_metrics,
    default_thresholds,
    evaluate_smells,
    register_predicate,
    BUILTIN_PREDICATES,
    smells_to_doc,
    smells_to_overrides,
)
from arcades.extract import SourceUnit, extract_units
from arcades.graph import DepKind, build_graph
from arcades.grouping import group_by_namespace
from arcades.model import FileStats, RepoStats, CodeModel
from randmodels import random_model


def analyzed(source: str):
    model, diags = extract_units([SourceUnit("fixture.moo", source)])
    assert diags == []
    graph = build_graph(model)
    grouping = group_by_namespace(model)
    return model, graph, compute_metrics(model, graph, grouping)


def test_inheritors_count():
    _, _, table = analyzed(
        "class Base {}; class D1 : public Base {}; class D2 : public Base {};"
        " class D3 : public Base {};"
    )
    assert table.classes["class:Base"].inheritors == 3
    assert table.classes["class:D1"].inheritors == 0


def test_absent_repo_stats_zeroes_group_history():
    _, _, table = analyzed("namespace a { class X {}; }")
    g = table.groups["pkg:a"]
    assert g.summative_age_days == 0.0
    assert g.total_commits == 0
    assert g.contributor_count == 0


def test_access_split_and_member_count():
    _, _, table = analyzed(
        "class C { public: void a(); void b(); private: void c(); int f1; int f2; };"
    )
    c = table.classes["class:C"]
    assert c.public_methods == 2
    assert c.private_methods == 1
    assert c.method_count == 3
    assert c.field_count == 2
    assert c.member_count == 5


def test_components_and_deployments_and_parts():
    _, _, table = analyzed(
        """\
class A {};
class B { A a; };
class C { A a2; void f(A* p); };
class D { void g(A& r); };
"""
    )
    a = table.classes["class:A"]
    assert a.components == 2  # embedded by B and C
    assert a.deployments == 2  # used by C and D
    assert table.classes["class:B"].parts_count == 1
    assert table.classes["class:C"].parts_count == 1


def test_identities_on_random_models():
    rng = random.Random(41)
    for _ in range(100):
        model = random_model(rng)
        graph = build_graph(model)
        table = compute_metrics(model, graph, group_by_namespace(model))
        for cid, c in table.classes.items():
            assert c.member_count == c.field_count + c.method_count
            assert c.public_methods + c.private_methods == c.method_count
            in_isa = {e.referrer for e in graph.edges if e.referent == cid and e.kind is DepKind.IS_A}
            in_part = [e for e in graph.edges if e.referent == cid and e.kind is DepKind.PART_OF]
            in_uses = {e.referrer for e in graph.edges if e.referent == cid and e.kind is DepKind.USES}
            assert c.inheritors == len(in_isa)
            assert c.components == len(in_part)
            assert c.deployments == len(in_uses)


def test_summative_age_hand_computed():
    model, diags = extract_units(
        [
            SourceUnit("one.moo", "namespace a { class X {}; }"),
            SourceUnit("two.moo", "namespace a { class Y {}; }"),
        ]
    )
    assert diags == []
    reference = 1_000_000 * 86400
    stats = RepoStats(
        files={
            "one.moo": FileStats(2, frozenset({"ann"}), reference - 3 * 86400),
            "two.moo": FileStats(5, frozenset({"ann", "bo"}), reference - 10 * 86400),
        }
    )
    model = CodeModel(
        packages=model.packages,
        classes=model.classes,
        repo_stats=stats,
        reference_time=reference,
    )
    table = compute_metrics(model, build_graph(model), group_by_namespace(model))
    g = table.groups["pkg:a"]
    assert g.summative_age_days == pytest.approx(13.0)
    assert g.total_commits == 7
    assert g.contributor_count == 2


def test_group_loc_sums_line_counts():
    model, _ = extract_units(
        [SourceUnit("m.moo", "namespace a {\nclass X {\nint v;\n};\nclass Y {};\n}")]
    )
    table = compute_metrics(model, build_graph(model), group_by_namespace(model))
    expected = sum(c.line_count for c in model.classes)
    assert table.groups["pkg:a"].loc == expected


# ---------------------------------------------------------------------------
# Smells


def test_pod_class_detected():
    model, graph, table = analyzed("class Plain { int a; int b; };")
    records = evaluate_smells(table, graph)
    pods = [r for r in records if r.predicate == "pod_class"]
    assert len(pods) == 1
    assert pods[0].class_id == "class:Plain"
    assert pods[0].severity == 1.0


def test_long_parameter_list_severity_at_threshold():
    source = "class C { void f(int a, int b, int c, int d, int e, int f); };"
    model, graph, table = analyzed(source)
    records = evaluate_smells(table, graph)
    hits = [r for r in records if r.predicate == "long_parameter_list"]
    assert len(hits) == 1
    assert hits[0].severity == pytest.approx(0.5)
    assert hits[0].method_id == "method:C::f@0"


def test_empty_model_empty_catalogue():
    model, graph, table = analyzed("")
    assert evaluate_smells(table, graph) == []


def test_god_class_threshold():
    members = " ".join(f"int f{i};" for i in range(39)) + " void m();"
    model, graph, table = analyzed(f"class Big {{ {members} }};")
    records = evaluate_smells(table, graph)
    gods = [r for r in records if r.predicate == "god_class"]
    assert len(gods) == 1
    assert gods[0].evidence["member_count"] == 40.0
    quiet = evaluate_smells(table, graph, {"god_class": 41})
    assert [r for r in quiet if r.predicate == "god_class"] == []


def test_merge_candidate_fixture():
    source = """\
class Mesh { Buffer* a; void attach(Buffer* b); void detach(Buffer* b); };
class Buffer { Mesh* owner; };
"""
    model, graph, table = analyzed(source)
    records = evaluate_smells(table, graph)
    merges = [r for r in records if r.predicate == "class_merge_candidate"]
    assert len(merges) == 1
    assert merges[0].pair == ("class:Buffer", "class:Mesh")
    assert merges[0].evidence["combined_multiplicity"] == 4.0


def test_non_modular_packages_fires_on_dense_inter_edges():
    source = """\
namespace a { class X { b::P* p; b::Q* q; }; class Y { X val; }; }
namespace b { class P { Q val; }; class Q {}; }
"""
    model, graph, table = analyzed(source)
    records = evaluate_smells(table, graph)
    hits = [r for r in records if r.predicate == "non_modular_packages"]
    assert len(hits) == 1
    assert hits[0].pair == ("pkg:a", "pkg:b")
    # inter = 2, both intra sums = 1 -> ratio 2 >= 1
    assert hits[0].evidence["inter_multiplicity"] == 2.0


def test_monotonicity_raising_thresholds():
    rng = random.Random(55)
    for _ in range(20):
        model = random_model(rng)
        graph = build_graph(model)
        table = compute_metrics(model, graph, group_by_namespace(model))
        base = {r.id for r in evaluate_smells(table, graph)}
        for key, default in default_thresholds().items():
            raised = evaluate_smells(table, graph, {key: default * 2})
            assert {r.id for r in raised} <= base


def test_unknown_threshold_key():
    model, graph, table = analyzed("class C {};")
    with pytest.raises(SmellConfigError, match="mystery"):
        evaluate_smells(table, graph, {"mystery": 3})


def test_pod_class_not_configurable():
    model, graph, table = analyzed("class C {};")
    with pytest.raises(SmellConfigError):
        evaluate_smells(table, graph, {"pod_class": 1})


def test_catalogue_deterministic_bytes():
    rng = random.Random(77)
    model = random_model(rng)
    graph = build_graph(model)
    table = compute_metrics(model, graph, group_by_namespace(model))
    a = json.dumps(smells_to_doc(evaluate_smells(table, graph)), sort_keys=True)
    b = json.dumps(smells_to_doc(evaluate_smells(table, graph)), sort_keys=True)
    assert a == b


def test_custom_predicate_registration():
    def no_call_sites(ctx, threshold):
        for mid, m in ctx.table.methods.items():
            if m.call_sites == 0 and m.size_lines >= threshold:
                yield ctx.table.method_owner[mid], mid, None, float(m.size_lines), {
                    "size_lines": float(m.size_lines)
                }

    register_predicate("inert_method", no_call_sites, 1.0)
    try:
        source = "class C { void f() {\nint x;\nint y;\n} };"
        model, graph, table = analyzed(source)
        records = evaluate_smells(table, graph)
        assert any(r.predicate == "inert_method" for r in records)
    finally:
        del BUILTIN_PREDICATES["inert_method"]


# ---------------------------------------------------------------------------
# Overrides


def test_pod_override_is_red():
    model, graph, table = analyzed("class Plain { int a; };")
    records = evaluate_smells(table, graph)
    overrides = smells_to_overrides(records)
    pod = next(o for o in overrides if o.target == "class:Plain")
    assert pod.color == (1.0, 0.0, 0.0, 1.0)


def test_god_class_override_at_max_severity():
    members = " ".join(f"int f{i};" for i in range(80))
    model, graph, table = analyzed(f"class Huge {{ {members} }};")
    records = [r for r in evaluate_smells(table, graph) if r.predicate == "god_class"]
    assert records[0].severity == 1.0
    (override,) = smells_to_overrides(records)
    template = DEFAULT_STYLE["god_class"]
    assert override.texture == "cracked"
    assert override.illumination == pytest.approx(template.illumination_max)


def test_empty_records_empty_overrides():
    assert smells_to_overrides([]) == []


def test_missing_template_falls_back_to_highlight():
    model, graph, table = analyzed("class Plain { int a; };")
    records = evaluate_smells(table, graph)
    overrides = smells_to_overrides(records, style={})
    assert overrides[0].color == (1.0, 0.85, 0.1, 0.8)
    assert overrides[0].illumination is not None


def test_severity_interpolates_scale():
    style = {
        "pod_class": OverrideTemplate(
            scale_min=(1.0, 1.0, 1.0), scale_max=(2.0, 3.0, 2.0)
        )
    }
    model, graph, table = analyzed("class Plain { int a; };")
    records = evaluate_smells(table, graph)  # pod severity 1.0
    (override,) = smells_to_overrides(
        [r for r in records if r.predicate == "pod_class"], style
    )
    assert override.scale == (2.0, 3.0, 2.0)
