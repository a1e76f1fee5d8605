"""Acceptance suite: one test per criterion, one printed pass line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the report lines.
All tolerances are exact (byte equality / set equality); the only numeric
budgets are the wall-clock bounds stated inline.
"""

from __future__ import annotations

import random
import time
from pathlib import Path

import pytest

from conftest import DEMO_DIR, start_portal
from corpus import OntologyFactory, random_corpus
from oracle import Oracle
from hibou.cli import main as cli_main
from hibou.decision import recommend
from hibou.form import build_form, choose_widget, emit_xml, visible_properties
from hibou.hfs import parse_ontology, serialize_ontology
from hibou.model import Atomic, DecisionConfig, ObjectSome
from hibou.reasoner import classify, entails_instance, entails_subclass
from hibou.server import ServerConfig
from hibou.session import restore_session
from hibou.uiconfig import DEFAULT_UI_CONFIG, parse_ui_config, resolve_config

FRAIL_ELDERLY = (
    "Ontology(onc) Class(Patient) Class(Treatment) Class(Chemotherapy) Class(GentleChemo)"
    " Class(ElderlyPatient) Class(FrailElderlyPatient) ObjectProperty(reco)"
    " SubClassOf(Chemotherapy Treatment) SubClassOf(GentleChemo Chemotherapy)"
    " SubClassOf(ElderlyPatient Patient) SubClassOf(FrailElderlyPatient ElderlyPatient)"
    " SubClassOf(ElderlyPatient ObjectSomeValuesFrom(reco Chemotherapy))"
    " SubClassOf(FrailElderlyPatient ObjectSomeValuesFrom(reco GentleChemo))"
    " ClassAssertion(FrailElderlyPatient i)"
)

CORPUS_SIZE = 500
DEMO_STEPS = [
    ("diagnosis", "breast_cancer"),
    ("age", 76),
    ("tumorSizeMm", 18),
    ("receptorStatus", "er_positive"),
    ("performanceStatus", 1),
    ("notes", "routine referral"),
]


def _report(criterion: str) -> None:
    print(f"ACCEPTANCE PASS: {criterion}")


@pytest.fixture(scope="module")
def corpus():
    return random_corpus(CORPUS_SIZE, base_seed=20260808)


def test_criterion_reasoner_oracle_equivalence(corpus):
    """All subsumption and instance answers match the naive oracle; < 60 s."""
    started = time.perf_counter()
    rng = random.Random(11)
    subsumption_checks = 0
    instance_checks = 0
    for seed_offset, onto in enumerate(corpus):
        taxonomy = classify(onto)
        oracle = Oracle(onto)
        class_names = sorted(onto.classes)
        for c in class_names:
            subsumers = taxonomy.subsumer_set(c)
            for d in class_names:
                assert (d in subsumers) == oracle.subsumes(c, d), (seed_offset, c, d)
                subsumption_checks += 1
        factory = OntologyFactory(random.Random(915000 + seed_offset))
        factory.classes = class_names
        factory.object_props = sorted(onto.object_props)
        factory.data_props = sorted(onto.data_props)
        exprs = [Atomic(c) for c in class_names] + [factory.expr(2) for _ in range(3)]
        for ind in sorted(onto.abox.individuals):
            for expr in exprs:
                assert entails_instance(taxonomy, expr, ind) == oracle.instance(expr, ind), (
                    seed_offset,
                    expr,
                    ind,
                )
                instance_checks += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"oracle-equivalence suite took {elapsed:.1f}s"
    assert len(corpus) >= 500
    _report(
        "reasoner oracle equivalence "
        f"({len(corpus)} ontologies, {subsumption_checks} subsumption + {instance_checks} instance checks, "
        f"{elapsed:.1f}s < 60s)"
    )


def test_criterion_recommendation_semantics(corpus):
    """recommend == oracle minimization; FrailElderly yields [[GentleChemo]]."""
    compared = 0
    for onto in corpus:
        classes = sorted(onto.classes)
        if len(classes) < 2 or not onto.object_props:
            continue
        cfg = DecisionConfig(
            patient_class=classes[0],
            treatment_class=classes[1],
            reco_prop=sorted(onto.object_props)[0],
        )
        taxonomy = classify(onto)
        oracle = Oracle(onto)
        for ind in sorted(onto.abox.individuals):
            got = recommend(taxonomy, cfg, ind).group_lists()
            assert got == oracle.recommend(cfg, ind), (onto.name, ind)
            flat = [t for g in got for t in g]
            for t in flat:  # soundness, re-checked directly
                assert entails_subclass(taxonomy, t, cfg.treatment_class)
                assert entails_instance(taxonomy, ObjectSome(cfg.reco_prop, Atomic(t)), ind)
            entailed = [
                t
                for t in classes
                if entails_subclass(taxonomy, t, cfg.treatment_class)
                and entails_instance(taxonomy, ObjectSome(cfg.reco_prop, Atomic(t)), ind)
            ]
            for t_prime in entailed:  # coverage
                assert any(entails_subclass(taxonomy, t, t_prime) for t in flat)
            for gi, g1 in enumerate(got):  # antichain
                for gj, g2 in enumerate(got):
                    if gi != gj:
                        for a in g1:
                            for b in g2:
                                assert not entails_subclass(taxonomy, a, b)
            compared += 1
    assert compared > 400

    scenario = recommend(classify(parse_ontology(FRAIL_ELDERLY)), DecisionConfig(), "i")
    assert scenario.group_lists() == [["GentleChemo"]]
    _report(f"Eq-style recommendation semantics ({compared} oracle comparisons; FrailElderly == [['GentleChemo']])")


def test_criterion_selection_law(corpus):
    """visible_properties == {p : domain(p) entailed}; growth is monotonic."""
    rng = random.Random(37)
    bidirectional = 0
    for onto in corpus:
        taxonomy = classify(onto)
        oracle = Oracle(onto)
        for ind in sorted(onto.abox.individuals):
            got = visible_properties(taxonomy, onto, ind)
            want = oracle.visible_properties(ind)
            assert got == want, (onto.name, ind)
            all_props = sorted(onto.object_props | onto.data_props)
            hidden = [p for p in all_props if p not in got]
            for p in hidden:  # completeness of the complement
                domain = onto.domain_of(p)
                assert domain is not None
                assert not entails_instance(taxonomy, domain, ind)
            bidirectional += 1

    growth_steps = 0
    corpus_index = 0
    while growth_steps < 1000:
        onto = corpus[corpus_index % len(corpus)]
        corpus_index += 1
        taxonomy = classify(onto)
        ind = sorted(onto.abox.individuals)[0]
        before = set(visible_properties(taxonomy, onto, ind))
        grown = parse_ontology(serialize_ontology(onto))
        for _ in range(3):
            grown.abox.add_class_assertion(Atomic(rng.choice(sorted(grown.classes))), ind)
            taxonomy = classify(grown)
            after = set(visible_properties(taxonomy, grown, ind))
            assert before <= after, (onto.name, ind)
            before = after
            growth_steps += 1
    _report(
        f"runtime component selection law ({bidirectional} bidirectional checks, "
        f"{growth_steps} monotonic growth steps >= 1000)"
    )


def test_criterion_customization():
    """New widget + higher-priority rule + binding override, stratum by stratum."""
    onto = parse_ontology(
        'Ontology(x) Class(Patient)'
        ' DataProperty(status) DataPropertyRange(status OneOf("a" "b"))'
        ' DataProperty(age) DataPropertyRange(age Interval(0 130))'
    )
    custom = resolve_config(
        parse_ui_config(
            'UiConfig(custom) Extends(default)'
            ' Widget(RadioGroup "ui.RadioGroup") Widget(Slider "ui.Slider")'
            " WidgetRule(20 EnumRange RadioGroup)"
            " BindWidget(age Slider)"
        )
    )
    assert set(custom.widgets) == set(DEFAULT_UI_CONFIG.widgets) | {"RadioGroup", "Slider"}
    # (a) the new widgets exist and carry their hints
    assert custom.widgets["RadioGroup"] == "ui.RadioGroup"
    # (b) the higher-priority rule overrides the default enum choice
    assert choose_widget(custom, onto, "status") == ("RadioGroup", "ui.RadioGroup")
    # (c) the binding overrides every rule
    assert choose_widget(custom, onto, "age") == ("Slider", "ui.Slider")

    # remove the binding -> the numeric rule stratum answers again
    no_binding = resolve_config(
        parse_ui_config(
            'UiConfig(custom) Extends(default)'
            ' Widget(RadioGroup "ui.RadioGroup") Widget(Slider "ui.Slider")'
            " WidgetRule(20 EnumRange RadioGroup)"
        )
    )
    assert choose_widget(no_binding, onto, "age") == ("NumberField", "hibou.ui.NumberField")
    assert choose_widget(no_binding, onto, "status") == ("RadioGroup", "ui.RadioGroup")

    # remove the custom rule too -> the default rule stratum answers
    plain = resolve_config(parse_ui_config("UiConfig(custom) Extends(default)"))
    assert choose_widget(plain, onto, "status") == ("Dropdown", "hibou.ui.Dropdown")
    assert choose_widget(plain, onto, "age") == ("NumberField", "hibou.ui.NumberField")

    # remove every rule (no extends): the TextField fallback answers
    bare = resolve_config(parse_ui_config('UiConfig(bare) Widget(TextField "ui.Text")'))
    assert choose_widget(bare, onto, "status") == ("TextField", "ui.Text")
    _report("customization by config extension (widget, rule, binding; strata restore in order)")


def test_criterion_determinism(tmp_path):
    """classify/recommend/form/query byte-identical across runs and CLI vs server."""
    demo_text = (DEMO_DIR / "oncology.hfs").read_text(encoding="utf-8")
    config = ServerConfig(
        ontology_dir=DEMO_DIR,
        ui_config=DEMO_DIR / "custom.uicfg.hfs",
        journal_dir=tmp_path / "journals",
    )
    running, server = start_portal(config)
    try:
        client = running.client
        sid_payload = client.post_json("/sessions", {"ontology": "oncology"}).json()
        sid, instance = sid_payload["id"], sid_payload["instance"]
        for prop, value in DEMO_STEPS:
            assert client.post_json(f"/sessions/{sid}/values", {"property": prop, "value": value}).status == 200

        # rebuild the session overlay as a standalone document for the CLI
        overlay_lines = [demo_text, f"ClassAssertion(Patient {instance})"]
        for prop, value in DEMO_STEPS:
            if isinstance(value, str):
                overlay_lines.append(f'DataPropertyAssertion({prop} {instance} "{value}")')
            else:
                overlay_lines.append(f"DataPropertyAssertion({prop} {instance} {value})")
        overlay_path = tmp_path / "overlay.hfs"
        overlay_path.write_text("\n".join(overlay_lines) + "\n", encoding="utf-8")

        demo_path = tmp_path / "oncology.hfs"
        demo_path.write_text(demo_text, encoding="utf-8")

        def cli_output(argv: list[str], out_name: str) -> bytes:
            out_path = tmp_path / out_name
            assert cli_main(argv + ["--out", str(out_path)]) == 0
            return out_path.read_bytes()

        classify_cli = cli_output(["classify", "-o", str(demo_path)], "classify.txt")
        classify_cli_again = cli_output(["classify", "-o", str(demo_path)], "classify2.txt")
        classify_server = client.get("/ontologies/oncology/taxonomy").body
        assert classify_cli == classify_cli_again == classify_server

        reco_cli = cli_output(["recommend", "-o", str(overlay_path), "-i", instance], "reco.json")
        reco_cli_again = cli_output(["recommend", "-o", str(overlay_path), "-i", instance], "reco2.json")
        reco_server = client.get(f"/sessions/{sid}/recommendations").body
        assert reco_cli == reco_cli_again == reco_server

        form_cli = cli_output(
            [
                "form",
                "-o",
                str(overlay_path),
                "-i",
                instance,
                "--ui-config",
                str(DEMO_DIR / "custom.uicfg.hfs"),
            ],
            "form.xml",
        )
        form_cli_again = cli_output(
            [
                "form",
                "-o",
                str(overlay_path),
                "-i",
                instance,
                "--ui-config",
                str(DEMO_DIR / "custom.uicfg.hfs"),
            ],
            "form2.xml",
        )
        form_server = client.get(f"/sessions/{sid}/form").body
        assert form_cli == form_cli_again == form_server

        query_text = "Type(?x, Hospital)"
        query_cli = cli_output(["query", "-o", str(demo_path), "-q", query_text], "query.json")
        query_cli_again = cli_output(["query", "-o", str(demo_path), "-q", query_text], "query2.json")
        query_server = client.post_text("/ontologies/oncology/query", query_text).body
        assert query_cli == query_cli_again == query_server
    finally:
        server.shutdown()
        server.server_close()
    _report("determinism (classify/recommend/form/query byte-equal across runs and CLI == server)")


def test_criterion_replay(tmp_path):
    """Journal restore reproduces byte-identical form XML after >= 20 edits."""
    journal_dir = tmp_path / "journals"
    config = ServerConfig(ontology_dir=DEMO_DIR, journal_dir=journal_dir)
    running, server = start_portal(config)
    edits = [
        ("diagnosis", "breast_cancer"),
        ("age", 45),
        ("age", 76),
        ("tumorSizeMm", 55),
        ("tumorSizeMm", 18),
        ("receptorStatus", "triple_negative"),
        ("receptorStatus", "er_positive"),
        ("performanceStatus", 3),
        ("performanceStatus", 1),
        ("notes", "first pass"),
        ("notes", "second pass"),
        ("treatedAt", "clinic_a"),
        ("treatedAt", "clinic_b"),
        ("metastasis", True),
        ("age", 80),
        ("performanceStatus", 4),
        ("tumorSizeMm", 30),
        ("diagnosis", "breast_cancer"),
        ("age", 76),
        ("notes", "third pass"),
        ("tumorSizeMm", 18),
    ]
    assert len(edits) >= 20
    try:
        client = running.client
        sid = client.post_json("/sessions", {"ontology": "oncology"}).json()["id"]
        for prop, value in edits:
            reply = client.post_json(f"/sessions/{sid}/values", {"property": prop, "value": value})
            assert reply.status == 200, reply.text
        live_form = client.get(f"/sessions/{sid}/form").body
        live_recs = client.get(f"/sessions/{sid}/recommendations").body
    finally:
        server.shutdown()
        server.server_close()

    restored = restore_session(
        journal_dir / f"{sid}.journal",
        {"oncology": running.app.get_ontology("oncology")},
        running.app.ui_config,
        running.app.decision_config,
    )
    assert restored.form_xml.encode("utf-8") == live_form
    assert restored.recommendations_json.encode("utf-8") == live_recs
    _report(f"journal replay ({len(edits)} edits; restored form XML byte-identical)")


def test_criterion_desk_scale_demo(tmp_path):
    """Oncology demo end-to-end over HTTP; every request < 1 s."""
    config = ServerConfig(ontology_dir=DEMO_DIR, journal_dir=tmp_path / "journals")
    running, server = start_portal(config)
    timings: list[tuple[str, float]] = []

    def timed(label: str, fn):
        started = time.perf_counter()
        result = fn()
        elapsed = time.perf_counter() - started
        timings.append((label, elapsed))
        assert elapsed < 1.0, f"{label} took {elapsed:.3f}s"
        return result

    try:
        client = running.client
        onto = running.app.get_ontology("oncology").ontology
        assert len(onto.classes) >= 40
        assert len(onto.axioms) >= 60
        created = timed("create session", lambda: client.post_json("/sessions", {"ontology": "oncology"}))
        sid = created.json()["id"]
        for prop, value in DEMO_STEPS:
            reply = timed(
                f"set {prop}",
                lambda p=prop, v=value: client.post_json(f"/sessions/{sid}/values", {"property": p, "value": v}),
            )
            assert reply.status == 200, reply.text
        recs = timed("recommendations", lambda: client.get(f"/sessions/{sid}/recommendations"))
        groups = recs.json()
    finally:
        server.shutdown()
        server.server_close()

    # cross-check the scenario against the oracle on the final overlay
    overlay = parse_ontology(
        (DEMO_DIR / "oncology.hfs").read_text(encoding="utf-8")
        + "\nClassAssertion(Patient case_x)\n"
        + "".join(
            f'DataPropertyAssertion({p} case_x "{v}")\n' if isinstance(v, str) else f"DataPropertyAssertion({p} case_x {v})\n"
            for p, v in DEMO_STEPS
        )
    )
    oracle_groups = Oracle(overlay).recommend(DecisionConfig(), "case_x")
    assert groups == oracle_groups
    assert groups == [["AromataseInhibitor"], ["BreastConservingSurgery"], ["Chemotherapy"]]
    worst = max(timings, key=lambda t: t[1])
    _report(
        "desk-scale guideline demo (create + 6 entries + recommendation; "
        f"slowest request {worst[0]!r} {worst[1] * 1000:.0f} ms < 1 s)"
    )
