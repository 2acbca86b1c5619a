from pathlib import Path

import pytest

import evtab

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures" / "pubmed"


def test_queries_are_stable():
    q = evtab.build_query("glaucoma")
    assert "glaucoma[Title/Abstract]" in q
    assert "NOT (''protocol''" in q
    assert q == evtab.build_query("glaucoma")
    assert "timolol[Title]" in evtab.build_query("drugs")
    assert "phacotrabeculectomy[Title]" in evtab.build_query("surgical")
    with pytest.raises(ValueError):
        evtab.build_query("cardiology")


def test_list_units_normalize():
    assert evtab.normalize_sentence("10, 20 and 30 mmHg") == "_MEAS_ , _MEAS_ and _MEAS_"


def test_annotated_round_trip():
    text = "<P>Patients</P> received <A1>latanoprost</A1> or <A2>timolol</A2>."
    a = evtab.parse_annotated(text)
    assert a.annotated() == text
    assert a.text == "Patients received latanoprost or timolol."


def test_fixture_ingest():
    records = evtab.ingest_fixtures(FIXTURES / "two_records", "tafluprost glaucoma", page_size=1)
    assert [a.id for a in records] == ["90000001", "90000002"]
    assert records[0].structured and not records[1].structured
    assert evtab.ingest_fixtures(FIXTURES / "zero_hits", "no such trial") == []
    with pytest.raises(evtab.ParseError):
        evtab.ingest_fixtures(FIXTURES / "truncated", "glaucoma")


def test_train_predict_table(tmp_path):
    corpus = evtab.generate_synthetic(30, seed=5, noise="low")
    model = evtab.train(corpus, max_iterations=60)
    assert model.dim > 0
    path = tmp_path / "model.json"
    model.save(str(path))
    reloaded = evtab.Model.load(str(path))
    assert reloaded.encode() == model.encode()

    out = evtab.predict(reloaded, corpus[0], mode="full")
    assert out["feasible"]
    assert out["row"]["id"] == corpus[0].id
    for key in ("patients", "arm1", "arm2", "outcome", "result1", "result2"):
        assert out["row"][key] in corpus[0].text

    table = evtab.evidence_table(model, corpus[:3], mode="vanilla", format="csv")
    assert table.splitlines()[0] == "id,patients,arm1,arm2,outcome,result1,result2,status"
    assert len(table.splitlines()) == 4
    with pytest.raises(evtab.ModeUnsupported):
        evtab.evidence_table(model, corpus[:1], mode="zero")


def test_kfold_report():
    corpus = evtab.generate_synthetic(20, seed=2, noise="low")
    report = evtab.kfold(corpus, k=4, seed=3, max_iterations=40)
    assert report["protocol"] == "cv"
    assert len(report["fold_of"]) == 20
    assert evtab.fold_assignment(20, 4, 3) == report["fold_of"]


def test_wilcoxon_all_positive():
    r = evtab.wilcoxon([1, 2, 3, 4, 5], [0, 0, 0, 0, 0])
    assert r["exact"]
    assert r["p_greater"] == 1 / 32
