import copy
import json

import pytest

from groundedqa import (
    HashedEmbedder,
    Query,
    ReasoningTrace,
    ScriptedBackend,
    answer_query,
    load_trace,
    verify_trace,
)
from groundedqa.trace import SCHEMA_VERSION, TraceSchemaError

from fixture_data import ADULT_KG, ADULT_QUERY, ADULT_SCRIPT


def adult_doc():
    backend = ScriptedBackend(copy.deepcopy(ADULT_SCRIPT))
    result = answer_query(ADULT_KG, HashedEmbedder(), backend, Query(text=ADULT_QUERY))
    return result.trace.to_dict()


def steps_of(doc, kind):
    return [s for s in doc["steps"] if s["kind"] == kind]


def rules(report):
    return {v.rule for v in report.violations}


# -- recording and round-trip -------------------------------------------------

def test_record_assigns_sequence_numbers():
    trace = ReasoningTrace(query={"text": "q"}, config={})
    trace.record("EntityLinking", {"anchors": []})
    trace.record("FinalAnswer", {"value": "Unknown"})
    assert [s.seq for s in trace.steps] == [0, 1]


def test_record_rejects_unknown_kind():
    trace = ReasoningTrace(query={"text": "q"}, config={})
    with pytest.raises(ValueError):
        trace.record("Improvised", {})


def test_save_load_round_trip(tmp_path):
    doc = adult_doc()
    trace_file = tmp_path / "t.json"
    backend = ScriptedBackend(copy.deepcopy(ADULT_SCRIPT))
    result = answer_query(ADULT_KG, HashedEmbedder(), backend, Query(text=ADULT_QUERY))
    result.trace.save(trace_file)
    assert load_trace(trace_file) == doc


def test_serialization_is_byte_stable():
    backend = ScriptedBackend(copy.deepcopy(ADULT_SCRIPT))
    r1 = answer_query(ADULT_KG, HashedEmbedder(), backend, Query(text=ADULT_QUERY))
    backend = ScriptedBackend(copy.deepcopy(ADULT_SCRIPT))
    r2 = answer_query(ADULT_KG, HashedEmbedder(), backend, Query(text=ADULT_QUERY))
    assert r1.trace.to_json() == r2.trace.to_json()


def test_non_ascii_round_trips(tmp_path):
    trace = ReasoningTrace(query={"text": "quinceañera?"}, config={})
    path = tmp_path / "t.json"
    trace.save(path)
    assert load_trace(path)["query"]["text"] == "quinceañera?"
    assert "quinceañera" in path.read_text(encoding="utf-8")


# -- verification -------------------------------------------------------------

def test_clean_trace_verifies():
    report = verify_trace(ADULT_KG, adult_doc())
    assert report.ok
    assert report.violations == []
    assert report.grounding_precision == 1.0
    assert report.steps_checked == len(adult_doc()["steps"])


def test_wrong_schema_version_rejected():
    doc = adult_doc()
    doc["schema_version"] = SCHEMA_VERSION + 1
    with pytest.raises(TraceSchemaError):
        verify_trace(ADULT_KG, doc)


def test_v1_nonexistent_citation_flagged():
    doc = adult_doc()
    step = steps_of(doc, "PremiseGrounding")[0]
    step["payload"]["evidence"] = [9999]
    report = verify_trace(ADULT_KG, doc)
    assert not report.ok and "V1" in rules(report)
    assert report.grounding_precision < 1.0


def test_v1_unknown_with_evidence_flagged():
    doc = adult_doc()
    step = steps_of(doc, "PremiseGrounding")[0]
    step["payload"]["status"] = "Unknown"
    report = verify_trace(ADULT_KG, doc)
    assert not report.ok and "V1" in rules(report)


def test_v1_satisfied_without_evidence_flagged():
    doc = adult_doc()
    step = steps_of(doc, "PremiseGrounding")[0]
    step["payload"]["evidence"] = []
    report = verify_trace(ADULT_KG, doc)
    assert not report.ok and "V1" in rules(report)


def test_v2_tampered_evaluation_flagged():
    doc = adult_doc()
    step = steps_of(doc, "Evaluation")[0]
    step["payload"]["value"] = "False"
    report = verify_trace(ADULT_KG, doc)
    assert not report.ok and "V2" in rules(report)


def test_v2_tampered_grounding_status_flagged():
    # Flipping a Satisfied verdict to Violated makes the recorded True
    # evaluation disagree with re-aggregation.
    doc = adult_doc()
    step = steps_of(doc, "PremiseGrounding")[0]
    step["payload"]["status"] = "Violated"
    report = verify_trace(ADULT_KG, doc)
    assert not report.ok and "V2" in rules(report)


def test_v3_final_answer_needs_backing_evaluation():
    doc = adult_doc()
    doc["steps"] = [s for s in doc["steps"] if s["kind"] != "Evaluation"]
    report = verify_trace(ADULT_KG, doc)
    assert not report.ok and "V3" in rules(report)


def test_v4_premise_outside_surfaced_axiom_flagged():
    doc = adult_doc()
    step = steps_of(doc, "PremiseGrounding")[0]
    step["payload"]["premise"] = "smuggled_in(Q1)"
    report = verify_trace(ADULT_KG, doc)
    assert not report.ok and "V4" in rules(report)


def test_v5_depth_budget_enforced():
    doc = adult_doc()
    doc["steps"][-1]["depth"] = doc["config"]["max_depth"] + 1
    report = verify_trace(ADULT_KG, doc)
    assert not report.ok and "V5" in rules(report)


def test_v5_breadth_budget_enforced():
    doc = adult_doc()
    extra = copy.deepcopy(steps_of(doc, "AxiomSurfacing")[0])
    for branch in range(2, doc["config"]["max_breadth"] + 2):
        dup = copy.deepcopy(extra)
        dup["branch"] = branch
        dup["seq"] = len(doc["steps"])
        doc["steps"].append(dup)
    report = verify_trace(ADULT_KG, doc)
    assert not report.ok and "V5" in rules(report)


def test_precision_counts_fraction_of_valid_citations():
    doc = adult_doc()
    grounding_steps = steps_of(doc, "PremiseGrounding")
    total = sum(len(s["payload"]["evidence"]) for s in grounding_steps)
    grounding_steps[0]["payload"]["evidence"][0] = 9999
    report = verify_trace(ADULT_KG, doc)
    assert report.grounding_precision == pytest.approx((total - 1) / total)


def test_baseline_trace_skips_v2_to_v4():
    doc = adult_doc()
    doc["baseline"] = True
    doc["steps"] = [s for s in doc["steps"] if s["kind"] != "Evaluation"]
    steps_of(doc, "PremiseGrounding")[0]["payload"]["premise"] = "whatever(Q1)"
    report = verify_trace(ADULT_KG, doc)
    assert report.ok  # V1/V5 still hold, V2-V4 are waived


def test_baseline_trace_still_checks_citations():
    doc = adult_doc()
    doc["baseline"] = True
    steps_of(doc, "PremiseGrounding")[0]["payload"]["evidence"] = [424242]
    report = verify_trace(ADULT_KG, doc)
    assert not report.ok and rules(report) == {"V1"}


def test_trace_json_has_sorted_keys():
    text = ReasoningTrace(query={"text": "q"}, config={}).to_json()
    doc = json.loads(text)
    assert list(doc) == sorted(doc)
