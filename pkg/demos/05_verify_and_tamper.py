"""Traces are machine-checkable: tampering with one gets caught.

Run a query, verify its trace, then forge three different fields and watch
the verifier name the broken rule each time. The verifier shares no state
with the engine; it re-derives everything from the trace and the KG.
"""

import copy

from groundedqa import (
    HashedEmbedder,
    KnowledgeGraph,
    Query,
    ScriptedBackend,
    answer_query,
    verify_trace,
)

kg = KnowledgeGraph(
    triples=[("Q1", "is_a_politician", "yes"), ("Q1", "age", "45")],
    labels=[("Q1", "Virginia Raggi")],
)

backend = ScriptedBackend({
    "entity_extract": ["ENTITIES: Virginia Raggi"],
    "axiom": [
        "Adults are at least 18 years old.\n"
        "AXIOM: is_a_politician(Virginia_Raggi) AND age(Virginia_Raggi) >= 18"
    ],
    "triple_select": ["SELECT: 1,2"],
})

result = answer_query(
    kg, HashedEmbedder(), backend, Query(text="Is Virginia Raggi an adult politician?"),
)
doc = result.trace.to_dict()
print("honest trace ok:", verify_trace(kg, doc).ok)


def tampered(mutate):
    forged = copy.deepcopy(doc)
    mutate(forged)
    return verify_trace(kg, forged)


def cite_ghost_triple(d):
    step = next(s for s in d["steps"] if s["kind"] == "PremiseGrounding")
    step["payload"]["evidence"] = [9999]


def flip_evaluation(d):
    step = next(s for s in d["steps"] if s["kind"] == "Evaluation")
    step["payload"]["value"] = "False"


def invent_final_answer(d):
    d["steps"] = [s for s in d["steps"] if s["kind"] != "Evaluation"]


for name, mutate in [
    ("cite a triple that is not in the KG", cite_ghost_triple),
    ("flip the recorded evaluation", flip_evaluation),
    ("keep the answer but delete its evaluation", invent_final_answer),
]:
    report = tampered(mutate)
    rules = sorted({v.rule for v in report.violations})
    print(f"{name}: ok={report.ok}, violated rules={rules}")
