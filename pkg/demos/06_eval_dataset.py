"""Run a small JSONL dataset and compare against the retrieve-and-read baseline.

Writes one verified trace per item plus results.jsonl and metrics.json into
a temp directory. Unknown answers count as incorrect, so abstaining shows
up in accuracy but keeps grounding precision at 1.0.
"""

import json
import tempfile
from pathlib import Path

from groundedqa import (
    HashedEmbedder,
    KnowledgeGraph,
    ScriptedBackend,
    run_eval,
)

workdir = Path(tempfile.mkdtemp(prefix="groundedqa_demo_"))

kg_file = workdir / "kg.tsv"
kg_file.write_text(
    "Q1\tis_a_politician\tyes\n"
    "Q1\tage\t45\n"
    "Q1\tcitizenship\tItaly\n",
    encoding="utf-8",
)
kg = KnowledgeGraph.load(kg_file)

dataset = workdir / "dataset.jsonl"
items = [
    {"id": "adult", "task": "qa", "query": "Is Q1 an adult politician?", "gold": "Yes"},
    {"id": "nobel", "task": "qa", "query": "Did Q1 win a Nobel prize?", "gold": "No"},
]
dataset.write_text("".join(json.dumps(i) + "\n" for i in items), encoding="utf-8")

engine_script = {
    "entity_extract": ["ENTITIES: Q1", "ENTITIES: Q1"],
    "axiom": [
        "Adults are at least 18 years old.\n"
        "AXIOM: is_a_politician(Q1) AND age(Q1) >= 18",
        # no rule for the Nobel question on either branch: the engine abstains
        "If Q1 won a Nobel prize the answer is yes.\n"
        "AXIOM: nobel_prize(Q1) = physics",
        "No further rule comes to mind.",
    ],
    "triple_select": ["SELECT: 1,2", "SELECT:"],
    "judge": ["STATUS: UNKNOWN"],
    "mei": ["No idea what is missing."],
}
metrics = run_eval(
    dataset, kg, ScriptedBackend(engine_script), HashedEmbedder(),
    out_dir=workdir / "engine",
)
print("engine:", json.dumps(metrics.to_dict(), indent=2))

# The baseline never abstains and never cites, so it can look better on
# accuracy while offering nothing checkable.
baseline_script = {"baseline": ["Yes, clearly.", "No."]}
baseline = run_eval(
    dataset, kg, ScriptedBackend(baseline_script), HashedEmbedder(),
    out_dir=workdir / "baseline", baseline=True,
)
print("baseline:", json.dumps(baseline.to_dict(), indent=2))
print()
print("artifacts under:", workdir)
