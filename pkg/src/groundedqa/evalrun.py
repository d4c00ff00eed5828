"""Dataset loading, evaluation runs, and metrics.

Datasets are JSONL, one item per line, covering three task shapes: yes/no
questions, claims, and preference matching with options plus an inline
personal KG. Unknown answers count as incorrect when computing accuracy.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .baseline import baseline_retrieve_read
from .entities import Query
from .kg import KnowledgeGraph
from .retrieval import Embedder
from .search import SearchConfig, answer_multiple_choice, answer_query
from .trace import verify_trace

log = logging.getLogger(__name__)

TASK_MAP = {"qa": "qa_yes_no", "claim": "claim", "preference": "multiple_choice"}

_GOLD_TRUE = {"yes", "correct", "true"}
_GOLD_FALSE = {"no", "incorrect", "false"}


@dataclass(frozen=True)
class DatasetItem:
    id: str
    task: str  # "qa" | "claim" | "preference"
    query: str
    gold: Any  # "Yes"/"No", "Correct"/"Incorrect", or option index
    options: tuple[str, ...] = ()
    personal_kg: tuple[tuple[str, str, str], ...] = ()
    kg_ref: Optional[str] = None

    def __post_init__(self):
        if self.task not in TASK_MAP:
            raise ValueError(f"unknown task {self.task!r}")
        if self.task == "preference":
            if len(self.options) < 2:
                raise ValueError("preference items need at least 2 options")
            if not isinstance(self.gold, int):
                raise ValueError("preference gold must be an option index")
        elif str(self.gold).lower() not in _GOLD_TRUE | _GOLD_FALSE:
            raise ValueError(f"gold {self.gold!r} inconsistent with task {self.task!r}")


@dataclass
class Metrics:
    n_items: int
    skipped: int
    accuracy: float
    answer_rate: float
    grounding_precision: float
    rejected_citations: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_items": self.n_items,
            "skipped": self.skipped,
            "accuracy": self.accuracy,
            "answer_rate": self.answer_rate,
            "grounding_precision": self.grounding_precision,
            "rejected_citations": self.rejected_citations,
        }


def parse_item(raw: dict[str, Any]) -> DatasetItem:
    return DatasetItem(
        id=str(raw["id"]),
        task=raw["task"],
        query=raw["query"],
        gold=raw["gold"],
        options=tuple(raw.get("options", ())),
        personal_kg=tuple(tuple(t) for t in raw.get("personal_kg", ())),
        kg_ref=raw.get("kg_ref"),
    )


def load_dataset(path: str | Path) -> tuple[list[DatasetItem], int]:
    """Parse a JSONL dataset; malformed items are skipped with a warning."""
    items: list[DatasetItem] = []
    skipped = 0
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                items.append(parse_item(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                skipped += 1
                log.warning("skipping malformed item at line %d: %s", line_no, exc)
    return items, skipped


def item_query(item: DatasetItem) -> Query:
    return Query(text=item.query, options=item.options, task=TASK_MAP[item.task])


def is_correct(item: DatasetItem, value: str, selected_option: Optional[int]) -> bool:
    """Gold comparison; Unknown never counts as correct."""
    if item.task == "preference":
        return value == "True" and selected_option == item.gold
    gold = str(item.gold).lower()
    if value == "True":
        return gold in _GOLD_TRUE
    if value == "False":
        return gold in _GOLD_FALSE
    return False


def _item_kg(item: DatasetItem, kg: KnowledgeGraph) -> KnowledgeGraph:
    if item.kg_ref:
        kg = KnowledgeGraph.load(item.kg_ref)
    if item.personal_kg:
        kg = kg.extended(item.personal_kg)
    return kg


def run_eval(
    dataset_file: str | Path,
    kg: KnowledgeGraph,
    backend,
    embedder: Embedder,
    config: Optional[SearchConfig] = None,
    out_dir: str | Path = "results",
    baseline: bool = False,
) -> Metrics:
    """Run the engine (or the retrieve-and-read baseline) over a dataset.

    Writes one result line per item to ``results.jsonl`` and one trace file
    per item under ``out_dir``; returns the aggregate metrics.
    """
    config = config or SearchConfig()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    items, skipped = load_dataset(dataset_file)

    correct = 0
    answered = 0
    precisions: list[float] = []
    rejected = 0
    lines: list[str] = []
    for item in items:
        item_kg = _item_kg(item, kg)
        query = item_query(item)
        if baseline:
            answer, trace = baseline_retrieve_read(
                item_kg, embedder, backend, query, k=config.top_k,
            )
        elif query.task == "multiple_choice":
            result = answer_multiple_choice(item_kg, embedder, backend, query, config)
            answer, trace = result.answer, result.trace
            rejected += result.audit.rejected_citations
        else:
            result = answer_query(item_kg, embedder, backend, query, config)
            answer, trace = result.answer, result.trace
            rejected += result.audit.rejected_citations

        trace_path = out_dir / f"trace_{item.id}.json"
        trace.save(trace_path)
        report = verify_trace(item_kg, trace.to_dict())
        precisions.append(report.grounding_precision)

        ok = is_correct(item, answer.value, answer.selected_option)
        correct += ok
        answered += answer.value != "Unknown"
        lines.append(json.dumps({
            "id": item.id,
            "predicted": answer.value,
            "selected_option": answer.selected_option,
            "gold": item.gold,
            "correct": ok,
            "trace": str(trace_path),
        }, sort_keys=True))

    (out_dir / "results.jsonl").write_text(
        "".join(line + "\n" for line in lines), encoding="utf-8",
    )
    n = len(items)
    metrics = Metrics(
        n_items=n,
        skipped=skipped,
        accuracy=(correct / n) if n else 0.0,
        answer_rate=(answered / n) if n else 0.0,
        grounding_precision=(sum(precisions) / n) if n else 1.0,
        rejected_citations=rejected,
    )
    (out_dir / "metrics.json").write_text(
        json.dumps(metrics.to_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return metrics
