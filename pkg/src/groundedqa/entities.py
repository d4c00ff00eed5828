"""Anchor entity extraction: lexical gazetteer union LLM-proposed names.

The lexical side is a greedy longest-match scan of the normalized query
against KG labels and aliases; the LLM side covers recent or obscure names
the gazetteer misses. Names the KG cannot resolve are dropped and audited,
never guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .kg import KnowledgeGraph, normalize
from .llm import LlmRequest, parse_entities
from .prompts import render_prompt
from .trace import Audit

TASKS = ("qa_yes_no", "claim", "multiple_choice")


@dataclass(frozen=True)
class Query:
    text: str
    options: tuple[str, ...] = ()
    task: str = "qa_yes_no"

    def __post_init__(self):
        if not self.text:
            raise ValueError("query text must be non-empty")
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if (self.task == "multiple_choice") != bool(self.options):
            raise ValueError("options are required iff task is multiple_choice")


@dataclass
class AnchorEntitySet:
    entities: list[str]  # ordered, no duplicates, all resolve in the KG
    provenance: dict[str, str]  # entity id -> "lexical" | "llm" | "mei"

    def add(self, entity_id: str, source: str) -> bool:
        if entity_id in self.provenance:
            return False
        self.entities.append(entity_id)
        self.provenance[entity_id] = source
        return True


def link_lexical(kg: KnowledgeGraph, query_text: str) -> list[str]:
    """Greedy longest-match gazetteer scan; returns matched ids in query order.

    A chosen longer match suppresses shorter matches overlapping its span;
    matches must sit on word boundaries of the normalized query.
    """
    nq = normalize(query_text)
    claimed: list[tuple[int, int]] = []
    hits: list[tuple[int, list[str]]] = []
    surfaces = sorted(kg.alias_index().items(), key=lambda kv: (-len(kv[0]), kv[0]))
    for surface, ids in surfaces:
        if not surface:
            continue
        start = 0
        while True:
            i = nq.find(surface, start)
            if i < 0:
                break
            j = i + len(surface)
            boundary = (i == 0 or not nq[i - 1].isalnum()) and (
                j == len(nq) or not nq[j].isalnum()
            )
            overlaps = any(i < ce and cs < j for cs, ce in claimed)
            if boundary and not overlaps:
                claimed.append((i, j))
                hits.append((i, ids))
            start = i + 1
    result: list[str] = []
    for _, ids in sorted(hits, key=lambda h: h[0]):
        for entity_id in ids:
            if entity_id not in result:
                result.append(entity_id)
    return result


def extract_entities_llm(backend, query_text: str, audit: Audit) -> list[str]:
    """LLM-proposed entity names; unparseable responses audit as empty."""
    prompt = render_prompt("entity_extract", {"query": query_text})
    response = backend.complete(LlmRequest(role="entity_extract", rendered_prompt=prompt))
    names = parse_entities(response)
    if names is None:
        audit.parse_failures += 1
        audit.event("entity_extract: unparseable response")
        return []
    return names


def anchor_entities(
    kg: KnowledgeGraph,
    backend,
    query: Query,
    audit: Audit,
) -> tuple[AnchorEntitySet, list[str], list[str], list[str]]:
    """Union of the lexical linker and resolved LLM names.

    Returns (anchors, lexical_ids, llm_names, unresolved_names); unresolved
    LLM names are audited and dropped so every anchor resolves in the KG.
    """
    anchors = AnchorEntitySet(entities=[], provenance={})
    lexical = link_lexical(kg, query.text)
    for entity_id in lexical:
        anchors.add(entity_id, "lexical")
    llm_names = extract_entities_llm(backend, query.text, audit)
    unresolved: list[str] = []
    for name in llm_names:
        ids = kg.resolve_label(name)
        if not ids:
            unresolved.append(name)
            audit.unresolved_names += 1
            audit.event(f"entity_extract: unresolvable name {name!r}")
            continue
        for entity_id in ids:
            anchors.add(entity_id, "llm")
    return anchors, lexical, llm_names, unresolved
