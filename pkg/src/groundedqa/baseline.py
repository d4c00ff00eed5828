"""Retrieve-and-read baseline: top-k triples by query similarity, one LLM call.

No axioms, no citation enforcement: the free-text answer is keyword-mapped
to True/False/Unknown. Its traces are flagged ``baseline`` so the verifier
skips the grounding rules that this method deliberately does not enforce.
"""

from __future__ import annotations

import re
from typing import Optional

from .entities import Query
from .grounding import Answer
from .kg import KnowledgeGraph
from .llm import LlmRequest
from .prompts import number_lines, render_prompt
from .retrieval import Embedder, top_k_similar, verbalize
from .trace import ReasoningTrace

_TRUE_RE = re.compile(r"\b(yes|true)\b", re.IGNORECASE)
_FALSE_RE = re.compile(r"\b(no|false)\b", re.IGNORECASE)


def map_keyword_answer(text: str) -> str:
    """First yes/true vs no/false keyword occurrence decides the value."""
    t = _TRUE_RE.search(text)
    f = _FALSE_RE.search(text)
    if t and (not f or t.start() < f.start()):
        return "True"
    if f:
        return "False"
    return "Unknown"


def baseline_retrieve_read(
    kg: KnowledgeGraph,
    embedder: Embedder,
    backend,
    query: Query,
    k: int = 10,
) -> tuple[Answer, ReasoningTrace]:
    """Answer directly over the k triples nearest to the query text."""
    all_ids = [t.id for t in kg.triples]
    picked = top_k_similar(embedder, query.text, kg, all_ids, k)
    numbered = number_lines([verbalize(kg, kg.triple(tid)) for tid in picked])
    prompt = render_prompt(
        "baseline", {"query": query.text, "numbered_triples": numbered},
    )
    response = backend.complete(LlmRequest(role="baseline", rendered_prompt=prompt))
    value = map_keyword_answer(response)
    trace = ReasoningTrace(
        query={"text": query.text, "options": list(query.options), "task": query.task},
        config={"top_k": k},
        baseline=True,
    )
    trace.record("Pruning", {"option": None, "new_ids": picked, "cumulative_ids": picked})
    trace.record("FinalAnswer", {"value": value, "selected_option": None, "raw_response": response})
    trace.answer = {"value": value, "selected_option": None}
    trace.audit = {"rejected_citations": 0, "unresolved_names": 0, "parse_failures": 0}
    return Answer(value=value), trace
