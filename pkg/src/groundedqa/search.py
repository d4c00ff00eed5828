"""Tree-structured query controller.

Breadth iterates over surfaced axioms, depth over evidence expansions, and
for multiple choice an outer loop walks the options in order. A True or
False evaluation ends the search immediately (for multiple choice, False
ends only that option); exhausting every branch yields Unknown rather than
a guess.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .axioms import Axiom, AxiomSyntaxError, parse_axiom, serialize_axiom, serialize_premise
from .entities import AnchorEntitySet, Query, anchor_entities
from .expansion import ExpansionFailure, expand, identify_missing
from .grounding import (
    Answer,
    GroundingStatus,
    PremiseGrounding,
    evaluate_axiom,
    ground_premise,
)
from .kg import KnowledgeGraph, Subgraph
from .llm import LlmRequest, parse_axiom_block
from .prompts import render_prompt
from .retrieval import Embedder, prune_subgraph
from .trace import Audit, ReasoningTrace


class SurfacingError(RuntimeError):
    """The axiom response had no parseable structured form; branch is skipped."""


@dataclass
class SearchConfig:
    max_breadth: int = 2
    max_depth: int = 3
    top_k: int = 10
    llm_window: int = 40

    def __post_init__(self):
        for name in ("max_breadth", "max_depth", "top_k", "llm_window"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    def to_dict(self) -> dict:
        return {
            "max_breadth": self.max_breadth,
            "max_depth": self.max_depth,
            "top_k": self.top_k,
            "llm_window": self.llm_window,
        }


@dataclass
class QueryResult:
    answer: Answer
    trace: ReasoningTrace
    audit: Audit
    branches_used: int


def surface_axiom(
    backend,
    query: Query,
    option: Optional[str],
    prior_axioms: list[Axiom],
) -> Axiom:
    """Prompt for a fresh axiom (distinct from prior ones) and parse it."""
    prompt = render_prompt(
        "axiom",
        {
            "query": query.text,
            "option": option,
            "prior_axioms": [serialize_axiom(a) for a in prior_axioms],
        },
    )
    response = backend.complete(LlmRequest(role="axiom", rendered_prompt=prompt))
    block = parse_axiom_block(response)
    if block is None:
        raise SurfacingError("response has no AXIOM line")
    grammar_text, natural_text = block
    try:
        return parse_axiom(grammar_text, natural_text=natural_text)
    except AxiomSyntaxError as exc:
        raise SurfacingError(f"unparseable AXIOM block: {exc}") from exc


def _axiom_payload(axiom: Axiom, branch: int, option: Optional[int]) -> dict:
    return {
        "option": option,
        "branch": branch,
        "natural_text": axiom.natural_text,
        "axiom_text": serialize_axiom(axiom),
        "clauses": [
            [serialize_premise(p) for p in clause] for clause in axiom.clauses
        ],
    }


def _run_option(
    kg: KnowledgeGraph,
    embedder: Embedder,
    backend,
    query: Query,
    config: SearchConfig,
    trace: ReasoningTrace,
    audit: Audit,
    option: Optional[str] = None,
    option_index: Optional[int] = None,
) -> tuple[str, int]:
    """Evaluate one option (or the whole query); returns (value, branches_used)."""
    anchors, lexical, llm_names, unresolved = anchor_entities(kg, backend, query, audit)
    trace.record(
        "EntityLinking",
        {
            "option": option_index,
            "lexical": lexical,
            "llm_names": llm_names,
            "unresolved": unresolved,
            "anchors": [
                {"id": e, "provenance": anchors.provenance[e]} for e in anchors.entities
            ],
        },
    )
    subgraph = kg.one_hop_subgraph(anchors.entities)
    trace.record(
        "SubgraphExtraction",
        {
            "option": option_index,
            "anchor_count": len(anchors.entities),
            "triple_ids": sorted(subgraph.triple_ids),
        },
    )

    prior_axioms: list[Axiom] = []
    branches_used = 0
    for branch in range(1, config.max_breadth + 1):
        branches_used += 1
        try:
            axiom = surface_axiom(backend, query, option, prior_axioms)
        except SurfacingError as exc:
            audit.parse_failures += 1
            audit.event(f"axiom surfacing failed on branch {branch}: {exc}")
            continue
        prior_axioms.append(axiom)
        trace.record("AxiomSurfacing", _axiom_payload(axiom, branch, option_index), branch=branch)

        consumed: set[int] = set()
        pruned = prune_subgraph(
            embedder, backend, kg, axiom, subgraph, config.top_k,
            consumed, audit, config.llm_window,
        )
        trace.record(
            "Pruning",
            {
                "option": option_index,
                "new_ids": pruned.triple_ids,
                "cumulative_ids": sorted(consumed),
            },
            branch=branch,
        )

        groundings: dict[tuple[int, int], PremiseGrounding] = {}
        depth = 0
        branch_anchors = anchors
        branch_subgraph = subgraph
        while True:
            for ci, pi, premise in axiom.premises():
                prior = groundings.get((ci, pi))
                if prior is not None and prior.status is not GroundingStatus.UNKNOWN:
                    continue  # settled verdicts and their citations stand
                g = ground_premise(kg, backend, premise, consumed, audit)
                groundings[(ci, pi)] = g
                trace.record(
                    "PremiseGrounding",
                    {
                        "option": option_index,
                        "premise": serialize_premise(premise),
                        "clause_index": ci,
                        "premise_index": pi,
                        "status": g.status.value,
                        "method": g.method,
                        "evidence": sorted(g.evidence),
                    },
                    branch=branch,
                    depth=depth,
                )
            value = evaluate_axiom(axiom, groundings)
            trace.record(
                "Evaluation",
                {"option": option_index, "value": value},
                branch=branch,
                depth=depth,
            )
            if value != "Unknown":
                return value, branches_used
            if depth >= config.max_depth:
                break
            unsatisfied = [
                p for (ci, pi, p) in axiom.premises()
                if groundings[(ci, pi)].status is GroundingStatus.UNKNOWN
            ]
            try:
                missing = identify_missing(
                    kg, backend, query.text, axiom, branch_subgraph,
                    consumed, unsatisfied, branch_anchors, audit,
                )
            except ExpansionFailure as exc:
                audit.event(f"branch {branch} ended at depth {depth}: {exc}")
                break
            trace.record(
                "MEI",
                {
                    "option": option_index,
                    "missing": missing.description,
                    "entity_name": missing.entity_name,
                    "resolved": missing.resolved,
                    "already_anchor": missing.already_anchor,
                },
                branch=branch,
                depth=depth,
            )
            before = set(branch_subgraph.triple_ids)
            branch_subgraph, pruned = expand(
                kg, branch_anchors, branch_subgraph, missing, embedder,
                backend, axiom, config.top_k, consumed, audit, config.llm_window,
            )
            depth += 1
            trace.record(
                "Expansion",
                {
                    "option": option_index,
                    "added_entity": missing.resolved,
                    "new_subgraph_ids": sorted(set(branch_subgraph.triple_ids) - before),
                    "new_pruned_ids": pruned.triple_ids,
                    "cumulative_ids": sorted(consumed),
                },
                branch=branch,
                depth=depth,
            )
    return "Unknown", branches_used


def answer_query(
    kg: KnowledgeGraph,
    embedder: Embedder,
    backend,
    query: Query,
    config: Optional[SearchConfig] = None,
) -> QueryResult:
    """Answer a yes/no or claim query with a verifiable trace."""
    config = config or SearchConfig()
    trace = ReasoningTrace(query=_query_dict(query), config=config.to_dict())
    audit = Audit()
    value, branches = _run_option(kg, embedder, backend, query, config, trace, audit)
    answer = Answer(value=value)
    trace.record("FinalAnswer", {"value": value, "selected_option": None})
    trace.answer = {"value": value, "selected_option": None}
    trace.audit = audit.counters()
    return QueryResult(answer=answer, trace=trace, audit=audit, branches_used=branches)


def answer_multiple_choice(
    kg: KnowledgeGraph,
    embedder: Embedder,
    backend,
    query: Query,
    config: Optional[SearchConfig] = None,
) -> QueryResult:
    """Evaluate options in order; the first fully satisfied option is selected."""
    if not query.options:
        raise ValueError("multiple choice requires options")
    config = config or SearchConfig()
    trace = ReasoningTrace(query=_query_dict(query), config=config.to_dict())
    audit = Audit()
    branches = 0
    selected: Optional[int] = None
    for idx, option in enumerate(query.options):
        value, used = _run_option(
            kg, embedder, backend, query, config, trace, audit,
            option=option, option_index=idx,
        )
        branches += used
        trace.record("OptionResult", {"option": idx, "value": value})
        if value == "True":
            selected = idx
            break
    if selected is not None:
        answer = Answer(value="True", selected_option=selected)
    else:
        answer = Answer(value="Unknown")
    trace.record(
        "FinalAnswer",
        {"value": answer.value, "selected_option": answer.selected_option},
    )
    trace.answer = {"value": answer.value, "selected_option": answer.selected_option}
    trace.audit = audit.counters()
    return QueryResult(answer=answer, trace=trace, audit=audit, branches_used=branches)


def _query_dict(query: Query) -> dict:
    return {"text": query.text, "options": list(query.options), "task": query.task}
