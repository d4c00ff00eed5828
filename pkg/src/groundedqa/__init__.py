"""Verifiable knowledge-graph question answering.

Answers natural-language queries over a knowledge graph by surfacing
explicit commonsense axioms, grounding every factual step on cited KG
triples, and refusing to guess when grounding fails. Every query yields a
machine-checkable reasoning trace.
"""

from .axioms import Axiom, AxiomSyntaxError, Premise, parse_axiom, serialize_axiom
from .entities import AnchorEntitySet, Query, anchor_entities, link_lexical
from .grounding import (
    Answer,
    GroundingStatus,
    PremiseGrounding,
    evaluate_axiom,
    ground_premise,
)
from .kg import KgParseError, KnowledgeGraph, Subgraph, Triple, normalize
from .llm import (
    HttpBackend,
    HttpConfig,
    LlmRequest,
    ScriptedBackend,
    ScriptExhaustedError,
    TransportError,
)
from .evalrun import DatasetItem, Metrics, load_dataset, run_eval
from .retrieval import HashedEmbedder, prune_subgraph, top_k_similar, verbalize
from .search import QueryResult, SearchConfig, answer_multiple_choice, answer_query
from .trace import Audit, ReasoningTrace, VerificationReport, load_trace, verify_trace

__all__ = [
    "AnchorEntitySet",
    "Answer",
    "Audit",
    "Axiom",
    "AxiomSyntaxError",
    "GroundingStatus",
    "HashedEmbedder",
    "HttpBackend",
    "HttpConfig",
    "KgParseError",
    "DatasetItem",
    "KnowledgeGraph",
    "LlmRequest",
    "Metrics",
    "Premise",
    "PremiseGrounding",
    "Query",
    "QueryResult",
    "ReasoningTrace",
    "ScriptExhaustedError",
    "ScriptedBackend",
    "SearchConfig",
    "Subgraph",
    "TransportError",
    "Triple",
    "VerificationReport",
    "anchor_entities",
    "answer_multiple_choice",
    "answer_query",
    "evaluate_axiom",
    "ground_premise",
    "link_lexical",
    "load_dataset",
    "load_trace",
    "normalize",
    "parse_axiom",
    "prune_subgraph",
    "run_eval",
    "serialize_axiom",
    "top_k_similar",
    "verbalize",
    "verify_trace",
]
