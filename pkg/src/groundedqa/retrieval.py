"""Dense pruning of the query subgraph to axiom-relevant triples.

Relevance is the union of two selectors: the k nearest triple verbalizations
to the axiom text by Euclidean distance, and an LLM pick over a bounded
candidate window. The reference embedder is a hashed bag of tokens so
offline runs and tests are fully deterministic; any remote embedder can be
dropped in behind the same interface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Protocol, Sequence

import numpy as np
import requests

from .axioms import Axiom, serialize_axiom
from .kg import KnowledgeGraph, Subgraph, Triple
from .llm import LlmRequest, parse_select
from .prompts import number_lines, render_prompt
from .trace import Audit

DEFAULT_DIMENSION = 256
DEFAULT_LLM_WINDOW = 40

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 2**64


class Embedder(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


def _fnv1a_64(token: str) -> int:
    h = _FNV_OFFSET
    for byte in token.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) % _U64
    return h


class HashedEmbedder:
    """Hashed bag-of-tokens embedding: deterministic and dependency-free.

    Tokens are lowercased alphanumeric runs; each token's FNV-1a 64-bit hash
    mod the dimension increments a bucket, then the vector is L2-normalized.
    Empty text embeds to the zero vector.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension)
        for token in _TOKEN_SPLIT.split(text.lower()):
            if token:
                vec[_fnv1a_64(token) % self.dimension] += 1.0
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec


class RemoteEmbedder:
    """Embeddings endpoint client (OpenAI-style ``/embeddings`` wire format)."""

    def __init__(self, endpoint: str, model: str, dimension: int,
                 api_key: str = "", timeout: float = 30.0):
        self.endpoint = endpoint
        self.model = model
        self.dimension = dimension
        self.api_key = api_key
        self.timeout = timeout
        self._session = requests.Session()

    def embed(self, text: str) -> np.ndarray:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        resp = self._session.post(
            self.endpoint,
            json={"model": self.model, "input": text},
            headers=headers,
            timeout=self.timeout,
        )
        resp.raise_for_status()
        values = np.asarray(resp.json()["data"][0]["embedding"], dtype=float)
        if values.shape != (self.dimension,):
            raise ValueError(f"expected dimension {self.dimension}, got {values.shape}")
        return values


@dataclass
class PrunedTripleSet:
    """Triples surfaced for one pruning round, plus the branch's running total."""

    triple_ids: list[int]
    consumed: set[int]


def verbalize(kg: KnowledgeGraph, triple: Triple) -> str:
    """Readable one-line form: head label, relation, tail label or literal."""
    tail_entity = kg.tail_entity(triple)
    tail = kg.label_of(tail_entity) if tail_entity is not None else triple.tail
    return f"{kg.label_of(triple.head)} {triple.relation} {tail}"


def top_k_similar(
    embedder: Embedder,
    axiom_text: str,
    kg: KnowledgeGraph,
    triple_ids: Iterable[int],
    k: int,
    exclude: set[int] = frozenset(),
) -> list[int]:
    """The k candidate triples nearest to the axiom text.

    Ascending Euclidean distance between embeddings, ties broken by smaller
    triple id; excluded ids never appear.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    candidates = sorted(set(triple_ids) - set(exclude))
    if k == 0 or not candidates:
        return []
    query_vec = embedder.embed(axiom_text)
    scored = []
    for tid in candidates:
        vec = embedder.embed(verbalize(kg, kg.triple(tid)))
        scored.append((float(np.linalg.norm(vec - query_vec)), tid))
    scored.sort()
    return [tid for _, tid in scored[:k]]


def llm_select_triples(
    backend,
    kg: KnowledgeGraph,
    axiom: Axiom,
    candidate_ids: Sequence[int],
    audit: Audit,
) -> set[int]:
    """LLM pick over a 1-based numbered candidate list; invalid indices dropped."""
    candidates = list(candidate_ids)
    numbered = number_lines([verbalize(kg, kg.triple(tid)) for tid in candidates])
    prompt = render_prompt(
        "triple_select",
        {"axiom_text": serialize_axiom(axiom), "numbered_triples": numbered},
    )
    response = backend.complete(LlmRequest(role="triple_select", rendered_prompt=prompt))
    parsed = parse_select(response, len(candidates))
    if parsed is None:
        audit.parse_failures += 1
        audit.event("triple_select: unparseable response")
        return set()
    indices, dropped = parsed
    for token in dropped:
        audit.event(f"triple_select: dropped invalid index {token!r}")
    return {candidates[i - 1] for i in indices}


def prune_subgraph(
    embedder: Embedder,
    backend,
    kg: KnowledgeGraph,
    axiom: Axiom,
    subgraph: Subgraph,
    k: int,
    consumed: set[int],
    audit: Audit,
    llm_window: int = DEFAULT_LLM_WINDOW,
) -> PrunedTripleSet:
    """Union of embedding top-k and LLM selection, skipping consumed triples."""
    available = sorted(set(subgraph.triple_ids) - consumed)
    top_ids = top_k_similar(
        embedder, serialize_axiom(axiom), kg, available, k,
    )
    window = available[:llm_window]
    llm_ids = llm_select_triples(backend, kg, axiom, window, audit) if window else set()
    picked = sorted(set(top_ids) | llm_ids)
    consumed.update(picked)
    return PrunedTripleSet(triple_ids=picked, consumed=consumed)
