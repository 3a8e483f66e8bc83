"""Embedding-based similarity with pluggable embedding providers.

The metric itself is provider-agnostic: a provider turns raw text into
per-token contextual embedding vectors, and the score greedily matches
tokens by cosine similarity in both directions to produce precision,
recall, and F1.  Which model produced the vectors is opaque configuration
(the provider's ``model`` string).

Two providers are included: one reading precomputed vectors from a sidecar
JSON file, and one calling an HTTP endpoint with ``{"texts": [...]}`` and
expecting ``{"embeddings": [per-text [per-token [floats]]]}``.  When no
provider is configured the metric is reported absent, never zero-filled.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np

from ..errors import ProviderError


class FileEmbeddingProvider:
    """Reads precomputed per-token vectors from a sidecar JSON file.

    Schema: {"model": str, "texts": {text: [[float, ...], ...]}}
    """

    def __init__(self, path):
        path = Path(path)
        try:
            with path.open("r", encoding="utf-8") as handle:
                data = json.load(handle)
        except (OSError, ValueError) as exc:
            raise ProviderError(f"cannot read embedding sidecar {path}: {exc}") from exc
        self.model = data.get("model", "precomputed")
        self._texts = data.get("texts", {})

    def embed(self, texts):
        vectors = []
        for text in texts:
            if text not in self._texts:
                raise ProviderError(f"no precomputed embedding for text: {text!r}")
            vectors.append([list(map(float, vec)) for vec in self._texts[text]])
        return vectors


class HttpEmbeddingProvider:
    """POSTs {"texts": [...]} to an endpoint returning per-token vectors."""

    def __init__(self, endpoint: str, model: str = "remote", timeout: float = 30.0):
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout

    def embed(self, texts):
        payload = json.dumps({"texts": list(texts)}).encode("utf-8")
        request = urllib.request.Request(
            self.endpoint, data=payload, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                body = json.loads(response.read().decode("utf-8"))
        except (urllib.error.URLError, ValueError) as exc:
            raise ProviderError(f"embedding endpoint failed: {exc}") from exc
        embeddings = body.get("embeddings")
        if embeddings is None or len(embeddings) != len(texts):
            raise ProviderError("embedding endpoint returned a malformed response")
        return embeddings


def make_provider(spec: str):
    """Endpoint URLs become HTTP providers; anything else is a sidecar path."""
    if spec.startswith(("http://", "https://")):
        return HttpEmbeddingProvider(spec)
    return FileEmbeddingProvider(spec)


def _pair_f1(cand_vectors, ref_vectors) -> float:
    if not cand_vectors or not ref_vectors:
        return 0.0
    cand = np.asarray(cand_vectors, dtype=float)
    ref = np.asarray(ref_vectors, dtype=float)
    cand_norm = np.linalg.norm(cand, axis=1, keepdims=True)
    ref_norm = np.linalg.norm(ref, axis=1, keepdims=True)
    cand_norm[cand_norm == 0] = 1.0
    ref_norm[ref_norm == 0] = 1.0
    similarity = (cand / cand_norm) @ (ref / ref_norm).T
    precision = float(similarity.max(axis=1).mean())
    recall = float(similarity.max(axis=0).mean())
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def bert_score(candidate: str, references, provider) -> float:
    """F1 of one candidate text against its references (max over references)."""
    vectors = provider.embed([candidate, *references])
    cand_vectors, ref_vector_sets = vectors[0], vectors[1:]
    return max((_pair_f1(cand_vectors, refs) for refs in ref_vector_sets), default=0.0)


def bert_score_corpus(pairs, provider) -> tuple[list[float], float]:
    """Per-sample F1 values and their mean, batching one provider call."""
    pairs = list(pairs)
    texts = []
    for candidate, references in pairs:
        texts.append(candidate)
        texts.extend(references)
    embedded = provider.embed(texts)

    scores = []
    cursor = 0
    for candidate, references in pairs:
        cand_vectors = embedded[cursor]
        cursor += 1
        ref_sets = embedded[cursor : cursor + len(references)]
        cursor += len(references)
        scores.append(max((_pair_f1(cand_vectors, r) for r in ref_sets), default=0.0))
    mean = sum(scores) / len(scores) if scores else 0.0
    return scores, mean
