"""Consensus-based n-gram metric over TF-IDF vectors (CIDEr-D variant).

For n = 1..4, candidate and reference n-gram counts are turned into TF-IDF
vectors with idf = log(N / df), where df counts how many reference sets of
the evaluated corpus contain the n-gram (unseen n-grams get df = 1).  The
candidate's term frequencies are clipped to the reference's in the dot
product, the cosine similarity is damped by a Gaussian length penalty
exp(-(len_c - len_r)^2 / (2 * sigma^2)) with sigma = 6, the four n-gram
levels are averaged, and the result is scaled by 10, giving per-sample
scores in [0, 10].

Document frequencies default to the reference sets of the corpus being
evaluated; pass a prebuilt table to keep them fixed across evaluations of
subsets of the same corpus.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass

from ..errors import ContractError

MAX_N = 4
DEFAULT_SIGMA = 6.0
SCALE = 10.0


def ngram_profile(tokens, max_n: int = MAX_N) -> Counter:
    """Counts of all n-grams of order 1..max_n, keyed by token tuple."""
    counts: Counter = Counter()
    for n in range(1, max_n + 1):
        for i in range(len(tokens) - n + 1):
            counts[tuple(tokens[i : i + n])] += 1
    return counts


@dataclass(frozen=True, slots=True)
class DocFreqTable:
    """n-gram -> number of reference sets containing it, over num_docs sets."""

    frequencies: dict
    num_docs: int

    def idf(self, ngram) -> float:
        return math.log(self.num_docs) - math.log(max(1.0, self.frequencies.get(ngram, 0)))


def build_doc_freq(reference_sets, max_n: int = MAX_N) -> DocFreqTable:
    frequencies: dict = defaultdict(int)
    count = 0
    for references in reference_sets:
        count += 1
        seen = set()
        for reference in references:
            seen.update(ngram_profile(reference, max_n).keys())
        for ngram in seen:
            frequencies[ngram] += 1
    if count == 0:
        raise ContractError("document frequencies need at least one reference set")
    return DocFreqTable(frequencies=dict(frequencies), num_docs=count)


def _tfidf_vector(profile: Counter, table: DocFreqTable, max_n: int):
    vectors = [dict() for _ in range(max_n)]
    norms = [0.0] * max_n
    for ngram, count in profile.items():
        weight = count * table.idf(ngram)
        level = len(ngram) - 1
        vectors[level][ngram] = weight
        norms[level] += weight * weight
    return vectors, [math.sqrt(v) for v in norms]


def _similarity(cand_vec, cand_norm, ref_vec, ref_norm, delta: float, sigma: float, max_n: int):
    total = 0.0
    damping = math.exp(-(delta**2) / (2 * sigma**2))
    for n in range(max_n):
        value = 0.0
        for ngram, weight in cand_vec[n].items():
            value += min(weight, ref_vec[n].get(ngram, 0.0)) * ref_vec[n].get(ngram, 0.0)
        if cand_norm[n] != 0.0 and ref_norm[n] != 0.0:
            value /= cand_norm[n] * ref_norm[n]
        total += value * damping
    return total


def cider_d(
    pairs,
    doc_freq: DocFreqTable | None = None,
    max_n: int = MAX_N,
    sigma: float = DEFAULT_SIGMA,
) -> tuple[list[float], float]:
    """Per-sample scores and their corpus mean."""
    pairs = list(pairs)
    if not pairs:
        raise ContractError("CIDEr over an empty corpus is undefined")
    if doc_freq is None:
        doc_freq = build_doc_freq((refs for _, refs in pairs), max_n)

    scores = []
    for candidate, references in pairs:
        cand_vec, cand_norm = _tfidf_vector(ngram_profile(candidate, max_n), doc_freq, max_n)
        accumulated = 0.0
        for reference in references:
            ref_vec, ref_norm = _tfidf_vector(ngram_profile(reference, max_n), doc_freq, max_n)
            accumulated += _similarity(
                cand_vec,
                cand_norm,
                ref_vec,
                ref_norm,
                delta=float(len(candidate) - len(reference)),
                sigma=sigma,
                max_n=max_n,
            )
        score = accumulated / len(references) / max_n * SCALE if references else 0.0
        scores.append(score)
    return scores, sum(scores) / len(scores)
