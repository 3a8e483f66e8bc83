"""Corpus-level BLEU with modified n-gram precision and brevity penalty.

Candidate n-gram counts are clipped against the maximum count over the
references; precisions are pooled over the corpus before the geometric
mean, and the brevity penalty uses the closest reference length (ties
going to the shorter reference) summed over the corpus.  Per-sample scores
use the same formula on a single sample's statistics.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from ..errors import ContractError

MAX_N = 4


def ngram_counts(tokens, max_n: int = MAX_N) -> Counter:
    counts: Counter = Counter()
    for n in range(1, max_n + 1):
        for i in range(len(tokens) - n + 1):
            counts[tuple(tokens[i : i + n])] += 1
    return counts


def closest_ref_length(candidate_len: int, ref_lens) -> int:
    """Reference length closest to the candidate's; ties prefer the shorter."""
    return min(ref_lens, key=lambda l: (abs(l - candidate_len), l))


@dataclass(frozen=True, slots=True)
class BleuStats:
    """Sufficient statistics of one candidate against its references."""

    correct: tuple[int, ...]
    guess: tuple[int, ...]
    candidate_len: int
    ref_len: int


def sentence_stats(candidate, references, max_n: int = MAX_N) -> BleuStats:
    if not references:
        raise ContractError("BLEU needs at least one reference")
    cand_counts = ngram_counts(candidate, max_n)
    max_ref_counts: Counter = Counter()
    for ref in references:
        for ngram, count in ngram_counts(ref, max_n).items():
            max_ref_counts[ngram] = max(max_ref_counts[ngram], count)

    correct = [0] * max_n
    for ngram, count in cand_counts.items():
        correct[len(ngram) - 1] += min(count, max_ref_counts.get(ngram, 0))
    guess = [max(len(candidate) - n + 1, 0) for n in range(1, max_n + 1)]
    return BleuStats(
        correct=tuple(correct),
        guess=tuple(guess),
        candidate_len=len(candidate),
        ref_len=closest_ref_length(len(candidate), [len(r) for r in references]),
    )


def scores_from_stats(stats_list, weights=None, max_n: int = MAX_N) -> list[float]:
    """Pool statistics and score B1..Bn.

    ``weights`` scale each sample's *matched* n-gram counts (its correct
    counts) by its task score while guesses and lengths stay unweighted.
    That is the corpus-pooled analogue of scaling a per-sample metric: the
    result is never above the unweighted score, collapses to it when every
    weight is 1, and is 0 when every weight is 0.
    """
    stats_list = list(stats_list)
    if not stats_list:
        raise ContractError("BLEU over an empty corpus is undefined")
    if weights is None:
        weights = [1.0] * len(stats_list)

    correct = [0.0] * max_n
    guess = [0.0] * max_n
    cand_len = 0.0
    ref_len = 0.0
    for stats, weight in zip(stats_list, weights):
        for k in range(max_n):
            correct[k] += weight * stats.correct[k]
            guess[k] += stats.guess[k]
        cand_len += stats.candidate_len
        ref_len += stats.ref_len

    brevity = 1.0
    if cand_len < ref_len:
        brevity = math.exp(1 - ref_len / cand_len) if cand_len > 0 else 0.0

    scores = []
    log_sum = 0.0
    degenerate = False
    for k in range(max_n):
        if correct[k] <= 0 or guess[k] <= 0:
            degenerate = True
        if degenerate:
            scores.append(0.0)
            continue
        log_sum += math.log(correct[k] / guess[k])
        scores.append(brevity * math.exp(log_sum / (k + 1)))
    return scores


def sentence_scores(candidate, references, max_n: int = MAX_N) -> list[float]:
    return scores_from_stats([sentence_stats(candidate, references, max_n)], max_n=max_n)


def bleu_corpus(pairs, max_n: int = MAX_N) -> list[float]:
    """[B1..B4] over (candidate tokens, reference token lists) pairs."""
    return scores_from_stats(
        [sentence_stats(cand, refs, max_n) for cand, refs in pairs], max_n=max_n
    )
