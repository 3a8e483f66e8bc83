"""Unigram-alignment metric with staged matching and fragmentation penalty.

Candidate and reference unigrams are aligned in stages: exact surface
match first, then stem match, then an optional synonym stage backed by a
pluggable lexical resource (off by default).  Within each stage, candidate
tokens are scanned left to right and paired with the first still-unmatched
reference token that qualifies; this deterministic policy is part of the
metric's frozen definition.

With m matches over a candidate of length c and reference of length r:

    P = m / c,  R = m / r
    Fmean = P * R / (alpha * P + (1 - alpha) * R)
    penalty = gamma * (chunks / m) ** beta
    score = Fmean * (1 - penalty)

where chunks is the number of maximal runs of matches that are contiguous
in both sentences.  Multi-reference scores take the max over references;
the corpus value is the mean over samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .stem import stem

DEFAULT_ALPHA = 0.9
DEFAULT_BETA = 3.0
DEFAULT_GAMMA = 0.5


@dataclass(frozen=True, slots=True)
class MeteorConfig:
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    gamma: float = DEFAULT_GAMMA
    stemmer: Callable[[str], str] | None = stem
    # maps a word to its synonym set; None disables the synonym stage
    synonyms: Callable[[str], set[str]] | None = None


DEFAULT_CONFIG = MeteorConfig()


def align(candidate, reference, config: MeteorConfig = DEFAULT_CONFIG):
    """Match pairs (candidate index, reference index), staged as documented."""
    pairs: list[tuple[int, int]] = []
    cand_free = [True] * len(candidate)
    ref_free = [True] * len(reference)

    def run_stage(match) -> None:
        for i, cand_token in enumerate(candidate):
            if not cand_free[i]:
                continue
            for j, ref_token in enumerate(reference):
                if ref_free[j] and match(cand_token, ref_token):
                    pairs.append((i, j))
                    cand_free[i] = False
                    ref_free[j] = False
                    break

    run_stage(lambda c, r: c == r)
    if config.stemmer is not None:
        stemmer = config.stemmer
        run_stage(lambda c, r: stemmer(c) == stemmer(r))
    if config.synonyms is not None:
        synonyms = config.synonyms
        run_stage(lambda c, r: r in synonyms(c) or c in synonyms(r))

    pairs.sort()
    return pairs


def count_chunks(pairs) -> int:
    """Maximal runs of matches contiguous in both sentences."""
    chunks = 0
    previous = None
    for i, j in pairs:
        if previous is None or (i, j) != (previous[0] + 1, previous[1] + 1):
            chunks += 1
        previous = (i, j)
    return chunks


def meteor(candidate, references, config: MeteorConfig = DEFAULT_CONFIG) -> float:
    """Score of one candidate against its references (max over references)."""
    best = 0.0
    if not candidate:
        return best
    for reference in references:
        if not reference:
            continue
        pairs = align(candidate, reference, config)
        matches = len(pairs)
        if matches == 0:
            continue
        precision = matches / len(candidate)
        recall = matches / len(reference)
        fmean = precision * recall / (
            config.alpha * precision + (1 - config.alpha) * recall
        )
        penalty = config.gamma * (count_chunks(pairs) / matches) ** config.beta
        best = max(best, fmean * (1 - penalty))
    return best


def meteor_corpus(pairs, config: MeteorConfig = DEFAULT_CONFIG) -> float:
    pairs = list(pairs)
    if not pairs:
        return 0.0
    return sum(meteor(c, rs, config) for c, rs in pairs) / len(pairs)
