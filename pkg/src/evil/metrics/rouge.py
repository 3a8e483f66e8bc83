"""ROUGE-L: longest-common-subsequence F-measure.

Per reference, precision is LCS/len(candidate) and recall is
LCS/len(reference).  Following the established caption-evaluation
convention for multi-reference scoring, the maximum precision and maximum
recall over the references are combined into a single F-measure with
beta = 1.2.  The corpus value is the mean over samples.
"""

from __future__ import annotations

DEFAULT_BETA = 1.2


def lcs_length(a, b) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[len(b)]


def rouge_l(candidate, references, beta: float = DEFAULT_BETA) -> float:
    """LCS F-measure of one candidate against its references."""
    if not candidate:
        return 0.0
    best_precision = 0.0
    best_recall = 0.0
    for reference in references:
        if not reference:
            continue
        lcs = lcs_length(candidate, reference)
        best_precision = max(best_precision, lcs / len(candidate))
        best_recall = max(best_recall, lcs / len(reference))
    if best_precision == 0.0 or best_recall == 0.0:
        return 0.0
    return ((1 + beta**2) * best_precision * best_recall) / (
        best_recall + beta**2 * best_precision
    )


def rouge_l_corpus(pairs, beta: float = DEFAULT_BETA) -> float:
    """Mean ROUGE-L over (candidate, references) pairs."""
    pairs = list(pairs)
    if not pairs:
        return 0.0
    return sum(rouge_l(c, rs, beta) for c, rs in pairs) / len(pairs)
