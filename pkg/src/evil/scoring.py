"""Per-sample task scores and dataset accuracy.

VQA-X awards the consensus soft score min(n/3, 1) where n is the number of
annotators who gave the predicted answer, so scores land in
{0, 1/3, 2/3, 1}.  e-SNLI-VE and VCR award 1 for the single correct answer
and 0 otherwise.  Scores are exact rationals; accuracy is their mean as a
percentage with one decimal.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ContractError
from .parsing import ParsedPrediction, normalize_answer
from .prompts import answer_word_to_label
from .samples import DatasetId, Sample

ANSWER_WORDS = ("yes", "maybe", "no")


def score_sample(pred: ParsedPrediction, gold: Sample) -> Fraction:
    """Task score of one prediction against its gold sample."""
    if pred.sample_id != gold.id:
        raise ContractError(f"prediction id {pred.sample_id!r} does not match sample {gold.id!r}")

    if gold.dataset is DatasetId.VQAX:
        if not pred.answer:
            return Fraction(0)
        counts = {normalize_answer(text): count for text, count in gold.gold_answers}
        matched = counts.get(pred.answer, 0)
        return min(Fraction(matched, 3), Fraction(1))

    if gold.dataset is DatasetId.ESNLIVE:
        if pred.answer in ANSWER_WORDS and answer_word_to_label(pred.answer) == gold.gold_label:
            return Fraction(1)
        return Fraction(0)

    # VCR: unparseable choice tokens score 0 rather than erroring, so
    # evaluation stays total over arbitrary generations.
    return Fraction(1) if pred.vcr_index == gold.vcr_gold_index else Fraction(0)


def accuracy(scores) -> float:
    """Arithmetic mean of task scores as a percentage, one decimal."""
    scores = list(scores)
    if not scores:
        raise ContractError("accuracy of an empty score list is undefined")
    mean = sum(Fraction(s) for s in scores) / len(scores)
    return round(float(mean) * 100, 1)
