"""Corpus evaluation in the three reporting modes.

* ``unfiltered`` scores explanations of every sample.
* ``filtered`` scores only samples whose task answer was correct
  (task score > 0).
* ``scaled`` weights every sample's explanation metric by its task score,
  averaged over all samples.  For the corpus-pooled BLEU statistics the
  per-sample n-gram counts are weighted by the task score, which keeps the
  mode algebra exact: at 100% task accuracy all three modes coincide, and
  at 0% the scaled values are all zero.

Coordinate tokens are stripped from both candidate and reference
explanations before tokenization.  CIDEr document frequencies are built
once over all gold references of the evaluated corpus and reused for every
mode, so mode differences reflect sample selection only.  All metric
values are reported multiplied by 100.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..errors import ContractError, JoinError, ProviderError
from ..prompts import strip_bbox_tokens
from ..scoring import accuracy, score_sample
from .bertscore import bert_score_corpus
from .bleu import scores_from_stats, sentence_stats
from .cider import build_doc_freq, cider_d
from .meteor import meteor
from .rouge import rouge_l
from .text import tokenize

SPICE_NOTE = "needs an external scene-graph parser; not computed by this toolkit"


class Mode(str, Enum):
    FILTERED = "filtered"
    UNFILTERED = "unfiltered"
    SCALED = "scaled"


@dataclass(frozen=True, slots=True)
class MetricReport:
    """Per-dataset automatic metrics under one reporting mode, x100 scale."""

    mode: Mode
    metrics: dict
    unavailable: dict
    accuracy: float
    counts: dict

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "metrics": {
                k: (round(v, 4) if v is not None else None) for k, v in self.metrics.items()
            },
            "unavailable": dict(self.unavailable),
            "accuracy": self.accuracy,
            "counts": dict(self.counts),
        }


METRIC_KEYS = ("bleu_1", "bleu_2", "bleu_3", "bleu_4", "rouge_l", "meteor", "cider_d")

DISPLAY_NAMES = {
    "bleu_1": "B1",
    "bleu_2": "B2",
    "bleu_3": "B3",
    "bleu_4": "B4",
    "rouge_l": "R-L",
    "meteor": "M",
    "cider_d": "C",
    "bert_score": "BS",
}


def join_predictions(parsed, gold):
    """Pair each prediction with its gold sample; unmatched ids are an error."""
    by_id = {sample.id: sample for sample in gold}
    missing = [pred.sample_id for pred in parsed if pred.sample_id not in by_id]
    if missing:
        preview = ", ".join(missing[:10])
        raise JoinError(
            f"{len(missing)} prediction id(s) have no gold sample: {preview}",
            missing_ids=missing,
        )
    return [(pred, by_id[pred.sample_id]) for pred in parsed]


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


def evaluate(parsed, gold, mode, bertscore_provider=None) -> MetricReport:
    """Build the metric report for one reporting mode."""
    mode = Mode(mode)
    joined = join_predictions(parsed, gold)
    if not joined:
        raise ContractError("cannot evaluate an empty prediction set")

    candidates = [tokenize(strip_bbox_tokens(pred.explanation)) for pred, _ in joined]
    references = [
        [tokenize(strip_bbox_tokens(text)) for text in sample.gold_explanations]
        for _, sample in joined
    ]
    task_scores = [float(score_sample(pred, sample)) for pred, sample in joined]
    malformed = sum(1 for pred, _ in joined if pred.malformed)

    # per-sample metric values, computed once over the full corpus
    doc_freq = build_doc_freq(references)
    cider_scores, _ = cider_d(list(zip(candidates, references)), doc_freq=doc_freq)
    rouge_scores = [rouge_l(c, r) for c, r in zip(candidates, references)]
    meteor_scores = [meteor(c, r) for c, r in zip(candidates, references)]
    bleu_stats = [sentence_stats(c, r) for c, r in zip(candidates, references)]

    unavailable = {"spice": SPICE_NOTE}
    bert_scores = None
    if bertscore_provider is not None:
        texts = [strip_bbox_tokens(pred.explanation) for pred, _ in joined]
        ref_texts = [
            [strip_bbox_tokens(t) for t in sample.gold_explanations] for _, sample in joined
        ]
        try:
            bert_scores, _ = bert_score_corpus(
                list(zip(texts, ref_texts)), bertscore_provider
            )
        except ProviderError as exc:
            unavailable["bert_score"] = str(exc)
    else:
        unavailable["bert_score"] = "no embedding provider configured"

    total = len(joined)
    if mode is Mode.FILTERED:
        keep = [i for i, score in enumerate(task_scores) if score > 0]
        evaluated, excluded = len(keep), total - len(keep)
        if keep:
            bleu_values = scores_from_stats([bleu_stats[i] for i in keep])
            values = {
                "bleu_1": bleu_values[0],
                "bleu_2": bleu_values[1],
                "bleu_3": bleu_values[2],
                "bleu_4": bleu_values[3],
                "rouge_l": _mean(rouge_scores[i] for i in keep),
                "meteor": _mean(meteor_scores[i] for i in keep),
                "cider_d": _mean(cider_scores[i] for i in keep),
            }
            if bert_scores is not None:
                values["bert_score"] = _mean(bert_scores[i] for i in keep)
        else:
            values = {key: None for key in METRIC_KEYS}
            if bert_scores is not None:
                values["bert_score"] = None
    elif mode is Mode.UNFILTERED:
        evaluated, excluded = total, 0
        bleu_values = scores_from_stats(bleu_stats)
        values = {
            "bleu_1": bleu_values[0],
            "bleu_2": bleu_values[1],
            "bleu_3": bleu_values[2],
            "bleu_4": bleu_values[3],
            "rouge_l": _mean(rouge_scores),
            "meteor": _mean(meteor_scores),
            "cider_d": _mean(cider_scores),
        }
        if bert_scores is not None:
            values["bert_score"] = _mean(bert_scores)
    else:  # scaled
        evaluated, excluded = total, 0
        bleu_values = scores_from_stats(bleu_stats, weights=task_scores)
        values = {
            "bleu_1": bleu_values[0],
            "bleu_2": bleu_values[1],
            "bleu_3": bleu_values[2],
            "bleu_4": bleu_values[3],
            "rouge_l": _mean(v * s for v, s in zip(rouge_scores, task_scores)),
            "meteor": _mean(v * s for v, s in zip(meteor_scores, task_scores)),
            "cider_d": _mean(v * s for v, s in zip(cider_scores, task_scores)),
        }
        if bert_scores is not None:
            values["bert_score"] = _mean(v * s for v, s in zip(bert_scores, task_scores))

    metrics = {
        key: (value * 100 if value is not None else None) for key, value in values.items()
    }
    return MetricReport(
        mode=mode,
        metrics=metrics,
        unavailable=unavailable,
        accuracy=accuracy([score_sample(pred, sample) for pred, sample in joined]),
        counts={
            "total": total,
            "evaluated": evaluated,
            "excluded": excluded,
            "malformed": malformed,
        },
    )


def format_table(report: MetricReport) -> str:
    """Human-readable rendering of one report."""
    lines = [f"mode: {report.mode.value}"]
    header = []
    row = []
    for key, value in report.metrics.items():
        header.append(DISPLAY_NAMES.get(key, key))
        row.append("-" if value is None else f"{value:.1f}")
    header.append("Acc.")
    row.append(f"{report.accuracy:.1f}")
    widths = [max(len(h), len(r)) for h, r in zip(header, row)]
    lines.append("  ".join(h.rjust(w) for h, w in zip(header, widths)))
    lines.append("  ".join(r.rjust(w) for r, w in zip(row, widths)))
    counts = report.counts
    lines.append(
        f"samples: {counts['total']}  evaluated: {counts['evaluated']}  "
        f"excluded: {counts['excluded']}  malformed: {counts['malformed']}"
    )
    for key, reason in report.unavailable.items():
        lines.append(f"{DISPLAY_NAMES.get(key, key)} unavailable: {reason}")
    return "\n".join(lines)
