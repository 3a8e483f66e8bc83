"""Automatic explanation metrics and the three-mode corpus evaluator."""

from .bertscore import (
    FileEmbeddingProvider,
    HttpEmbeddingProvider,
    bert_score,
    bert_score_corpus,
    make_provider,
)
from .bleu import bleu_corpus, sentence_scores, sentence_stats, scores_from_stats
from .cider import DocFreqTable, build_doc_freq, cider_d, ngram_profile
from .meteor import MeteorConfig, meteor, meteor_corpus
from .report import MetricReport, Mode, evaluate, format_table, join_predictions
from .rouge import lcs_length, rouge_l, rouge_l_corpus
from .stem import stem
from .text import tokenize

__all__ = [
    "DocFreqTable",
    "FileEmbeddingProvider",
    "HttpEmbeddingProvider",
    "MeteorConfig",
    "MetricReport",
    "Mode",
    "bert_score",
    "bert_score_corpus",
    "bleu_corpus",
    "build_doc_freq",
    "cider_d",
    "evaluate",
    "format_table",
    "join_predictions",
    "lcs_length",
    "make_provider",
    "meteor",
    "meteor_corpus",
    "ngram_profile",
    "rouge_l",
    "rouge_l_corpus",
    "scores_from_stats",
    "sentence_scores",
    "sentence_stats",
    "stem",
    "tokenize",
]
