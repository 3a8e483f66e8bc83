"""Toolkit for evaluating vision-language models that explain their answers.

Covers the full non-training pipeline: ingesting VQA-X, e-SNLI-VE, and VCR
into one sample model, building the combined multi-task corpus, rendering
sequence-to-sequence prompts (including the coordinate-token notation for
VCR boxes), parsing model generations, task scoring, automatic explanation
metrics in filtered/unfiltered/scaled modes, and a human-evaluation
protocol with a live annotation collection service.
"""

from . import adapters, humaneval, metrics, parsing, prompts, scoring, service
from .errors import (
    ContractError,
    CoordinateRangeError,
    DataLoadError,
    EvilError,
    JoinError,
    RecordParseError,
    ValidationError,
)
from .samples import (
    BoundingBox,
    DatasetId,
    ImageRef,
    Sample,
    Split,
    SplitStats,
    build_combined,
    load_dataset,
    read_samples,
    stats,
    write_samples,
)

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "ContractError",
    "CoordinateRangeError",
    "DataLoadError",
    "DatasetId",
    "EvilError",
    "ImageRef",
    "JoinError",
    "RecordParseError",
    "Sample",
    "Split",
    "SplitStats",
    "ValidationError",
    "adapters",
    "build_combined",
    "humaneval",
    "load_dataset",
    "metrics",
    "parsing",
    "prompts",
    "read_samples",
    "scoring",
    "service",
    "stats",
    "write_samples",
]
