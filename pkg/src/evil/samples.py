"""Unified sample model for the three explanation datasets.

Every task instance, regardless of source dataset, is normalized into a
:class:`Sample` and exchanged on disk as UTF-8 JSON lines (one sample per
line, coordinates in pixel units).  Third-party release formats are
converted into this form by the loaders in :mod:`evil.adapters`; everything
downstream (prompts, scoring, metrics, human evaluation) only ever sees
``Sample`` objects.

The canonical on-disk layout consumed by :func:`load_dataset` is::

    <root>/<dataset>/<split>.jsonl      e.g.  <root>/vqax/test.jsonl

See docs/DATA.md for the adapter input formats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import ContractError, DataLoadError, RecordParseError, ValidationError


class DatasetId(str, Enum):
    VQAX = "vqax"
    ESNLIVE = "esnlive"
    VCR = "vcr"


class Split(str, Enum):
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


ENTAILMENT_LABELS = ("entailment", "neutral", "contradiction")

# Released split sizes in thousands of samples, as published for the three
# source datasets and their combination.  The combined row must equal the
# sum of its components; tests check this identity.
RELEASED_SPLIT_SIZES_K = {
    DatasetId.VQAX: {Split.TRAIN: 29.5, Split.VALIDATION: 1.5, Split.TEST: 2.0},
    DatasetId.ESNLIVE: {Split.TRAIN: 401.7, Split.VALIDATION: 14.3, Split.TEST: 14.7},
    DatasetId.VCR: {Split.TRAIN: 212.9, Split.VALIDATION: 26.5, Split.TEST: 25.2},
    "combined": {Split.TRAIN: 644.1, Split.VALIDATION: 42.3, Split.TEST: 41.9},
}


@dataclass(frozen=True, slots=True)
class ImageRef:
    """Reference to an image on disk; extents are 0 when unknown."""

    path: str
    width: int = 0
    height: int = 0


@dataclass(frozen=True, slots=True)
class BoundingBox:
    """Axis-aligned box in image pixel space, corners (x1, y1) <= (x2, y2)."""

    x1: float
    y1: float
    x2: float
    y2: float
    label: str = ""


@dataclass(frozen=True, slots=True)
class Sample:
    """One task instance in the unified model.

    ``gold_answers`` holds (answer text, annotator count) pairs.  Datasets
    with a single canonical label store exactly one pair with count 1; the
    VCR label is the literal choice token ``answer0`` .. ``answer3``.
    """

    id: str
    dataset: DatasetId
    split: Split
    image: ImageRef
    question_or_hypothesis: str
    gold_answers: tuple[tuple[str, int], ...]
    gold_explanations: tuple[str, ...]
    choices: tuple[str, ...] | None = None
    boxes: dict[str, BoundingBox] = field(default_factory=dict)

    @property
    def gold_label(self) -> str:
        """Canonical single label (first gold answer text)."""
        return self.gold_answers[0][0]

    @property
    def consensus_answer(self) -> str:
        """Answer with the highest annotator count (ties: first listed)."""
        return max(self.gold_answers, key=lambda pair: pair[1])[0]

    @property
    def vcr_gold_index(self) -> int:
        """Gold choice index for VCR samples."""
        label = self.gold_label
        if not (label.startswith("answer") and label[6:].isdigit()):
            raise ContractError(f"sample {self.id}: gold label {label!r} is not a choice token")
        return int(label[6:])


@dataclass(frozen=True, slots=True)
class SplitStats:
    """Per-dataset sample counts for one collection of samples."""

    counts: tuple[tuple[DatasetId, int], ...]
    total: int

    def count(self, dataset: DatasetId) -> int:
        return dict(self.counts).get(dataset, 0)

    def to_dict(self) -> dict:
        return {
            "per_dataset": {d.value: n for d, n in self.counts},
            "total": self.total,
        }


def validate_sample(sample: Sample) -> None:
    """Check every Sample invariant; raises ValidationError naming the sample."""

    def fail(reason: str) -> None:
        raise ValidationError(f"sample {sample.id!r}: {reason}")

    if not sample.id:
        raise ValidationError("sample with empty id")
    if not sample.gold_explanations:
        fail("gold_explanations must be nonempty")
    if not sample.gold_answers:
        fail("gold_answers must be nonempty")
    for answer, count in sample.gold_answers:
        if count < 1:
            fail(f"annotator count for answer {answer!r} must be >= 1")

    if sample.dataset is DatasetId.VCR:
        if sample.choices is None or len(sample.choices) != 4:
            fail("VCR samples need exactly 4 choices")
        label = sample.gold_label
        if not (label.startswith("answer") and label[6:].isdigit() and 0 <= int(label[6:]) <= 3):
            fail(f"VCR gold answer {label!r} is not answer0..answer3")
    elif sample.choices is not None:
        fail("choices are only valid for VCR samples")

    if sample.dataset is DatasetId.ESNLIVE:
        if sample.gold_label not in ENTAILMENT_LABELS:
            fail(f"label {sample.gold_label!r} not in {ENTAILMENT_LABELS}")

    if sample.boxes:
        width, height = sample.image.width, sample.image.height
        if width <= 0 or height <= 0:
            fail("boxes present but image extent is unknown")
        for token, box in sample.boxes.items():
            if not (0 <= box.x1 <= box.x2 <= width and 0 <= box.y1 <= box.y2 <= height):
                fail(f"box {token!r} outside image extent {width}x{height}")


def sample_to_dict(sample: Sample) -> dict:
    record = {
        "id": sample.id,
        "dataset": sample.dataset.value,
        "split": sample.split.value,
        "image": {
            "path": sample.image.path,
            "width": sample.image.width,
            "height": sample.image.height,
        },
        "question_or_hypothesis": sample.question_or_hypothesis,
        "gold_answers": [[text, count] for text, count in sample.gold_answers],
        "gold_explanations": list(sample.gold_explanations),
    }
    if sample.choices is not None:
        record["choices"] = list(sample.choices)
    if sample.boxes:
        record["boxes"] = {
            token: {"x1": b.x1, "y1": b.y1, "x2": b.x2, "y2": b.y2, "label": b.label}
            for token, b in sample.boxes.items()
        }
    return record


def sample_from_dict(record: dict) -> Sample:
    image = record.get("image", {})
    boxes = {
        token: BoundingBox(
            x1=float(b["x1"]),
            y1=float(b["y1"]),
            x2=float(b["x2"]),
            y2=float(b["y2"]),
            label=b.get("label", token),
        )
        for token, b in record.get("boxes", {}).items()
    }
    choices = record.get("choices")
    return Sample(
        id=str(record["id"]),
        dataset=DatasetId(record["dataset"]),
        split=Split(record["split"]),
        image=ImageRef(
            path=image.get("path", ""),
            width=int(image.get("width", 0)),
            height=int(image.get("height", 0)),
        ),
        question_or_hypothesis=record["question_or_hypothesis"],
        gold_answers=tuple((str(t), int(c)) for t, c in record["gold_answers"]),
        gold_explanations=tuple(record["gold_explanations"]),
        choices=tuple(choices) if choices is not None else None,
        boxes=boxes,
    )


def write_samples(samples, path) -> None:
    """Write samples as canonical JSON lines (stable key order)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for sample in samples:
            handle.write(json.dumps(sample_to_dict(sample), sort_keys=True) + "\n")


def read_samples(path) -> list[Sample]:
    """Read canonical JSON-lines samples, validating every record."""
    path = Path(path)
    if not path.is_file():
        raise DataLoadError(f"missing sample file: {path}")
    samples = []
    with path.open("r", encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                sample = sample_from_dict(record)
            except ValidationError:
                raise
            except (KeyError, TypeError, ValueError) as exc:
                raise RecordParseError(str(exc), index=index, path=str(path)) from exc
            validate_sample(sample)
            samples.append(sample)
    return samples


def load_dataset(dataset: DatasetId, split: Split, root) -> list[Sample]:
    """Load one split of one dataset from the canonical on-disk layout.

    Returns all samples of the split in deterministic order (sorted by id),
    with every invariant checked, including id uniqueness within the split.
    """
    dataset = DatasetId(dataset)
    split = Split(split)
    path = Path(root) / dataset.value / f"{split.value}.jsonl"
    samples = read_samples(path)

    seen: set[str] = set()
    for sample in samples:
        if sample.dataset is not dataset:
            raise ValidationError(
                f"sample {sample.id!r}: dataset {sample.dataset.value} found in {dataset.value} file"
            )
        if sample.split is not split:
            raise ValidationError(
                f"sample {sample.id!r}: split {sample.split.value} found in {split.value} file"
            )
        if sample.id in seen:
            raise ValidationError(f"sample {sample.id!r}: duplicate id within split")
        seen.add(sample.id)
    return sorted(samples, key=lambda s: s.id)


def build_combined(parts: list[list[Sample]]) -> list[Sample]:
    """Concatenate per-dataset splits into the combined multi-task corpus.

    Every sample is kept exactly once, in input order, with its id
    namespaced as ``<dataset>/<original id>`` so ids stay unique and
    reversible.  No rebalancing is applied; the component tasks remain
    represented in proportion to their original sizes.
    """
    splits = {sample.split for part in parts for sample in part}
    if len(splits) > 1:
        names = sorted(s.value for s in splits)
        raise ContractError(f"cannot combine samples from mixed splits: {names}")

    combined = []
    for part in parts:
        for sample in part:
            namespaced = f"{sample.dataset.value}/{sample.id}"
            combined.append(
                Sample(
                    id=namespaced,
                    dataset=sample.dataset,
                    split=sample.split,
                    image=sample.image,
                    question_or_hypothesis=sample.question_or_hypothesis,
                    gold_answers=sample.gold_answers,
                    gold_explanations=sample.gold_explanations,
                    choices=sample.choices,
                    boxes=sample.boxes,
                )
            )
    return combined


def split_original_id(namespaced_id: str) -> tuple[DatasetId, str]:
    """Invert the combined-corpus id namespacing."""
    prefix, _, original = namespaced_id.partition("/")
    return DatasetId(prefix), original


def stats(samples: list[Sample]) -> SplitStats:
    """Exact per-dataset counts; total always equals the input length."""
    counts = {dataset: 0 for dataset in DatasetId}
    for sample in samples:
        counts[sample.dataset] += 1
    return SplitStats(
        counts=tuple((dataset, counts[dataset]) for dataset in DatasetId),
        total=len(samples),
    )
