"""Human-evaluation protocol: task selection, rating semantics, aggregation.

Evaluation tasks are drawn uniformly at random (seeded, without
replacement) from the samples the model answered correctly.  Each task
shows annotators the task prompt and two explanations, the model's and the
ground truth's, in a blinded randomized order that is recorded server-side
for exact un-blinding.  Annotators first answer the task themselves; a
record only counts toward the aggregate when that answer matches the known
correct answer, which screens out annotators who did not understand the
task.

Ratings answer "does the explanation justify the answer" on a four-level
scale mapped onto 1, 2/3, 1/3, 0.  A weak-no or no rating must be
justified by at least one shortcoming choice.  Every task is meant to be
covered by at least five distinct valid annotators; under-quorum tasks are
flagged in the report rather than dropped.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path

from .errors import ContractError, DataLoadError, RecordParseError, ValidationError
from .metrics.report import join_predictions
from .parsing import normalize_answer
from .prompts import build_prompt, map_entailment_label, strip_bbox_tokens
from .samples import BoundingBox, DatasetId, ImageRef, Sample
from .scoring import score_sample

QUORUM = 5

MODEL = "model"
GROUND_TRUTH = "ground_truth"


class RatingLabel(str, Enum):
    YES = "yes"
    WEAK_YES = "weak_yes"
    WEAK_NO = "weak_no"
    NO = "no"


class Shortcoming(str, Enum):
    CONFUSING_SENTENCE = "confusing_sentence"
    INSUFFICIENT_JUSTIFICATION = "insufficient_justification"
    INCORRECT_IMAGE_DESCRIPTION = "incorrect_image_description"


class Preference(str, Enum):
    PREFER_A = "prefer_a"
    PREFER_B = "prefer_b"
    EQUAL = "equal"


_RATING_VALUES = {
    RatingLabel.YES: Fraction(1),
    RatingLabel.WEAK_YES: Fraction(2, 3),
    RatingLabel.WEAK_NO: Fraction(1, 3),
    RatingLabel.NO: Fraction(0),
}

NEGATIVE_LABELS = (RatingLabel.WEAK_NO, RatingLabel.NO)


def rating_value(label: RatingLabel) -> Fraction:
    """yes -> 1, weak yes -> 2/3, weak no -> 1/3, no -> 0."""
    return _RATING_VALUES[RatingLabel(label)]


@dataclass(frozen=True, slots=True)
class EvalTask:
    """One blinded rating task; ``sources`` and ``correct_answer`` stay server-side."""

    task_id: str
    sample_id: str
    dataset: DatasetId
    image: ImageRef
    prompt: str
    explanations: tuple[str, str]
    sources: tuple[str, str]
    correct_answer: str
    answer_options: tuple[str, ...] | None = None
    boxes: dict[str, BoundingBox] | None = None

    def source_position(self, source: str) -> int:
        return self.sources.index(source)

    def to_public_dict(self) -> dict:
        """Payload safe to show annotators: no sources, no correct answer."""
        record = {
            "task_id": self.task_id,
            "image": {
                "path": self.image.path,
                "width": self.image.width,
                "height": self.image.height,
            },
            "prompt": self.prompt,
            "explanations": list(self.explanations),
            "answer_options": list(self.answer_options) if self.answer_options else None,
        }
        if self.boxes:
            record["boxes"] = {
                token: {"x1": b.x1, "y1": b.y1, "x2": b.x2, "y2": b.y2}
                for token, b in self.boxes.items()
            }
        return record

    def to_dict(self) -> dict:
        record = self.to_public_dict()
        record.update(
            {
                "sample_id": self.sample_id,
                "dataset": self.dataset.value,
                "sources": list(self.sources),
                "correct_answer": self.correct_answer,
            }
        )
        return record


def task_from_dict(record: dict) -> EvalTask:
    image = record.get("image", {})
    boxes = {
        token: BoundingBox(x1=b["x1"], y1=b["y1"], x2=b["x2"], y2=b["y2"], label=token)
        for token, b in (record.get("boxes") or {}).items()
    }
    options = record.get("answer_options")
    return EvalTask(
        task_id=record["task_id"],
        sample_id=record["sample_id"],
        dataset=DatasetId(record["dataset"]),
        image=ImageRef(
            path=image.get("path", ""),
            width=int(image.get("width", 0)),
            height=int(image.get("height", 0)),
        ),
        prompt=record["prompt"],
        explanations=tuple(record["explanations"]),
        sources=tuple(record["sources"]),
        correct_answer=record["correct_answer"],
        answer_options=tuple(options) if options else None,
        boxes=boxes or None,
    )


@dataclass(frozen=True, slots=True)
class ExplanationRating:
    label: RatingLabel
    shortcomings: frozenset[Shortcoming] = frozenset()


@dataclass(frozen=True, slots=True)
class RatingRecord:
    """One annotator's judgment of one task, in display (blinded) order."""

    task_id: str
    annotator_id: str
    annotator_task_answer: str
    ratings: tuple[ExplanationRating, ExplanationRating]
    preference: Preference
    timestamp: str = ""


def validate_record(record: RatingRecord) -> None:
    """Enforce record invariants; names the offending field."""
    if not record.task_id:
        raise ValidationError("task_id: must be nonempty")
    if not record.annotator_id:
        raise ValidationError("annotator_id: must be nonempty")
    if len(record.ratings) != 2:
        raise ValidationError("ratings: exactly two explanation ratings are required")
    for position, rating in enumerate(record.ratings):
        field = f"ratings[{position}].shortcomings"
        if rating.label in NEGATIVE_LABELS and not rating.shortcomings:
            raise ValidationError(f"{field}: a {rating.label.value} rating must name a shortcoming")
        if rating.label not in NEGATIVE_LABELS and rating.shortcomings:
            raise ValidationError(f"{field}: shortcomings only accompany weak_no/no ratings")


def record_to_dict(record: RatingRecord) -> dict:
    return {
        "task_id": record.task_id,
        "annotator_id": record.annotator_id,
        "annotator_task_answer": record.annotator_task_answer,
        "ratings": [
            {"label": r.label.value, "shortcomings": sorted(s.value for s in r.shortcomings)}
            for r in record.ratings
        ],
        "preference": record.preference.value,
        "timestamp": record.timestamp,
    }


def record_from_dict(data: dict) -> RatingRecord:
    try:
        ratings = tuple(
            ExplanationRating(
                label=RatingLabel(r["label"]),
                shortcomings=frozenset(Shortcoming(s) for s in r.get("shortcomings", [])),
            )
            for r in data["ratings"]
        )
        record = RatingRecord(
            task_id=str(data["task_id"]),
            annotator_id=str(data["annotator_id"]),
            annotator_task_answer=str(data["annotator_task_answer"]),
            ratings=ratings,  # type: ignore[arg-type]
            preference=Preference(data["preference"]),
            timestamp=str(data.get("timestamp", "")),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ValidationError(f"malformed rating record: {exc}") from exc
    validate_record(record)
    return record


def _task_answer(sample: Sample) -> str:
    """Correct answer in the prompt's answer vocabulary."""
    if sample.dataset is DatasetId.ESNLIVE:
        return map_entailment_label(sample.gold_label)
    if sample.dataset is DatasetId.VCR:
        return sample.gold_label
    return sample.consensus_answer


def _answer_options(sample: Sample) -> tuple[str, ...] | None:
    if sample.dataset is DatasetId.ESNLIVE:
        return ("yes", "maybe", "no")
    if sample.dataset is DatasetId.VCR:
        return tuple(f"answer{k}" for k in range(4))
    return None


def select_samples(parsed, gold, n: int, seed: int) -> list[EvalTask]:
    """Draw evaluation tasks from correctly answered samples.

    Uniform draw without replacement, capped at availability; the blinding
    order of each task comes from the same seeded generator, so a fixed
    seed reproduces the exact task list.
    """
    if n < 1:
        raise ContractError(f"task count must be >= 1, got {n}")
    joined = join_predictions(parsed, gold)
    correct = [(pred, sample) for pred, sample in joined if score_sample(pred, sample) > 0]
    if not correct:
        raise ContractError("no correctly answered samples to draw from")

    rng = random.Random(seed)
    chosen = rng.sample(correct, min(n, len(correct)))

    tasks = []
    for index, (pred, sample) in enumerate(chosen):
        model_explanation = strip_bbox_tokens(pred.explanation)
        gt_explanation = strip_bbox_tokens(sample.gold_explanations[0])
        model_first = rng.random() < 0.5
        if model_first:
            explanations = (model_explanation, gt_explanation)
            sources = (MODEL, GROUND_TRUTH)
        else:
            explanations = (gt_explanation, model_explanation)
            sources = (GROUND_TRUTH, MODEL)
        tasks.append(
            EvalTask(
                task_id=f"task-{index:04d}",
                sample_id=sample.id,
                dataset=sample.dataset,
                image=sample.image,
                prompt=strip_bbox_tokens(build_prompt(sample).prompt),
                explanations=explanations,
                sources=sources,
                correct_answer=_task_answer(sample),
                answer_options=_answer_options(sample),
                boxes=dict(sample.boxes) if sample.boxes else None,
            )
        )
    return tasks


def record_valid(record: RatingRecord, task: EvalTask) -> bool:
    """A record counts only when the annotator solved the task themselves."""
    if record.task_id != task.task_id:
        raise ContractError(
            f"record for task {record.task_id!r} checked against task {task.task_id!r}"
        )
    return normalize_answer(record.annotator_task_answer) == normalize_answer(task.correct_answer)


@dataclass(frozen=True, slots=True)
class HumanReport:
    """Aggregated study statistics (percentages on the 0-100 scale)."""

    mean_rating: dict
    shortcomings: dict
    preference: dict
    counts: dict
    per_task: dict
    quorum: int = QUORUM

    def to_dict(self) -> dict:
        return {
            "mean_rating": dict(self.mean_rating),
            "shortcomings": {src: dict(freqs) for src, freqs in self.shortcomings.items()},
            "preference": dict(self.preference),
            "counts": dict(self.counts),
            "per_task": {tid: dict(info) for tid, info in self.per_task.items()},
            "quorum": self.quorum,
        }


def _round(value: float | None) -> float | None:
    return None if value is None else round(value, 1)


def aggregate(records, tasks, quorum: int = QUORUM) -> HumanReport:
    """Fold rating records into the study report.

    Only valid records contribute; invalid ones are retained in the counts.
    Preferences are un-blinded through each task's recorded display order.
    Order of records never matters.
    """
    by_task = {task.task_id: task for task in tasks}

    valid_records = []
    invalid = 0
    for record in records:
        task = by_task.get(record.task_id)
        if task is not None and record_valid(record, task):
            valid_records.append((record, task))
        else:
            invalid += 1

    ratings: dict[str, list[Fraction]] = {MODEL: [], GROUND_TRUTH: []}
    shortcoming_counts = {
        source: {s: 0 for s in Shortcoming} for source in (MODEL, GROUND_TRUTH)
    }
    preference_counts = {MODEL: 0, GROUND_TRUTH: 0, "equal": 0}
    per_task_values: dict[str, dict[str, list[float]]] = {
        task.task_id: {MODEL: [], GROUND_TRUTH: []} for task in tasks
    }

    for record, task in valid_records:
        for source in (MODEL, GROUND_TRUTH):
            rating = record.ratings[task.source_position(source)]
            value = rating_value(rating.label)
            ratings[source].append(value)
            per_task_values[task.task_id][source].append(float(value))
            for shortcoming in rating.shortcomings:
                shortcoming_counts[source][shortcoming] += 1
        if record.preference is Preference.EQUAL:
            preference_counts["equal"] += 1
        else:
            position = 0 if record.preference is Preference.PREFER_A else 1
            preference_counts[task.sources[position]] += 1

    def mean_pct(values) -> float | None:
        if not values:
            return None
        return float(sum(values) / len(values)) * 100

    n_valid = len(valid_records)
    mean_rating = {source: _round(mean_pct(ratings[source])) for source in (MODEL, GROUND_TRUTH)}
    shortcomings = {
        source: {
            s.value: _round(100 * count / n_valid) if n_valid else None
            for s, count in shortcoming_counts[source].items()
        }
        for source in (MODEL, GROUND_TRUTH)
    }
    preference = {
        "prefer_model": _round(100 * preference_counts[MODEL] / n_valid) if n_valid else None,
        "no_preference": _round(100 * preference_counts["equal"] / n_valid) if n_valid else None,
        "prefer_ground_truth": _round(100 * preference_counts[GROUND_TRUTH] / n_valid)
        if n_valid
        else None,
    }
    per_task = {
        task_id: {
            "valid_records": len(values[MODEL]),
            "under_quorum": len(values[MODEL]) < quorum,
            # rating multisets, sorted so the report is record-order invariant
            "ratings": {source: sorted(values[source]) for source in (MODEL, GROUND_TRUTH)},
            "mean_rating": {
                source: _round(mean_pct(values[source])) for source in (MODEL, GROUND_TRUTH)
            },
        }
        for task_id, values in per_task_values.items()
    }
    return HumanReport(
        mean_rating=mean_rating,
        shortcomings=shortcomings,
        preference=preference,
        counts={"valid": n_valid, "invalid": invalid, "total": n_valid + invalid},
        per_task=per_task,
        quorum=quorum,
    )


def write_tasks(tasks, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for task in tasks:
            handle.write(json.dumps(task.to_dict(), sort_keys=True) + "\n")


def read_tasks(path) -> list[EvalTask]:
    path = Path(path)
    if not path.is_file():
        raise DataLoadError(f"missing task file: {path}")
    tasks = []
    with path.open("r", encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            try:
                tasks.append(task_from_dict(json.loads(line)))
            except (KeyError, ValueError, TypeError) as exc:
                raise RecordParseError(str(exc), index=index, path=str(path)) from exc
    return tasks


def read_records(path) -> list[RatingRecord]:
    path = Path(path)
    if not path.is_file():
        raise DataLoadError(f"missing record file: {path}")
    records = []
    with path.open("r", encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(record_from_dict(json.loads(line)))
            except ValueError as exc:
                raise RecordParseError(str(exc), index=index, path=str(path)) from exc
    return records
