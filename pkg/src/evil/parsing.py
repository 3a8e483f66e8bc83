"""Decompose raw model generations into (answer, explanation) pairs.

Generations follow the ``<answer> because <explanation>`` convention; the
split happens at the first occurrence of the word ``because`` bounded by
whitespace or string edges.  Parsing is total: anything without the
separator is all answer, and a generation that starts with the separator
yields an empty answer (it can never match a gold answer, so it scores 0
and is surfaced through the report's malformed count).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import DataLoadError, RecordParseError

_SEPARATOR_RE = re.compile(r"(?:^|\s)because(?:\s|$)")

_VCR_ANSWER_RE = re.compile(r"^answer([0-3])$")


@dataclass(frozen=True, slots=True)
class ParsedPrediction:
    """One model generation split into a normalized answer and explanation."""

    sample_id: str
    raw: str
    answer: str
    explanation: str
    vcr_index: int | None = None

    @property
    def malformed(self) -> bool:
        """Nonempty generation that produced no usable answer."""
        return bool(self.raw.strip()) and not self.answer


def normalize_answer(text: str) -> str:
    """Lower-case, collapse whitespace, drop terminal ``.?!,`` punctuation."""
    normalized = " ".join(text.lower().split())
    return normalized.rstrip(".?!,").rstrip()


def vcr_answer_index(answer: str) -> int | None:
    """Index K for an exact ``answerK`` choice token, else None.

    Deliberately strict: ``answer 2`` is not a choice token, and malformed
    choices simply score zero downstream.
    """
    match = _VCR_ANSWER_RE.match(answer)
    return int(match.group(1)) if match else None


def split_prediction(sample_id: str, raw: str) -> ParsedPrediction:
    """Split a generation at the first separator occurrence; never raises."""
    match = _SEPARATOR_RE.search(raw)
    if match:
        answer_part, explanation = raw[: match.start()], raw[match.end() :]
    else:
        answer_part, explanation = raw, ""
    answer = normalize_answer(answer_part)
    return ParsedPrediction(
        sample_id=sample_id,
        raw=raw,
        answer=answer,
        explanation=explanation.strip(),
        vcr_index=vcr_answer_index(answer),
    )


def prediction_to_dict(pred: ParsedPrediction) -> dict:
    return {
        "id": pred.sample_id,
        "raw": pred.raw,
        "answer": pred.answer,
        "explanation": pred.explanation,
        "vcr_index": pred.vcr_index,
    }


def prediction_from_dict(record: dict) -> ParsedPrediction:
    return ParsedPrediction(
        sample_id=str(record["id"]),
        raw=record.get("raw", ""),
        answer=record["answer"],
        explanation=record.get("explanation", ""),
        vcr_index=record.get("vcr_index"),
    )


def read_generations(path) -> list[tuple[str, str]]:
    """Read raw prediction JSON lines of the form {"id": ..., "generation": ...}."""
    path = Path(path)
    if not path.is_file():
        raise DataLoadError(f"missing prediction file: {path}")
    rows = []
    with path.open("r", encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                rows.append((str(record["id"]), str(record["generation"])))
            except (KeyError, ValueError) as exc:
                raise RecordParseError(str(exc), index=index, path=str(path)) from exc
    return rows


def read_parsed(path) -> list[ParsedPrediction]:
    """Read previously parsed predictions (output schema of ``evil parse``)."""
    path = Path(path)
    if not path.is_file():
        raise DataLoadError(f"missing parsed prediction file: {path}")
    preds = []
    with path.open("r", encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                if "answer" in record:
                    preds.append(prediction_from_dict(record))
                else:
                    preds.append(split_prediction(str(record["id"]), str(record["generation"])))
            except (KeyError, ValueError) as exc:
                raise RecordParseError(str(exc), index=index, path=str(path)) from exc
    return preds


def write_parsed(preds, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for pred in preds:
            handle.write(json.dumps(prediction_to_dict(pred), sort_keys=True) + "\n")
