"""Loaders for the third-party dataset release formats.

Each adapter converts one dataset's published annotation files into the
canonical :class:`~evil.samples.Sample` model, after which everything is
dataset-agnostic.  Input formats are documented in docs/DATA.md; the short
version:

* VQA-X ships one JSON object per split mapping question id to a record
  with ``question``, ``answers`` (the per-annotator answer list) and
  ``explanation`` (one or more explanation strings).
* e-SNLI-VE ships one CSV per split with ``Flickr30kID``, ``hypothesis``,
  ``gold_label`` and ``explanation`` columns (extra ``explanation_N``
  columns are picked up when present).
* VCR ships JSON lines with tokenized text in which person/object
  references appear as lists of indices into the record's ``objects``
  list, plus a per-image metadata JSON carrying pixel boxes and the image
  extent.  Because the original test annotations are withheld, split
  identities come from a separate manifest file.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from pathlib import Path

from .errors import DataLoadError, RecordParseError
from .samples import BoundingBox, DatasetId, ImageRef, Sample, Split, validate_sample


def _clean(text: str) -> str:
    return " ".join(str(text).split())


def _read_json(path: Path):
    if not path.is_file():
        raise DataLoadError(f"missing annotation file: {path}")
    with path.open("r", encoding="utf-8") as handle:
        return json.load(handle)


def _image_extent(image_sizes, image_name: str) -> tuple[int, int]:
    if image_sizes and image_name in image_sizes:
        width, height = image_sizes[image_name]
        return int(width), int(height)
    return 0, 0


def vqax_to_samples(annotations_path, split, image_sizes=None) -> list[Sample]:
    """Convert one VQA-X split file.

    Per-annotator answers are folded into (answer, count) pairs ordered by
    descending count so the soft task score stays computable.
    """
    split = Split(split)
    data = _read_json(Path(annotations_path))
    samples = []
    for index, (question_id, record) in enumerate(sorted(data.items())):
        try:
            raw_answers = record["answers"]
            answers = [
                _clean(a["answer"] if isinstance(a, dict) else a).lower() for a in raw_answers
            ]
            counts = Counter(answers)
            # order: most agreed-upon first, first-seen breaking ties
            order = {a: i for i, a in enumerate(dict.fromkeys(answers))}
            gold_answers = tuple(
                (answer, counts[answer])
                for answer in sorted(counts, key=lambda a: (-counts[a], order[a]))
            )
            explanations = record["explanation"]
            if isinstance(explanations, str):
                explanations = [explanations]
            image_name = record.get("image_name") or str(record.get("image_id", ""))
            width, height = _image_extent(image_sizes, image_name)
            sample = Sample(
                id=str(question_id),
                dataset=DatasetId.VQAX,
                split=split,
                image=ImageRef(path=image_name, width=width, height=height),
                question_or_hypothesis=_clean(record["question"]),
                gold_answers=gold_answers,
                gold_explanations=tuple(_clean(e) for e in explanations),
            )
        except (KeyError, TypeError) as exc:
            raise RecordParseError(str(exc), index=index, path=str(annotations_path)) from exc
        validate_sample(sample)
        samples.append(sample)
    return samples


def esnlive_to_samples(csv_path, split, image_sizes=None) -> list[Sample]:
    """Convert one e-SNLI-VE split CSV."""
    split = Split(split)
    path = Path(csv_path)
    if not path.is_file():
        raise DataLoadError(f"missing annotation file: {path}")
    samples = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        for index, row in enumerate(reader):
            try:
                explanations = [row.get("explanation", "")]
                explanations += [
                    row[key] for key in ("explanation_1", "explanation_2", "explanation_3")
                    if row.get(key)
                ]
                explanations = [_clean(e) for e in explanations if _clean(e)]
                image_name = row["Flickr30kID"]
                width, height = _image_extent(image_sizes, image_name)
                sample = Sample(
                    id=row.get("id") or f"esnlive-{split.value}-{index}",
                    dataset=DatasetId.ESNLIVE,
                    split=split,
                    image=ImageRef(path=image_name, width=width, height=height),
                    question_or_hypothesis=_clean(row["hypothesis"]),
                    gold_answers=((row["gold_label"].strip(), 1),),
                    gold_explanations=tuple(explanations),
                )
            except KeyError as exc:
                raise RecordParseError(f"missing column {exc}", index=index, path=str(path)) from exc
            validate_sample(sample)
            samples.append(sample)
    return samples


def _vcr_object_tokens(objects: list[str]) -> list[str]:
    """Number repeated categories: ["person","person","car"] -> person1, person2, car1."""
    seen: Counter[str] = Counter()
    tokens = []
    for category in objects:
        seen[category] += 1
        tokens.append(f"{category}{seen[category]}")
    return tokens


def _vcr_detokenize(mixed_tokens, object_tokens) -> str:
    """Flatten VCR token lists; index references become person/object tokens."""
    words = []
    for token in mixed_tokens:
        if isinstance(token, list):
            words.append(" and ".join(object_tokens[i] for i in token))
        else:
            words.append(str(token))
    return _clean(" ".join(words))


def _load_manifest(manifest_path) -> dict[str, str]:
    data = _read_json(Path(manifest_path))
    if data and all(isinstance(v, list) for v in data.values()):
        return {str(i): split for split, ids in data.items() for i in ids}
    return {str(k): str(v) for k, v in data.items()}


def vcr_to_samples(annotations_path, split, manifest_path, metadata_root=None) -> list[Sample]:
    """Convert VCR JSON-lines annotations for one split.

    ``manifest_path`` assigns each ``annot_id`` to a split; records whose
    manifest split differs from ``split`` are skipped.  ``metadata_root``
    anchors the per-image ``metadata_fn`` files that carry boxes and image
    extents.
    """
    split = Split(split)
    path = Path(annotations_path)
    if not path.is_file():
        raise DataLoadError(f"missing annotation file: {path}")
    manifest = _load_manifest(manifest_path)
    metadata_root = Path(metadata_root) if metadata_root else path.parent

    samples = []
    with path.open("r", encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                annot_id = str(record["annot_id"])
                if manifest.get(annot_id) != split.value:
                    continue
                object_tokens = _vcr_object_tokens(record["objects"])
                metadata = _read_json(metadata_root / record["metadata_fn"])
                width = int(metadata["width"])
                height = int(metadata["height"])
                boxes = {}
                for token, box in zip(object_tokens, metadata["boxes"]):
                    x1, y1, x2, y2 = (float(v) for v in box[:4])
                    boxes[token] = BoundingBox(
                        x1=min(max(x1, 0.0), width),
                        y1=min(max(y1, 0.0), height),
                        x2=min(max(x2, 0.0), width),
                        y2=min(max(y2, 0.0), height),
                        label=token,
                    )
                choices = tuple(
                    _vcr_detokenize(choice, object_tokens)
                    for choice in record["answer_choices"]
                )
                if "rationale" in record:
                    rationale = _vcr_detokenize(record["rationale"], object_tokens)
                else:
                    rationale = _vcr_detokenize(
                        record["rationale_choices"][record["rationale_label"]], object_tokens
                    )
                sample = Sample(
                    id=annot_id,
                    dataset=DatasetId.VCR,
                    split=split,
                    image=ImageRef(path=record.get("img_fn", ""), width=width, height=height),
                    question_or_hypothesis=_vcr_detokenize(record["question"], object_tokens),
                    gold_answers=((f"answer{int(record['answer_label'])}", 1),),
                    gold_explanations=(rationale,),
                    choices=choices,
                    boxes=boxes,
                )
            except DataLoadError:
                raise
            except (KeyError, TypeError, ValueError, IndexError) as exc:
                raise RecordParseError(str(exc), index=index, path=str(path)) from exc
            validate_sample(sample)
            samples.append(sample)
    return samples
