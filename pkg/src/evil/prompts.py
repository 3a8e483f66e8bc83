"""Prompt and training-target rendering for the sequence-to-sequence setup.

Task reformulations:

* VQA-X questions are used verbatim.
* e-SNLI-VE hypotheses are wrapped into the fixed surface form
  ``does the image describe " <hypothesis> "?`` and the entailment label is
  mapped onto the answer words yes / maybe / no.
* VCR prompts append the four choices as ``answerK: <text>`` to the
  question, with person/object references expanded into the coordinate
  token notation ``<bin_K>`` (image coordinates quantized into 1000 bins
  per axis, top-left then bottom-right corner).

Targets render the gold answer, the literal separator word ``because``, and
the first gold explanation.  The exact surface forms here are locked by
golden files under tests/golden/prompts/; change them deliberately.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ContractError, CoordinateRangeError, ValidationError
from .samples import BoundingBox, DatasetId, Sample

N_BINS = 1000

SEPARATOR = " because "

_LABEL_TO_WORD = {"entailment": "yes", "neutral": "maybe", "contradiction": "no"}
_WORD_TO_LABEL = {word: label for label, word in _LABEL_TO_WORD.items()}

# One coordinate token; runs of these are what stripping removes.
BIN_TOKEN_RE = re.compile(r"(?:<bin_\d{1,3}>)+")

# Person/object references in normalized VCR text look like "person3".
_REFERENCE_RE = re.compile(r"^[A-Za-z]+\d+$")


@dataclass(frozen=True, slots=True)
class PromptText:
    """Rendered model input plus its training target."""

    prompt: str
    target: str


def quantize_coord(value: float, extent: float) -> int:
    """Quantize a pixel coordinate into one of 1000 bins.

    bin = floor(value / extent * 1000), with the bin clamped to 999 so the
    extent itself stays representable.
    """
    if extent <= 0:
        raise CoordinateRangeError(f"extent must be positive, got {extent}")
    if not 0 <= value <= extent:
        raise CoordinateRangeError(f"coordinate {value} outside [0, {extent}]")
    return min(int(value / extent * N_BINS), N_BINS - 1)


def dequantize_coord(bin_index: int, extent: float) -> float:
    """Midpoint of a bin in pixel units (round-trip error <= extent/1000)."""
    if not 0 <= bin_index < N_BINS:
        raise CoordinateRangeError(f"bin {bin_index} outside [0, {N_BINS - 1}]")
    return (bin_index + 0.5) / N_BINS * extent


def bbox_to_tokens(box: BoundingBox, width: float, height: float) -> str:
    """Encode a box as ``<bin_x1><bin_y1><bin_x2><bin_y2>``."""
    if box.x2 < box.x1 or box.y2 < box.y1:
        raise CoordinateRangeError(
            f"box corners out of order: ({box.x1},{box.y1}) vs ({box.x2},{box.y2})"
        )
    bins = (
        quantize_coord(box.x1, width),
        quantize_coord(box.y1, height),
        quantize_coord(box.x2, width),
        quantize_coord(box.y2, height),
    )
    return "".join(f"<bin_{b}>" for b in bins)


def strip_bbox_tokens(text: str) -> str:
    """Delete every run of coordinate tokens, collapsing the spaces left behind.

    Applied to both generated and ground-truth explanations before any
    metric computation; text without coordinate tokens passes through
    unchanged, and the operation is idempotent.
    """
    stripped = BIN_TOKEN_RE.sub("", text)
    if stripped == text:
        return text
    return re.sub(r"  +", " ", stripped)


def map_entailment_label(label: str) -> str:
    """entailment -> yes, neutral -> maybe, contradiction -> no."""
    try:
        return _LABEL_TO_WORD[label]
    except KeyError:
        raise ContractError(f"unknown entailment label: {label!r}") from None


def answer_word_to_label(word: str) -> str:
    """Inverse of :func:`map_entailment_label`."""
    try:
        return _WORD_TO_LABEL[word]
    except KeyError:
        raise ContractError(f"unknown answer word: {word!r}") from None


def _expand_references(text: str, sample: Sample) -> str:
    """Attach coordinate tokens to person/object references in VCR text."""
    words = []
    for word in text.split(" "):
        if word in sample.boxes:
            tokens = bbox_to_tokens(sample.boxes[word], sample.image.width, sample.image.height)
            words.append(word + tokens)
        elif _REFERENCE_RE.match(word):
            raise ValidationError(f"sample {sample.id!r}: no box for referenced token {word!r}")
        else:
            words.append(word)
    return " ".join(words)


def _target_answer(sample: Sample) -> str:
    if sample.dataset is DatasetId.ESNLIVE:
        return map_entailment_label(sample.gold_label)
    if sample.dataset is DatasetId.VCR:
        return sample.gold_label
    return sample.consensus_answer


def build_prompt(sample: Sample) -> PromptText:
    """Render one sample into its prompt and training target."""
    if sample.dataset is DatasetId.VQAX:
        prompt = sample.question_or_hypothesis
    elif sample.dataset is DatasetId.ESNLIVE:
        prompt = f'does the image describe " {sample.question_or_hypothesis} "?'
    elif sample.dataset is DatasetId.VCR:
        question = _expand_references(sample.question_or_hypothesis, sample)
        choices = "".join(
            f" answer{k}: {_expand_references(choice, sample)}"
            for k, choice in enumerate(sample.choices or ())
        )
        prompt = question + choices
    else:  # pragma: no cover - closed enumeration
        raise ContractError(f"unknown dataset: {sample.dataset}")

    target = _target_answer(sample) + SEPARATOR + sample.gold_explanations[0]
    return PromptText(prompt=prompt, target=target)
