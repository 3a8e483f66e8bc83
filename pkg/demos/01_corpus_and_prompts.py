"""Build a mini corpus, combine the three tasks, and render prompts.

Walks the ingestion path end to end: write canonical JSON-lines files,
load them back with full validation, merge them into the combined
multi-task corpus, and render each sample into its sequence-to-sequence
prompt and training target.
"""

import tempfile
from pathlib import Path

from evil.prompts import build_prompt, strip_bbox_tokens
from evil.samples import (
    BoundingBox,
    DatasetId,
    ImageRef,
    Sample,
    Split,
    build_combined,
    load_dataset,
    stats,
    write_samples,
)

# one sample per dataset, hand-written in the unified model
vqax = Sample(
    id="q1",
    dataset=DatasetId.VQAX,
    split=Split.TEST,
    image=ImageRef("shower.jpg", 640, 480),
    question_or_hypothesis="what is this?",
    gold_answers=(("shower", 8), ("bathroom", 2)),  # (answer, annotator count)
    gold_explanations=("there is a clear glass door",),
)
esnlive = Sample(
    id="e1",
    dataset=DatasetId.ESNLIVE,
    split=Split.TEST,
    image=ImageRef("dog.jpg", 500, 333),
    question_or_hypothesis="a dog runs",
    gold_answers=(("entailment", 1),),
    gold_explanations=("a dog is running fast",),
)
vcr = Sample(
    id="c1",
    dataset=DatasetId.VCR,
    split=Split.TEST,
    image=ImageRef("movie.jpg", 640, 480),
    question_or_hypothesis="why is person1 smiling ?",
    gold_answers=(("answer2", 1),),
    gold_explanations=("person1 just got a gift",),
    choices=("he is sad", "he lost", "person1 is happy", "no reason"),
    boxes={"person1": BoundingBox(320, 240, 640, 480, "person1")},
)

root = Path(tempfile.mkdtemp()) / "corpus"
write_samples([vqax], root / "vqax" / "test.jsonl")
write_samples([esnlive], root / "esnlive" / "test.jsonl")
write_samples([vcr], root / "vcr" / "test.jsonl")

# loading validates every invariant and sorts by id
parts = [load_dataset(d, Split.TEST, root) for d in DatasetId]
combined = build_combined(parts)
print("combined stats:", stats(combined).to_dict())
print("namespaced ids:", [s.id for s in combined])

print()
for sample in (vqax, esnlive, vcr):
    rendered = build_prompt(sample)
    print(f"[{sample.dataset.value}] prompt: {rendered.prompt}")
    print(f"{'':>9} target: {rendered.target}")

# the VCR prompt carries coordinate tokens; stripping restores plain text
vcr_prompt = build_prompt(vcr).prompt
print()
print("stripped VCR prompt:", strip_bbox_tokens(vcr_prompt))
