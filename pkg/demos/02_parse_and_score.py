"""Parse raw model generations and score them against gold answers.

Generations follow the "<answer> because <explanation>" convention.
Parsing is total; scoring awards the consensus soft score on VQA-X and
exact-match credit elsewhere.
"""

from evil.parsing import split_prediction
from evil.samples import DatasetId, ImageRef, Sample, Split
from evil.scoring import accuracy, score_sample

gold = Sample(
    id="q1",
    dataset=DatasetId.VQAX,
    split=Split.TEST,
    image=ImageRef("shower.jpg", 640, 480),
    question_or_hypothesis="what is this?",
    gold_answers=(("shower", 8), ("bathroom", 2)),
    gold_explanations=("there is a clear glass door",),
)

generations = [
    "shower because there is a clear glass door",   # consensus answer -> 1
    "bathroom because there is a toilet",           # 2 annotators -> 2/3
    "no because the sky is dark because of clouds", # split at FIRST "because"
    "yes",                                          # no separator: all answer
    "because it just is",                           # malformed: empty answer
]

scores = []
for raw in generations:
    parsed = split_prediction(gold.id, raw)
    score = score_sample(parsed, gold)
    scores.append(score)
    flag = "  [malformed]" if parsed.malformed else ""
    print(f"answer={parsed.answer!r:12} explanation={parsed.explanation!r}{flag}")
    print(f"  -> task score {score}")

print()
print("accuracy over these generations:", accuracy(scores))
