"""Automatic explanation metrics in the three reporting modes.

The same prediction set is evaluated unfiltered (all samples), filtered
(only correctly answered samples), and scaled (each sample's metric
weighted by its task score).  At 100% accuracy the three modes coincide;
with mistakes present, filtered >= unfiltered >= scaled is the typical
picture.
"""

from evil.metrics import Mode, evaluate, format_table
from evil.parsing import split_prediction
from evil.samples import DatasetId, ImageRef, Sample, Split


def esnlive_sample(sid, hypothesis, label, explanation):
    return Sample(
        id=sid,
        dataset=DatasetId.ESNLIVE,
        split=Split.TEST,
        image=ImageRef(f"{sid}.jpg", 640, 480),
        question_or_hypothesis=hypothesis,
        gold_answers=((label, 1),),
        gold_explanations=(explanation,),
    )


samples = [
    esnlive_sample("e1", "a dog runs", "entailment", "a dog is running fast"),
    esnlive_sample("e2", "the man sleeps", "contradiction", "the man is wide awake"),
    esnlive_sample("e3", "a woman eats", "neutral", "a woman sits at a table"),
    esnlive_sample("e4", "kids play outside", "entailment", "children play in the yard"),
]

# e1, e2 answered correctly; e3, e4 wrong (their explanations still overlap)
generations = [
    ("e1", "yes because a dog is running fast"),
    ("e2", "no because the man is wide awake and reading"),
    ("e3", "yes because a woman sits at a table"),
    ("e4", "no because children play in the the yard"),
]
parsed = [split_prediction(sid, raw) for sid, raw in generations]

for mode in Mode:
    report = evaluate(parsed, samples, mode)
    print(format_table(report))
    print()

# machine-readable form of the same report
print(evaluate(parsed, samples, Mode.FILTERED).to_dict())
