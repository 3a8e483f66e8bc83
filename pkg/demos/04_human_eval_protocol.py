"""The human-evaluation protocol without a server: select, rate, aggregate.

Rating tasks are drawn (seeded) from correctly answered samples, each
showing the model and ground-truth explanations in a blinded random
order.  Simulated annotators answer the task, rate both explanations, and
state a preference; the aggregate un-blinds preferences, screens out
annotators who missed the task answer, and flags under-quorum tasks.
"""

import random

from evil.humaneval import (
    ExplanationRating,
    Preference,
    RatingLabel,
    RatingRecord,
    Shortcoming,
    aggregate,
    select_samples,
)
from evil.parsing import split_prediction
from evil.prompts import build_prompt
from evil.samples import DatasetId, ImageRef, Sample, Split

samples = [
    Sample(
        id=f"e{i}",
        dataset=DatasetId.ESNLIVE,
        split=Split.TEST,
        image=ImageRef(f"img{i}.jpg", 640, 480),
        question_or_hypothesis=hyp,
        gold_answers=((label, 1),),
        gold_explanations=(expl,),
    )
    for i, (hyp, label, expl) in enumerate(
        [
            ("a dog runs", "entailment", "a dog is running fast"),
            ("the man sleeps", "contradiction", "the man is wide awake"),
            ("a woman eats", "neutral", "there is food but nobody eating"),
            ("kids play outside", "entailment", "children play in the yard"),
        ]
    )
]
# the model answers everything correctly here, with its own explanations
parsed = [split_prediction(s.id, build_prompt(s).target) for s in samples]

tasks = select_samples(parsed, samples, n=3, seed=7)
print("selected tasks (blinding stays server-side):")
for task in tasks:
    print(f"  {task.task_id}: sources={task.sources}  correct={task.correct_answer!r}")

rng = random.Random(0)
records = []
for task in tasks:
    for k in range(5):  # five annotators per task = quorum
        annotator = f"annotator-{k}"
        wrong = rng.random() < 0.15  # some annotators misread the task
        answer = "definitely not" if wrong else task.correct_answer
        label = rng.choice(list(RatingLabel))
        shortcomings = (
            frozenset({rng.choice(list(Shortcoming))})
            if label in (RatingLabel.WEAK_NO, RatingLabel.NO)
            else frozenset()
        )
        records.append(
            RatingRecord(
                task_id=task.task_id,
                annotator_id=annotator,
                annotator_task_answer=answer,
                ratings=(
                    ExplanationRating(label, shortcomings),
                    ExplanationRating(RatingLabel.YES),
                ),
                preference=rng.choice(list(Preference)),
            )
        )

report = aggregate(records, tasks)
print()
print("mean rating:", report.mean_rating)
print("preference: ", report.preference)
print("counts:     ", report.counts)
for task_id, info in report.per_task.items():
    quorum = "UNDER QUORUM" if info["under_quorum"] else "ok"
    print(f"  {task_id}: {info['valid_records']} valid records ({quorum})")
