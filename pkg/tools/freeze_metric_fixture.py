#!/usr/bin/env python3
"""Generate the frozen metric fixtures under tests/data/.

Run once (and only rerun deliberately): builds a deterministic corpus of
(candidate, multi-reference) text pairs, computes expected metric values
with the independent oracles in tests/oracles.py, and freezes both.  Also
freezes the golden three-mode report for the six-sample mixed fixture.

With --check, also compares the package implementation against the oracle
values and prints the largest absolute differences.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from evil.metrics.report import SPICE_NOTE  # noqa: E402
from evil.metrics.text import tokenize  # noqa: E402
from evil.parsing import split_prediction  # noqa: E402
from evil.prompts import strip_bbox_tokens  # noqa: E402

import corpus_fixtures  # noqa: E402
import oracles  # noqa: E402

DATA_DIR = ROOT / "tests" / "data"

NOUNS = [
    "dog", "cat", "man", "woman", "car", "bus", "giraffe", "kitchen", "door",
    "horse", "player", "plate", "shirt", "mouse", "banana", "table", "room",
    "street", "sky", "water", "tree", "child", "boat", "train", "window",
]
VERBS = [
    ("run", "runs", "running"), ("eat", "eats", "eating"), ("sit", "sits", "sitting"),
    ("jump", "jumps", "jumping"), ("hold", "holds", "holding"), ("wear", "wears", "wearing"),
    ("look", "looks", "looking"), ("stand", "stands", "standing"),
    ("play", "plays", "playing"), ("walk", "walks", "walking"),
]
ADJECTIVES = [
    "red", "blue", "big", "small", "young", "old", "happy", "dark", "bright",
    "clean", "dirty", "long", "short", "tall", "wet",
]
PREPOSITIONS = ["on", "near", "behind", "under", "beside", "inside"]
TAILS = ["", " today", " outside", " right now", " in the picture"]
OFF_TOPIC = [
    "quantum flux oscillates rapidly beyond measure",
    "seventeen zeppelins drift across violet horizons",
    "ancient marble statues crumble beneath forgotten temples",
]


def _base_sentence(rng: random.Random) -> str:
    noun, noun2 = rng.sample(NOUNS, 2)
    verb = rng.choice(VERBS)
    adj = rng.choice(ADJECTIVES)
    prep = rng.choice(PREPOSITIONS)
    template = rng.randrange(4)
    if template == 0:
        text = f"the {adj} {noun} is {verb[2]} {prep} the {noun2}"
    elif template == 1:
        text = f"a {noun} {verb[1]} {prep} a {adj} {noun2}"
    elif template == 2:
        text = f"there is a {adj} {noun} {prep} the {noun2}"
    else:
        text = f"the {noun} and the {noun2} are {verb[2]}"
    return text + rng.choice(TAILS)


def _perturb(sentence: str, rng: random.Random) -> str:
    words = sentence.split()
    kind = rng.randrange(5)
    if kind == 0 and len(words) > 3:  # substitute a content word
        i = rng.randrange(len(words))
        words[i] = rng.choice(NOUNS + ADJECTIVES)
    elif kind == 1 and len(words) > 4:  # delete
        del words[rng.randrange(len(words))]
    elif kind == 2:  # insert an adjective
        words.insert(rng.randrange(len(words)), rng.choice(ADJECTIVES))
    elif kind == 3:  # change verb form (exercises the stem stage)
        for i, w in enumerate(words):
            for forms in VERBS:
                if w in forms:
                    words[i] = rng.choice([f for f in forms if f != w])
                    break
    # kind == 4: leave unchanged
    return " ".join(words)


def generate_pairs(count: int = 120, seed: int = 7711) -> list[dict]:
    rng = random.Random(seed)
    pairs = []
    for index in range(count):
        base = _base_sentence(rng)
        n_refs = rng.choice([1, 2, 2, 3])
        references = [base if i == 0 else _perturb(base, rng) for i in range(n_refs)]
        roll = rng.random()
        if roll < 0.15:
            candidate = references[0]
        elif roll < 0.90:
            candidate = _perturb(_perturb(base, rng), rng)
        else:
            candidate = rng.choice(OFF_TOPIC)
        if rng.random() < 0.3:
            candidate += " ."
        pairs.append(
            {"id": f"pair-{index:04d}", "candidate": candidate, "references": references}
        )
    return pairs


def oracle_corpus_values(token_pairs) -> dict:
    corpus_bleu, _ = oracles.oracle_bleu(token_pairs)
    cider_scores, cider_mean = oracles.oracle_cider(token_pairs)
    rouge_scores = [oracles.oracle_rouge(c, r) for c, r in token_pairs]
    meteor_scores = [oracles.oracle_meteor(c, r) for c, r in token_pairs]
    return {
        "bleu_1": corpus_bleu[0],
        "bleu_2": corpus_bleu[1],
        "bleu_3": corpus_bleu[2],
        "bleu_4": corpus_bleu[3],
        "rouge_l": sum(rouge_scores) / len(rouge_scores),
        "meteor": sum(meteor_scores) / len(meteor_scores),
        "cider_d": cider_mean,
    }


def freeze_metric_fixture(check: bool) -> None:
    pairs = generate_pairs()
    fixture_path = DATA_DIR / "metric_fixture.jsonl"
    with fixture_path.open("w", encoding="utf-8") as handle:
        for pair in pairs:
            handle.write(json.dumps(pair, sort_keys=True) + "\n")

    token_pairs = [
        (tokenize(p["candidate"]), [tokenize(r) for r in p["references"]]) for p in pairs
    ]
    started = time.perf_counter()
    expected = oracle_corpus_values(token_pairs)
    oracle_seconds = time.perf_counter() - started
    expected_payload = {
        "pairs": len(pairs),
        "tokenizer": "evil.metrics.text.tokenize",
        "values": expected,
    }
    (DATA_DIR / "metric_fixture_expected.json").write_text(
        json.dumps(expected_payload, indent=2) + "\n", encoding="utf-8"
    )
    print(f"froze {len(pairs)} pairs; oracle time {oracle_seconds:.3f}s")
    for key, value in expected.items():
        print(f"  {key:8s} {value:.6f}")

    if check:
        from evil.metrics import bleu_corpus, cider_d, meteor_corpus, rouge_l_corpus

        mine = {}
        b = bleu_corpus(token_pairs)
        mine.update({"bleu_1": b[0], "bleu_2": b[1], "bleu_3": b[2], "bleu_4": b[3]})
        mine["rouge_l"] = rouge_l_corpus(token_pairs)
        mine["meteor"] = meteor_corpus(token_pairs)
        mine["cider_d"] = cider_d(token_pairs)[1]
        worst = max(abs(mine[k] - expected[k]) for k in expected)
        print(f"package vs oracle, max |diff| = {worst:.3e}")
        for key in expected:
            diff = abs(mine[key] - expected[key])
            flag = "" if diff <= 1e-4 else "  <-- EXCEEDS 1e-4"
            print(f"  {key:8s} mine={mine[key]:.8f} oracle={expected[key]:.8f}{flag}")


def _mode_report(mode, metrics, counts, accuracy) -> dict:
    return {
        "mode": mode,
        "metrics": {k: (round(v, 4) if v is not None else None) for k, v in metrics.items()},
        "unavailable": {
            "spice": SPICE_NOTE,
            "bert_score": "no embedding provider configured",
        },
        "accuracy": accuracy,
        "counts": counts,
    }


def freeze_golden_mixed_report() -> None:
    samples, generations = corpus_fixtures.mixed_eval_fixture()
    scores = list(corpus_fixtures.MIXED_TASK_SCORES)
    parsed = [split_prediction(sid, raw) for sid, raw in generations]

    candidates = [tokenize(strip_bbox_tokens(p.explanation)) for p in parsed]
    references = [
        [tokenize(strip_bbox_tokens(t)) for t in s.gold_explanations] for s in samples
    ]
    token_pairs = list(zip(candidates, references))

    cooked = oracles.oracle_bleu_cooked_stats(token_pairs)
    df, ndocs = oracles.oracle_cider_doc_freq(references)
    cider_scores, _ = oracles.oracle_cider(token_pairs, document_frequency=df, num_docs=ndocs)
    rouge_scores = [oracles.oracle_rouge(c, r) for c, r in token_pairs]
    meteor_scores = [oracles.oracle_meteor(c, r) for c, r in token_pairs]

    def mean(values):
        values = list(values)
        return sum(values) / len(values)

    accuracy = round(100 * mean(scores), 1)
    total = len(samples)
    malformed = sum(1 for p in parsed if p.malformed)
    keep = [i for i, s in enumerate(scores) if s > 0]

    def pack(bleu_values, rl, mt, cd):
        return {
            "bleu_1": bleu_values[0] * 100,
            "bleu_2": bleu_values[1] * 100,
            "bleu_3": bleu_values[2] * 100,
            "bleu_4": bleu_values[3] * 100,
            "rouge_l": rl * 100,
            "meteor": mt * 100,
            "cider_d": cd * 100,
        }

    filtered_bleu, _ = oracles.oracle_bleu_from_cooked([cooked[i] for i in keep])
    filtered = pack(
        filtered_bleu,
        mean(rouge_scores[i] for i in keep),
        mean(meteor_scores[i] for i in keep),
        mean(cider_scores[i] for i in keep),
    )
    unfiltered_bleu, _ = oracles.oracle_bleu_from_cooked(cooked)
    unfiltered = pack(unfiltered_bleu, mean(rouge_scores), mean(meteor_scores), mean(cider_scores))
    scaled_bleu, _ = oracles.oracle_bleu_from_cooked(cooked, weights=scores)
    scaled = pack(
        scaled_bleu,
        mean(v * s for v, s in zip(rouge_scores, scores)),
        mean(v * s for v, s in zip(meteor_scores, scores)),
        mean(v * s for v, s in zip(cider_scores, scores)),
    )

    golden = {
        "filtered": _mode_report(
            "filtered",
            filtered,
            {"total": total, "evaluated": len(keep), "excluded": total - len(keep), "malformed": malformed},
            accuracy,
        ),
        "unfiltered": _mode_report(
            "unfiltered",
            unfiltered,
            {"total": total, "evaluated": total, "excluded": 0, "malformed": malformed},
            accuracy,
        ),
        "scaled": _mode_report(
            "scaled",
            scaled,
            {"total": total, "evaluated": total, "excluded": 0, "malformed": malformed},
            accuracy,
        ),
    }
    (DATA_DIR / "golden_mixed_report.json").write_text(
        json.dumps(golden, indent=2) + "\n", encoding="utf-8"
    )
    print("froze golden mixed report")
    for mode in golden:
        print(f"  {mode}: " + ", ".join(f"{k}={v:.2f}" for k, v in golden[mode]["metrics"].items()))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--check", action="store_true", help="diff package vs oracle values")
    args = parser.parse_args()
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    freeze_metric_fixture(args.check)
    freeze_golden_mixed_report()


if __name__ == "__main__":
    main()
