"""`evil` command line: one thin subcommand per pipeline stage.

Exit codes: 0 success, 1 validation/contract problems (including usage),
2 I/O problems.  Data goes to stdout or ``--out``; diagnostics go to
stderr.  Every subcommand is a composition of module operations; no
business logic lives here.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import humaneval, metrics, parsing, samples, scoring, service
from .errors import DataLoadError, EvilError
from .prompts import build_prompt
from .samples import DatasetId, Split


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _emit(args, payload: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(payload if payload.endswith("\n") else payload + "\n")
    else:
        sys.stdout.write(payload if payload.endswith("\n") else payload + "\n")


def _load_requested(dataset: str, split: str, root) -> list[samples.Sample]:
    split = Split(split)
    if dataset == "combined":
        parts = [samples.load_dataset(d, split, root) for d in DatasetId]
        return samples.build_combined(parts)
    return samples.load_dataset(DatasetId(dataset), split, root)


def _cmd_corpus_stats(args) -> int:
    loaded = _load_requested(args.dataset, args.split, args.root)
    result = samples.stats(loaded)
    if args.pretty:
        lines = [f"{d.value:>8}: {n}" for d, n in result.counts]
        lines.append(f"{'total':>8}: {result.total}")
        _emit(args, "\n".join(lines))
    else:
        _emit(args, json.dumps(result.to_dict(), indent=2))
    return 0


def _cmd_prompts_build(args) -> int:
    loaded = _load_requested(args.dataset, args.split, args.root)
    lines = []
    for sample in loaded:
        rendered = build_prompt(sample)
        lines.append(
            json.dumps(
                {"id": sample.id, "prompt": rendered.prompt, "target": rendered.target},
                sort_keys=True,
            )
        )
    _emit(args, "\n".join(lines))
    return 0


def _cmd_parse(args) -> int:
    rows = parsing.read_generations(args.infile)
    preds = [parsing.split_prediction(sample_id, raw) for sample_id, raw in rows]
    lines = [json.dumps(parsing.prediction_to_dict(p), sort_keys=True) for p in preds]
    _emit(args, "\n".join(lines))
    return 0


def _cmd_score(args) -> int:
    preds = parsing.read_parsed(args.preds)
    gold = samples.read_samples(args.gold)
    joined = metrics.join_predictions(preds, gold)
    scores = [scoring.score_sample(pred, sample) for pred, sample in joined]
    if args.threshold:
        scores = [1 if s > 0 else 0 for s in scores]
    accuracy = scoring.accuracy(scores)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            for (pred, _), score in zip(joined, scores):
                handle.write(
                    json.dumps({"id": pred.sample_id, "score": float(score)}) + "\n"
                )
    sys.stdout.write(json.dumps({"accuracy": accuracy, "count": len(scores)}) + "\n")
    return 0


def _cmd_metrics(args) -> int:
    preds = parsing.read_parsed(args.preds)
    gold = samples.read_samples(args.gold)
    provider = metrics.make_provider(args.bertscore_provider) if args.bertscore_provider else None
    report = metrics.evaluate(preds, gold, args.mode, bertscore_provider=provider)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(json.dumps(report.to_dict(), indent=2) + "\n")
    if args.pretty:
        sys.stdout.write(metrics.format_table(report) + "\n")
    else:
        sys.stdout.write(json.dumps(report.to_dict(), indent=2) + "\n")
    return 0


def _cmd_humaneval_select(args) -> int:
    preds = parsing.read_parsed(args.preds)
    gold = samples.read_samples(args.gold)
    tasks = humaneval.select_samples(preds, gold, args.count, args.seed)
    lines = [json.dumps(task.to_dict(), sort_keys=True) for task in tasks]
    _emit(args, "\n".join(lines))
    return 0


def _cmd_humaneval_aggregate(args) -> int:
    records = humaneval.read_records(args.records)
    tasks = humaneval.read_tasks(args.tasks)
    report = humaneval.aggregate(records, tasks)
    payload = report.to_dict()
    if args.pretty:
        lines = [
            "mean rating:       "
            + "  ".join(f"{k}={v}" for k, v in payload["mean_rating"].items()),
            "preference:        "
            + "  ".join(f"{k}={v}" for k, v in payload["preference"].items()),
            f"records:           {payload['counts']['valid']} valid, "
            f"{payload['counts']['invalid']} invalid",
            "under quorum:      "
            + (
                ", ".join(
                    tid for tid, info in payload["per_task"].items() if info["under_quorum"]
                )
                or "none"
            ),
        ]
        _emit(args, "\n".join(lines))
    else:
        _emit(args, json.dumps(payload, indent=2))
    return 0


def _cmd_serve(args) -> int:
    tasks = humaneval.read_tasks(args.tasks)
    annotators = service.load_annotators(args.annotators)
    store = service.CollectionStore(
        tasks,
        log_path=args.records,
        annotators=annotators,
        lease_seconds=args.lease_minutes * 60,
    )
    server = service.make_server(
        store, host=args.host, port=args.port, image_dir=args.images, static_dir=args.ui
    )
    sys.stderr.write(f"listening on http://{args.host}:{server.server_address[1]}\n")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        store.close()
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="evil", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    datasets = [d.value for d in DatasetId] + ["combined"]
    splits = [s.value for s in Split]

    corpus = sub.add_parser("corpus", help="dataset ingestion and statistics")
    corpus_sub = corpus.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    corpus_stats = corpus_sub.add_parser("stats", help="per-dataset sample counts")
    corpus_stats.add_argument("--dataset", required=True, choices=datasets)
    corpus_stats.add_argument("--split", required=True, choices=splits)
    corpus_stats.add_argument("--root", required=True)
    corpus_stats.add_argument("--pretty", action="store_true")
    corpus_stats.add_argument("--out")
    corpus_stats.set_defaults(func=_cmd_corpus_stats)

    prompts = sub.add_parser("prompts", help="prompt/target rendering")
    prompts_sub = prompts.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    prompts_build = prompts_sub.add_parser("build", help="emit {id, prompt, target} JSON lines")
    prompts_build.add_argument("--dataset", required=True, choices=datasets)
    prompts_build.add_argument("--split", required=True, choices=splits)
    prompts_build.add_argument("--root", required=True)
    prompts_build.add_argument("--out")
    prompts_build.set_defaults(func=_cmd_prompts_build)

    parse = sub.add_parser("parse", help="split generations into answer + explanation")
    parse.add_argument("--in", dest="infile", required=True)
    parse.add_argument("--out")
    parse.set_defaults(func=_cmd_parse)

    score = sub.add_parser("score", help="task accuracy over parsed predictions")
    score.add_argument("--preds", required=True)
    score.add_argument("--gold", required=True)
    score.add_argument("--out", help="write per-sample scores as JSON lines")
    score.add_argument(
        "--threshold",
        action="store_true",
        help="count soft scores as correct/incorrect instead of averaging them",
    )
    score.set_defaults(func=_cmd_score)

    metrics_cmd = sub.add_parser("metrics", help="automatic explanation metrics")
    metrics_cmd.add_argument("--preds", required=True)
    metrics_cmd.add_argument("--gold", required=True)
    metrics_cmd.add_argument(
        "--mode", required=True, choices=[m.value for m in metrics.Mode]
    )
    metrics_cmd.add_argument("--bertscore-provider", help="embedding endpoint URL or sidecar file")
    metrics_cmd.add_argument("--pretty", action="store_true")
    metrics_cmd.add_argument("--out")
    metrics_cmd.set_defaults(func=_cmd_metrics)

    he = sub.add_parser("humaneval", help="human-evaluation protocol")
    he_sub = he.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    he_select = he_sub.add_parser("select", help="draw blinded rating tasks")
    he_select.add_argument("--preds", required=True)
    he_select.add_argument("--gold", required=True)
    he_select.add_argument("-n", "--count", type=int, default=300)
    he_select.add_argument("--seed", type=int, default=0)
    he_select.add_argument("--out")
    he_select.set_defaults(func=_cmd_humaneval_select)
    he_aggregate = he_sub.add_parser("aggregate", help="aggregate stored rating records")
    he_aggregate.add_argument("--records", required=True)
    he_aggregate.add_argument("--tasks", required=True)
    he_aggregate.add_argument("--pretty", action="store_true")
    he_aggregate.add_argument("--out")
    he_aggregate.set_defaults(func=_cmd_humaneval_aggregate)

    serve = sub.add_parser("serve", help="run the annotation collection service")
    serve.add_argument("--tasks", required=True)
    serve.add_argument("--records", required=True, help="append-only record log path")
    serve.add_argument("--annotators", required=True, help="annotator token file (JSON)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--lease-minutes", type=float, default=30.0)
    serve.add_argument("--images", help="directory served under /images/")
    serve.add_argument("--ui", help="static frontend directory served at /")
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except (DataLoadError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        sys.stderr.write(f"evil: {exc}\n")
        return 2
    except EvilError as exc:
        sys.stderr.write(f"evil: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
