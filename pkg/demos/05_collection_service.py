"""Run the annotation collection service and drive a client session.

Starts the HTTP service on an ephemeral port with an append-only record
log, then plays one annotator session over the wire: lease a task, submit
a rating, watch conflicts on double submission, and read the live report.
Restarting the store on the same log reconstructs the state exactly.
"""

import json
import tempfile
import threading
import urllib.error
import urllib.request
from pathlib import Path

from evil.humaneval import select_samples
from evil.parsing import split_prediction
from evil.prompts import build_prompt
from evil.samples import DatasetId, ImageRef, Sample, Split
from evil.service import CollectionStore, make_server

samples = [
    Sample(
        id=f"e{i}",
        dataset=DatasetId.ESNLIVE,
        split=Split.TEST,
        image=ImageRef(f"img{i}.jpg", 640, 480),
        question_or_hypothesis=f"hypothesis number {i}",
        gold_answers=(("entailment", 1),),
        gold_explanations=(f"explanation number {i}",),
    )
    for i in range(3)
]
parsed = [split_prediction(s.id, build_prompt(s).target) for s in samples]
tasks = select_samples(parsed, samples, n=3, seed=1)

log_path = Path(tempfile.mkdtemp()) / "records.jsonl"
store = CollectionStore(tasks, log_path=log_path, annotators={"demo-token": "annotator-1"})
server = make_server(store, port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{server.server_address[1]}"
print("service listening at", base)


def call(method, path, payload=None):
    request = urllib.request.Request(base + path, method=method)
    request.add_header("X-Annotator-Token", "demo-token")
    if payload is not None:
        request.data = json.dumps(payload).encode()
        request.add_header("Content-Type", "application/json")
    try:
        with urllib.request.urlopen(request) as response:
            body = response.read()
            return response.status, json.loads(body) if body else None
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read() or b"null")


status, task = call("GET", "/api/tasks/next")
print(f"GET /api/tasks/next -> {status}; task {task['task_id']} (sources hidden)")

rating = {
    "task_id": task["task_id"],
    "annotator_id": "annotator-1",
    "annotator_task_answer": "yes",
    "ratings": [
        {"label": "yes", "shortcomings": []},
        {"label": "weak_no", "shortcomings": ["insufficient_justification"]},
    ],
    "preference": "prefer_a",
}
print("POST /api/ratings ->", call("POST", "/api/ratings", rating)[0])
print("POST same rating  ->", call("POST", "/api/ratings", rating)[0], "(duplicate conflict)")

status, report = call("GET", "/api/report")
print("GET /api/report   ->", status)
print("  counts:", report["counts"])

server.shutdown()
store.close()

# crash-restart: the log alone reconstructs the assignment state
reopened = CollectionStore(tasks, log_path=log_path, annotators={"demo-token": "annotator-1"})
print()
print("after restart:", len(reopened.records), "record(s) replayed from", log_path.name)
print("report matches:", reopened.report().to_dict()["counts"] == report["counts"])
reopened.close()
