import json
import threading
import urllib.error
import urllib.request

import pytest

from evil.errors import AuthorizationError, ConflictError, ValidationError
from evil.humaneval import (
    GROUND_TRUTH,
    MODEL,
    ExplanationRating,
    Preference,
    RatingLabel,
    RatingRecord,
    Shortcoming,
    aggregate,
)
from evil.service import CollectionStore, load_annotators, make_server

from test_humaneval import _record, _task


ANNOTATORS = {f"token-{i}": f"a{i}" for i in range(1, 7)}


def _tasks(n=3):
    sources = [(MODEL, GROUND_TRUTH), (GROUND_TRUTH, MODEL)]
    return [_task(f"t{i}", sources[i % 2], "yes") for i in range(n)]


def _store(tmp_path, tasks=None, annotators=None, lease_seconds=1800, clock=None):
    kwargs = {"clock": clock} if clock else {}
    return CollectionStore(
        tasks if tasks is not None else _tasks(),
        log_path=tmp_path / "records.jsonl",
        annotators=annotators or ANNOTATORS,
        lease_seconds=lease_seconds,
        **kwargs,
    )


def _yes_record(task, annotator, answer="yes"):
    return _record(
        task, annotator, answer,
        ExplanationRating(RatingLabel.YES), ExplanationRating(RatingLabel.WEAK_YES), MODEL,
        timestamp="2024-06-01T00:00:00+00:00",
    )


class TestAssignment:
    def test_fresh_store_ties_break_by_task_id(self, tmp_path):
        store = _store(tmp_path)
        task = store.assign_task("a1")
        assert task.task_id == "t0"

    def test_least_covered_task_wins(self, tmp_path):
        store = _store(tmp_path)
        assert store.assign_task("a1").task_id == "t0"
        assert store.assign_task("a2").task_id == "t1"  # t0 now leased once
        assert store.assign_task("a3").task_id == "t2"
        assert store.assign_task("a4").task_id == "t0"

    def test_two_annotators_share_a_single_task(self, tmp_path):
        store = _store(tmp_path, tasks=_tasks(1))
        assert store.assign_task("a1").task_id == "t0"
        assert store.assign_task("a2").task_id == "t0"

    def test_annotator_never_reassigned_a_leased_task(self, tmp_path):
        store = _store(tmp_path, tasks=_tasks(2))
        first = store.assign_task("a1")
        second = store.assign_task("a1")
        assert {first.task_id, second.task_id} == {"t0", "t1"}
        assert store.assign_task("a1") is None

    def test_exhausted_after_submitting_everything(self, tmp_path):
        store = _store(tmp_path, tasks=_tasks(2))
        for _ in range(2):
            task = store.assign_task("a1")
            store.submit(_yes_record(task, "a1"))
        assert store.assign_task("a1") is None

    def test_unknown_annotator_rejected(self, tmp_path):
        store = _store(tmp_path)
        with pytest.raises(AuthorizationError):
            store.assign_task("stranger")

    def test_lease_expiry_frees_the_task(self, tmp_path):
        now = [1000.0]
        store = _store(tmp_path, tasks=_tasks(1), lease_seconds=60, clock=lambda: now[0])
        assert store.assign_task("a1").task_id == "t0"
        assert store.assign_task("a1") is None
        now[0] += 61
        assert store.assign_task("a1").task_id == "t0"


class TestSubmit:
    def test_happy_path_grows_store(self, tmp_path):
        store = _store(tmp_path)
        task = store.assign_task("a1")
        valid = store.submit(_yes_record(task, "a1"))
        assert valid is True
        assert len(store.records) == 1

    def test_submit_without_lease_conflicts(self, tmp_path):
        store = _store(tmp_path)
        with pytest.raises(ConflictError, match="lease"):
            store.submit(_yes_record(store.tasks[0], "a1"))

    def test_duplicate_submission_conflicts(self, tmp_path):
        store = _store(tmp_path)
        task = store.assign_task("a1")
        store.submit(_yes_record(task, "a1"))
        store.assign_task("a1")  # next task; no lease on the submitted one
        with pytest.raises(ConflictError, match="already submitted"):
            store.submit(_yes_record(task, "a1"))

    def test_expired_lease_conflicts(self, tmp_path):
        now = [0.0]
        store = _store(tmp_path, lease_seconds=30, clock=lambda: now[0])
        task = store.assign_task("a1")
        now[0] += 31
        with pytest.raises(ConflictError):
            store.submit(_yes_record(task, "a1"))

    def test_shortcoming_invariant_enforced(self, tmp_path):
        store = _store(tmp_path)
        task = store.assign_task("a1")
        bad = RatingRecord(
            task_id=task.task_id,
            annotator_id="a1",
            annotator_task_answer="yes",
            ratings=(
                ExplanationRating(RatingLabel.WEAK_NO),  # no shortcoming named
                ExplanationRating(RatingLabel.YES),
            ),
            preference=Preference.EQUAL,
        )
        with pytest.raises(ValidationError, match="shortcomings"):
            store.submit(bad)
        assert store.records == []

    def test_unknown_task_is_validation_error(self, tmp_path):
        store = _store(tmp_path)
        record = _yes_record(_task("ghost", (MODEL, GROUND_TRUTH), "yes"), "a1")
        with pytest.raises(ValidationError, match="ghost"):
            store.submit(record)

    def test_invalid_answer_still_stored(self, tmp_path):
        store = _store(tmp_path)
        task = store.assign_task("a1")
        valid = store.submit(_yes_record(task, "a1", answer="wrong"))
        assert valid is False
        assert len(store.records) == 1
        report = store.report()
        assert report.counts == {"valid": 0, "invalid": 1, "total": 1}


def _fill_store(store, n_records=50):
    """Drive annotators round-robin until n_records submissions landed."""
    submitted = 0
    annotators = [f"a{i}" for i in range(1, 7)]
    while submitted < n_records:
        progressed = False
        for annotator in annotators:
            if submitted >= n_records:
                break
            task = store.assign_task(annotator)
            if task is None:
                continue
            answer = "yes" if submitted % 5 else "nope"
            store.submit(_yes_record(task, annotator, answer=answer))
            submitted += 1
            progressed = True
        if not progressed:
            break
    return submitted


class TestReplay:
    def test_replay_reconstructs_state_at_every_prefix(self, tmp_path):
        tasks = _tasks(10)
        store = _store(tmp_path, tasks=tasks)
        count = _fill_store(store, 50)
        assert count == 50
        store.close()
        log_lines = (tmp_path / "records.jsonl").read_text().splitlines(keepends=True)
        assert len(log_lines) == 50

        for prefix in range(0, 51, 5):
            replay_dir = tmp_path / f"prefix-{prefix}"
            replay_dir.mkdir()
            log = replay_dir / "records.jsonl"
            log.write_text("".join(log_lines[:prefix]))
            rebuilt = CollectionStore(tasks, log_path=log, annotators=ANNOTATORS)
            assert len(rebuilt.records) == prefix
            assert rebuilt.records == store.records[:prefix]
            # duplicate protection survives the restart
            for record in rebuilt.records:
                with pytest.raises(ConflictError):
                    rebuilt.submit(record)
            rebuilt.close()

    def test_torn_trailing_line_truncated_and_recoverable(self, tmp_path):
        tasks = _tasks(4)
        store = _store(tmp_path, tasks=tasks)
        _fill_store(store, 6)
        store.close()
        log = tmp_path / "records.jsonl"
        intact = log.read_text()
        log.write_text(intact + '{"task_id": "t1", "annotator')  # crash mid-write

        rebuilt = CollectionStore(tasks, log_path=log, annotators=ANNOTATORS)
        assert len(rebuilt.records) == 6
        task = rebuilt.assign_task("a6")
        rebuilt.submit(_yes_record(task, "a6"))
        rebuilt.close()
        final = CollectionStore(tasks, log_path=log, annotators=ANNOTATORS)
        assert len(final.records) == 7
        final.close()

    def test_report_equals_direct_aggregate(self, tmp_path):
        tasks = _tasks(6)
        store = _store(tmp_path, tasks=tasks)
        _fill_store(store, 20)
        assert store.report().to_dict() == aggregate(store.records, tasks).to_dict()


class TestHttpApi:
    @pytest.fixture
    def server(self, tmp_path):
        static_dir = tmp_path / "ui"
        static_dir.mkdir()
        (static_dir / "index.html").write_text("<html>annotation ui</html>")
        store = _store(tmp_path, tasks=_tasks(2))
        server = make_server(store, port=0, static_dir=static_dir)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        yield f"http://127.0.0.1:{server.server_address[1]}", store
        server.shutdown()
        store.close()

    def _get(self, url, token=None):
        request = urllib.request.Request(url)
        if token:
            request.add_header("X-Annotator-Token", token)
        try:
            with urllib.request.urlopen(request) as response:
                body = response.read()
                return response.status, json.loads(body) if body else None
        except urllib.error.HTTPError as err:
            return err.code, json.loads(err.read() or b"null")

    def _post(self, url, payload, token=None):
        request = urllib.request.Request(
            url, data=json.dumps(payload).encode(), headers={"Content-Type": "application/json"}
        )
        if token:
            request.add_header("X-Annotator-Token", token)
        try:
            with urllib.request.urlopen(request) as response:
                return response.status, json.loads(response.read())
        except urllib.error.HTTPError as err:
            return err.code, json.loads(err.read() or b"null")

    def test_health(self, server):
        base, _ = server
        status, body = self._get(f"{base}/api/health")
        assert status == 200 and body["status"] == "ok"

    def test_task_flow_and_blinding(self, server):
        base, store = server
        status, task = self._get(f"{base}/api/tasks/next", token="token-1")
        assert status == 200
        assert "sources" not in task and "correct_answer" not in task
        assert len(task["explanations"]) == 2

        payload = {
            "task_id": task["task_id"],
            "annotator_id": "a1",
            "annotator_task_answer": "yes",
            "ratings": [
                {"label": "yes", "shortcomings": []},
                {"label": "weak_yes", "shortcomings": []},
            ],
            "preference": "prefer_a",
        }
        status, body = self._post(f"{base}/api/ratings", payload, token="token-1")
        assert status == 201 and body["status"] == "recorded"
        assert len(store.records) == 1

        status, _ = self._post(f"{base}/api/ratings", payload, token="token-1")
        assert status == 409

    def test_validation_maps_to_422(self, server):
        base, _ = server
        status, task = self._get(f"{base}/api/tasks/next", token="token-2")
        payload = {
            "task_id": task["task_id"],
            "annotator_id": "a2",
            "annotator_task_answer": "yes",
            "ratings": [
                {"label": "weak_no", "shortcomings": []},
                {"label": "yes", "shortcomings": []},
            ],
            "preference": "equal",
        }
        status, body = self._post(f"{base}/api/ratings", payload, token="token-2")
        assert status == 422
        assert "shortcomings" in body["error"]

    def test_unknown_token_is_401(self, server):
        base, _ = server
        status, _ = self._get(f"{base}/api/tasks/next", token="bogus")
        assert status == 401

    def test_exhaustion_yields_204(self, server):
        base, store = server
        for _ in range(2):
            status, task = self._get(f"{base}/api/tasks/next", token="token-3")
            assert status == 200
            payload = {
                "task_id": task["task_id"],
                "annotator_id": "a3",
                "annotator_task_answer": "yes",
                "ratings": [
                    {"label": "yes", "shortcomings": []},
                    {"label": "yes", "shortcomings": []},
                ],
                "preference": "equal",
            }
            self._post(f"{base}/api/ratings", payload, token="token-3")
        status, _ = self._get(f"{base}/api/tasks/next", token="token-3")
        assert status == 204

    def test_report_endpoint_matches_store(self, server):
        base, store = server
        status, body = self._get(f"{base}/api/report")
        assert status == 200
        assert body == store.report().to_dict()

    def test_static_ui_served(self, server):
        base, _ = server
        with urllib.request.urlopen(f"{base}/") as response:
            assert b"annotation ui" in response.read()

    def test_annotator_query_param_accepted(self, server):
        base, _ = server
        status, _ = self._get(f"{base}/api/tasks/next?annotator=token-4")
        assert status == 200


def test_load_annotators_list_and_mapping(tmp_path):
    as_list = tmp_path / "list.json"
    as_list.write_text(json.dumps(["a1", "a2"]))
    assert load_annotators(as_list) == {"a1": "a1", "a2": "a2"}
    as_map = tmp_path / "map.json"
    as_map.write_text(json.dumps({"secret-1": "a1"}))
    assert load_annotators(as_map) == {"secret-1": "a1"}
