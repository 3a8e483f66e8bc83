"""HTTP collection service for the human-evaluation study.

The store hands out rating tasks to annotators under short-lived leases,
accepts exactly one record per (task, annotator) pair, and keeps every
accepted record in an append-only JSON-lines log that is fsynced before
the submission is acknowledged.  Restart replays the log, so any prefix of
appended records reconstructs the assignment state exactly; leases are
deliberately volatile (they expire anyway, and duplicates are prevented by
the submitted-set, not by leases).

All mutations serialize through one lock; reads aggregate over a snapshot.

HTTP surface (JSON bodies, annotator token via ``X-Annotator-Token`` header
or the ``annotator`` query parameter):

    GET  /api/health
    GET  /api/tasks/next?annotator=<id>   -> 200 task | 204 exhausted
    POST /api/ratings                     -> 201 | 409 conflict | 422 invalid
    GET  /api/report
    GET  /images/<file>                   (when an image dir is configured)
    GET  /<asset>                         (when a static UI dir is configured)
"""

from __future__ import annotations

import json
import logging
import mimetypes
import os
import threading
import time
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .errors import (
    AuthorizationError,
    ConflictError,
    DataLoadError,
    ValidationError,
)
from .humaneval import (
    EvalTask,
    HumanReport,
    RatingRecord,
    aggregate,
    record_from_dict,
    record_to_dict,
    record_valid,
    validate_record,
)

log = logging.getLogger(__name__)

DEFAULT_LEASE_SECONDS = 30 * 60


def load_annotators(path) -> dict[str, str]:
    """Annotator allow-list: {token: id} object, or a list of ids used as tokens."""
    path = Path(path)
    if not path.is_file():
        raise DataLoadError(f"missing annotator file: {path}")
    with path.open("r", encoding="utf-8") as handle:
        data = json.load(handle)
    if isinstance(data, list):
        return {str(t): str(t) for t in data}
    return {str(token): str(annotator) for token, annotator in data.items()}


class CollectionStore:
    """Assignment state machine with a durable record log."""

    def __init__(
        self,
        tasks: list[EvalTask],
        log_path,
        annotators: dict[str, str],
        lease_seconds: float = DEFAULT_LEASE_SECONDS,
        clock=time.time,
    ):
        self._tasks = sorted(tasks, key=lambda t: t.task_id)
        self._by_id = {task.task_id: task for task in self._tasks}
        self._annotators = dict(annotators)
        self._lease_seconds = lease_seconds
        self._clock = clock
        self._lock = threading.Lock()

        self._records: list[RatingRecord] = []
        self._submitted: dict[str, set[str]] = {t.task_id: set() for t in self._tasks}
        self._leases: dict[tuple[str, str], float] = {}

        self._log_path = Path(log_path)
        self._log_path.parent.mkdir(parents=True, exist_ok=True)
        self._replay()
        self._log = self._log_path.open("a", encoding="utf-8")

    # -- persistence ----------------------------------------------------

    def _replay(self) -> None:
        """Rebuild state from the log; a torn trailing line is truncated."""
        if not self._log_path.exists():
            return
        good_end = 0
        with self._log_path.open("rb") as handle:
            for raw in handle:
                if not raw.endswith(b"\n"):
                    log.warning("record log ends mid-line; truncating torn write")
                    break
                line = raw.decode("utf-8").strip()
                if line:
                    try:
                        payload = json.loads(line)
                        record = record_from_dict(payload)
                    except (ValueError, ValidationError):
                        log.warning("record log has an undecodable trailing line; truncating")
                        break
                    self._records.append(record)
                    self._submitted.setdefault(record.task_id, set()).add(record.annotator_id)
                good_end += len(raw)
        if good_end < self._log_path.stat().st_size:
            with self._log_path.open("r+b") as handle:
                handle.truncate(good_end)

    def _append(self, record: RatingRecord, valid: bool) -> None:
        payload = record_to_dict(record)
        payload["valid"] = valid
        self._log.write(json.dumps(payload, sort_keys=True) + "\n")
        self._log.flush()
        os.fsync(self._log.fileno())

    def close(self) -> None:
        self._log.close()

    # -- operations -----------------------------------------------------

    def resolve_annotator(self, token: str | None) -> str:
        if token is None or token not in self._annotators:
            raise AuthorizationError("unknown annotator token")
        return self._annotators[token]

    def _expire_leases(self, now: float) -> None:
        expired = [key for key, expiry in self._leases.items() if expiry <= now]
        for key in expired:
            del self._leases[key]

    def assign_task(self, annotator_id: str) -> EvalTask | None:
        """Lease the least-covered task this annotator hasn't handled yet."""
        if annotator_id not in self._annotators.values():
            raise AuthorizationError(f"annotator {annotator_id!r} is not on the allow-list")
        now = self._clock()
        with self._lock:
            self._expire_leases(now)
            load: dict[str, int] = {}
            for task_id, annotators in self._submitted.items():
                load[task_id] = len(annotators)
            for task_id, _annotator in self._leases:
                load[task_id] = load.get(task_id, 0) + 1

            best = None
            for task in self._tasks:
                if annotator_id in self._submitted[task.task_id]:
                    continue
                if (task.task_id, annotator_id) in self._leases:
                    continue
                key = (load.get(task.task_id, 0), task.task_id)
                if best is None or key < best[0]:
                    best = (key, task)
            if best is None:
                return None
            task = best[1]
            self._leases[(task.task_id, annotator_id)] = now + self._lease_seconds
            return task

    def lease_expiry(self, task_id: str, annotator_id: str) -> float | None:
        with self._lock:
            return self._leases.get((task_id, annotator_id))

    def submit(self, record: RatingRecord) -> bool:
        """Durably append one record; returns its validity flag.

        Requires a live lease and no earlier submission for the
        (task, annotator) pair; the append hits disk before the method
        returns, so an acknowledged record survives a crash.
        """
        if record.annotator_id not in self._annotators.values():
            raise AuthorizationError(f"annotator {record.annotator_id!r} is not on the allow-list")
        validate_record(record)
        task = self._by_id.get(record.task_id)
        if task is None:
            raise ValidationError(f"task_id: unknown task {record.task_id!r}")
        now = self._clock()
        with self._lock:
            self._expire_leases(now)
            key = (record.task_id, record.annotator_id)
            if record.annotator_id in self._submitted[record.task_id]:
                raise ConflictError(
                    f"annotator {record.annotator_id!r} already submitted task {record.task_id!r}"
                )
            if key not in self._leases:
                raise ConflictError(
                    f"no live lease for task {record.task_id!r} and annotator {record.annotator_id!r}"
                )
            valid = record_valid(record, task)
            self._append(record, valid)
            self._records.append(record)
            self._submitted[record.task_id].add(record.annotator_id)
            del self._leases[key]
            return valid

    def report(self) -> HumanReport:
        with self._lock:
            snapshot = list(self._records)
        return aggregate(snapshot, self._tasks)

    @property
    def records(self) -> list[RatingRecord]:
        with self._lock:
            return list(self._records)

    @property
    def tasks(self) -> list[EvalTask]:
        return list(self._tasks)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    # -- helpers ---------------------------------------------------------

    def _send_json(self, status: int, payload) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header(
            "Access-Control-Allow-Headers", "Content-Type, X-Annotator-Token"
        )
        self.end_headers()
        self.wfile.write(body)

    def _send_empty(self, status: int) -> None:
        self.send_response(status)
        self.send_header("Content-Length", "0")
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()

    def _send_file(self, root: Path, relative: str) -> None:
        target = (root / relative.lstrip("/")).resolve()
        if not str(target).startswith(str(root.resolve())) or not target.is_file():
            self._send_json(404, {"error": "not found"})
            return
        content_type = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        data = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _annotator(self) -> str:
        token = self.headers.get("X-Annotator-Token")
        if token is None:
            query = parse_qs(urlparse(self.path).query)
            token = query.get("annotator", [None])[0]
        return self.server.store.resolve_annotator(token)

    # -- routes ----------------------------------------------------------

    def do_OPTIONS(self) -> None:  # CORS preflight
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header(
            "Access-Control-Allow-Headers", "Content-Type, X-Annotator-Token"
        )
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self) -> None:
        store: CollectionStore = self.server.store
        path = urlparse(self.path).path
        try:
            if path == "/api/health":
                self._send_json(
                    200,
                    {
                        "status": "ok",
                        "tasks": len(store.tasks),
                        "records": len(store.records),
                    },
                )
            elif path == "/api/tasks/next":
                annotator = self._annotator()
                task = store.assign_task(annotator)
                if task is None:
                    self._send_empty(204)
                else:
                    payload = task.to_public_dict()
                    payload["lease_expires"] = store.lease_expiry(task.task_id, annotator)
                    self._send_json(200, payload)
            elif path == "/api/report":
                self._send_json(200, store.report().to_dict())
            elif path.startswith("/images/") and self.server.image_dir:
                self._send_file(self.server.image_dir, path[len("/images/") :])
            elif self.server.static_dir:
                self._send_file(self.server.static_dir, "index.html" if path == "/" else path)
            else:
                self._send_json(404, {"error": "not found"})
        except AuthorizationError as exc:
            self._send_json(401, {"error": str(exc)})

    def do_POST(self) -> None:
        store: CollectionStore = self.server.store
        path = urlparse(self.path).path
        if path != "/api/ratings":
            self._send_json(404, {"error": "not found"})
            return
        try:
            annotator = self._annotator()
            length = int(self.headers.get("Content-Length", 0))
            try:
                payload = json.loads(self.rfile.read(length).decode("utf-8"))
            except ValueError:
                self._send_json(422, {"error": "body is not valid JSON"})
                return
            payload.setdefault("timestamp", _utc_now())
            payload.setdefault("annotator_id", annotator)
            record = record_from_dict(payload)
            if record.annotator_id != annotator:
                self._send_json(403, {"error": "annotator_id does not match the token"})
                return
            store.submit(record)
            self._send_json(201, {"status": "recorded", "task_id": record.task_id})
        except AuthorizationError as exc:
            self._send_json(401, {"error": str(exc)})
        except ConflictError as exc:
            self._send_json(409, {"error": str(exc)})
        except ValidationError as exc:
            self._send_json(422, {"error": str(exc)})

    def log_message(self, format, *args):  # quiet by default
        log.debug("%s - %s", self.address_string(), format % args)


class AnnotationServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, store: CollectionStore, image_dir=None, static_dir=None):
        super().__init__(address, _Handler)
        self.store = store
        self.image_dir = Path(image_dir) if image_dir else None
        self.static_dir = Path(static_dir) if static_dir else None


def make_server(
    store: CollectionStore,
    host: str = "127.0.0.1",
    port: int = 8080,
    image_dir=None,
    static_dir=None,
) -> AnnotationServer:
    return AnnotationServer((host, port), store, image_dir=image_dir, static_dir=static_dir)
