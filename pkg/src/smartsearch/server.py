"""HTTP service: streaming search, click telemetry, metrics, static UI.

Built on the stdlib threading HTTP server. Search responses stream as
chunked NDJSON with one flush per event, so clients see matches as they are
found; the de-chunked body is byte-identical to ``smartsearch search --json``
for the same inputs. Telemetry writes are best-effort on the search path: a
failed append never fails the request.
"""

from __future__ import annotations

import json
import mimetypes
import os
import posixpath
import threading
import time
from dataclasses import replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional, Union
from urllib.parse import parse_qs, urlparse

from . import telemetry
from .corpus import Corpus
from .evaluator import EvalConfig, encode_event, evaluate
from .telemetry import EventLog, ValidationError, assign_variant


class _MemoryLog:
    """In-process fallback store when no telemetry log path is configured."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._records: list[dict] = []

    def append(self, record: dict) -> None:
        telemetry.validate_record(record)
        with self._lock:
            self._records.append(record)

    def __iter__(self):
        with self._lock:
            return iter(list(self._records))


def _now_ms() -> int:
    return int(time.time() * 1000)


def _error_body(code: str, message: str) -> dict:
    return {"event": "error", "code": code, "message": message}


class SearchServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(
        self,
        address: tuple[str, int],
        corpus: Corpus,
        config: Optional[EvalConfig] = None,
        log_path: Optional[str] = None,
        static_dir: Optional[str] = None,
        verbose: bool = False,
    ):
        super().__init__(address, _Handler)
        self.corpus = corpus
        self.config = config or EvalConfig()
        self.events: Union[EventLog, _MemoryLog]
        self.events = EventLog(log_path) if log_path else _MemoryLog()
        self.static_dir = os.path.realpath(static_dir) if static_dir else None
        self.verbose = verbose


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: SearchServer

    def log_message(self, format: str, *args) -> None:
        if self.server.verbose:
            super().log_message(format, *args)

    # ---- plumbing ----

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode("utf-8") + b"\n"
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _write_chunk(self, data: bytes) -> None:
        self.wfile.write(f"{len(data):X}\r\n".encode("ascii"))
        self.wfile.write(data)
        self.wfile.write(b"\r\n")
        self.wfile.flush()

    # ---- routes ----

    def do_GET(self) -> None:
        parsed = urlparse(self.path)
        route = parsed.path
        if route == "/api/search":
            self._handle_search(parsed.query)
        elif route == "/api/metrics":
            self._handle_metrics()
        elif route == "/health":
            self._send_json(200, {"status": "ok"})
        else:
            self._handle_static(route)

    def do_POST(self) -> None:
        route = urlparse(self.path).path
        if route == "/api/click":
            self._handle_click()
        else:
            self._send_json(404, _error_body("parse", f"no such endpoint: {route}"))

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    # ---- /api/search ----

    def _handle_search(self, query_string: str) -> None:
        params = parse_qs(query_string, keep_blank_values=True)
        if "q" not in params:
            self._send_json(400, _error_body("parse", "missing required query parameter: q"))
            return
        q = params["q"][0]
        session = params.get("session", ["anonymous"])[0] or "anonymous"
        config = self.server.config
        if "limit" in params:
            try:
                limit = int(params["limit"][0])
                if limit < 0:
                    raise ValueError
            except ValueError:
                self._send_json(400, _error_body("parse", "limit must be a non-negative integer"))
                return
            config = replace(config, display_limit=limit)
        if "atqe" in params:
            flag = params["atqe"][0]
            if flag not in ("0", "1"):
                self._send_json(400, _error_body("parse", "atqe must be 0 or 1"))
                return
            config = replace(config, atqe_enabled=flag == "1")

        self.send_response(200)
        self.send_header("Content-Type", "application/x-ndjson; charset=utf-8")
        self.send_header("Transfer-Encoding", "chunked")
        self.send_header("Cache-Control", "no-store")
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()

        def sink(event: dict) -> None:
            self._write_chunk(encode_event(event))

        try:
            outcome = evaluate(self.server.corpus, q, config, sink)
        except (BrokenPipeError, ConnectionResetError):
            self.close_connection = True
            return
        except Exception:
            # evaluate already streamed an error event; nothing sane to add
            self.close_connection = True
            return

        event = telemetry.SearchTelemetry(
            session_id=session,
            timestamp=_now_ms(),
            variant=assign_variant(session),
            query=q,
            triggered=outcome.triggered,
            category=outcome.category,
            candidate_rules=tuple(
                (c.applied_rules, c.streamed_count) for c in outcome.candidates
            ),
            total_streamed=outcome.total_streamed,
        )
        try:
            self.server.events.append(event.to_record())
        except Exception:
            pass  # telemetry is best-effort on the search path

        # Terminate the chunked body only after the telemetry record is
        # stored, so a client that has read the full response can rely on
        # /api/metrics reflecting this search.
        try:
            self._write_chunk(b"")
        except (BrokenPipeError, ConnectionResetError):
            self.close_connection = True

    # ---- /api/click ----

    def _handle_click(self) -> None:
        try:
            length = int(self.headers.get("Content-Length", "0"))
        except ValueError:
            self._send_json(400, _error_body("parse", "invalid Content-Length"))
            return
        raw = self.rfile.read(length) if length else b""
        try:
            payload = json.loads(raw.decode("utf-8"))
            if not isinstance(payload, dict):
                raise ValueError("click body must be a JSON object")
            record = {
                "type": "click",
                "session_id": payload.get("session_id"),
                "timestamp": payload["timestamp"]
                if isinstance(payload.get("timestamp"), int)
                else _now_ms(),
                "source": payload.get("source"),
                "category_at_search": payload.get("category_at_search"),
            }
            self.server.events.append(record)
        except (ValueError, ValidationError, UnicodeDecodeError) as exc:
            self._send_json(400, _error_body("parse", f"invalid click event: {exc}"))
            return
        except Exception as exc:
            self._send_json(500, _error_body("internal", str(exc)))
            return
        self._send_json(200, {"status": "recorded"})

    # ---- /api/metrics ----

    def _handle_metrics(self) -> None:
        try:
            body = telemetry.report(self.server.events).to_json().encode("utf-8")
        except Exception as exc:
            self._send_json(500, _error_body("internal", str(exc)))
            return
        self.send_response(200)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    # ---- static assets ----

    def _handle_static(self, route: str) -> None:
        root = self.server.static_dir
        if root is None:
            self._send_json(404, _error_body("parse", f"no such endpoint: {route}"))
            return
        clean = posixpath.normpath(route.lstrip("/")) or "."
        if clean == ".":
            clean = "index.html"
        target = os.path.realpath(os.path.join(root, clean))
        if target != root and not target.startswith(root + os.sep):
            self._send_json(404, _error_body("parse", "not found"))
            return
        if os.path.isdir(target):
            target = os.path.join(target, "index.html")
        if not os.path.isfile(target):
            self._send_json(404, _error_body("parse", "not found"))
            return
        ctype = mimetypes.guess_type(target)[0] or "application/octet-stream"
        with open(target, "rb") as fh:
            body = fh.read()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def create_server(
    host: str,
    port: int,
    corpus: Corpus,
    config: Optional[EvalConfig] = None,
    log_path: Optional[str] = None,
    static_dir: Optional[str] = None,
    verbose: bool = False,
) -> SearchServer:
    return SearchServer(
        (host, port),
        corpus=corpus,
        config=config,
        log_path=log_path,
        static_dir=static_dir,
        verbose=verbose,
    )
