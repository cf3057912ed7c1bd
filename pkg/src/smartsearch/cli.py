"""Command-line interface: index, search, replay, serve.

Exit codes follow grep convention: 0 when at least one match streamed, 1
when none did, 2 on any error (unparseable query, unreadable input, bad
snapshot). `search --json` emits the NDJSON wire protocol verbatim — the
same bytes the HTTP endpoint streams for identical inputs.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, TextIO

from . import snapshot
from .corpus import Corpus, ingest
from .evaluator import PARALLEL, SEQUENTIAL, EvalConfig, encode_event, evaluate
from .server import create_server
from .telemetry import EventLog, replay as run_replay


def _load_corpus(source: str) -> Corpus:
    """Load a snapshot file, or ingest a directory given instead of one."""
    if os.path.isdir(source):
        return ingest(source)
    return snapshot.load(source)


class _HumanRenderer:
    """Stream sink that prints matches grouped by file, then the alert."""

    def __init__(self, out: TextIO):
        self.out = out
        self.error: Optional[dict] = None
        self._group: Optional[tuple] = None

    def __call__(self, event: dict) -> None:
        kind = event["event"]
        if kind == "match":
            source = event["source"]
            suffix = ""
            if source["origin"] == "candidate":
                suffix = f"  [alternative #{source['rank']}]"
            group = (event["repo"], event["path"], suffix)
            if group != self._group:
                if self._group is not None:
                    print(file=self.out)
                print(f"{event['repo']}/{event['path']}{suffix}", file=self.out)
                self._group = group
            print(f"  {event['line']}: {event['text']}", file=self.out)
        elif kind == "alert":
            if self._group is not None:
                print(file=self.out)
                self._group = None
            print(f"{event['title']}:", file=self.out)
            for p in event["proposals"]:
                n = p["count"]
                plus = "+" if p["limit_hit"] else ""
                unit = "result" if n == 1 and not plus else "results"
                print(
                    f"  {p['description']}: {p['query']} ({n}{plus} {unit})",
                    file=self.out,
                )
        elif kind == "error":
            self.error = event


def _cmd_index(args: argparse.Namespace) -> int:
    if not os.path.isdir(args.root):
        print(f"smartsearch: not a directory: {args.root}", file=sys.stderr)
        return 2
    corpus = ingest(args.root)
    snapshot.save(corpus, args.out)
    report = corpus.ingest_report
    line = f"{report.files_indexed} files indexed"
    if report.files_skipped:
        line += f", {report.files_skipped} skipped"
    print(f"{line} -> {args.out}")
    return 0


def _cmd_search(args: argparse.Namespace) -> int:
    try:
        corpus = _load_corpus(args.snapshot)
    except (OSError, snapshot.SnapshotError) as exc:
        print(f"smartsearch: cannot load {args.snapshot}: {exc}", file=sys.stderr)
        return 2
    config = EvalConfig(
        display_limit=args.limit,
        max_candidates=args.max_candidates,
        atqe_enabled=not args.no_atqe,
        mode=PARALLEL if args.parallel else SEQUENTIAL,
    )
    if args.json:
        saw_error = False

        def sink(event: dict) -> None:
            nonlocal saw_error
            if event["event"] == "error":
                saw_error = True
            sys.stdout.buffer.write(encode_event(event))
            sys.stdout.buffer.flush()

        try:
            outcome = evaluate(corpus, args.query, config, sink)
        except Exception:
            return 2
        if saw_error:
            return 2
        return 0 if outcome.total_streamed >= 1 else 1

    renderer = _HumanRenderer(sys.stdout)
    try:
        outcome = evaluate(corpus, args.query, config, renderer)
    except Exception as exc:
        print(f"smartsearch: internal error: {exc}", file=sys.stderr)
        return 2
    if renderer.error is not None:
        print(f"smartsearch: {renderer.error['message']}", file=sys.stderr)
        return 2
    return 0 if outcome.total_streamed >= 1 else 1


def _cmd_replay(args: argparse.Namespace) -> int:
    try:
        corpus = _load_corpus(args.snapshot)
    except (OSError, snapshot.SnapshotError) as exc:
        print(f"smartsearch: cannot load {args.snapshot}: {exc}", file=sys.stderr)
        return 2
    if not os.path.isfile(args.queries):
        print(f"smartsearch: no such file: {args.queries}", file=sys.stderr)
        return 2
    config = EvalConfig(
        display_limit=args.limit,
        max_candidates=args.max_candidates,
        atqe_enabled=not args.no_atqe,
    )
    store = EventLog(args.log) if args.log else None
    metrics, _ = run_replay(corpus, args.queries, config, store)
    text = metrics.to_json()
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    try:
        corpus = _load_corpus(args.source)
    except (OSError, snapshot.SnapshotError) as exc:
        print(f"smartsearch: cannot load {args.source}: {exc}", file=sys.stderr)
        return 2
    config = EvalConfig(
        display_limit=args.limit,
        max_candidates=args.max_candidates,
        atqe_enabled=not args.no_atqe,
        mode=PARALLEL if args.parallel else SEQUENTIAL,
    )
    server = create_server(
        args.host,
        args.port,
        corpus,
        config=config,
        log_path=args.log,
        static_dir=args.static,
        verbose=args.verbose,
    )
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _add_eval_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--limit", type=int, default=500, metavar="N",
                        help="display limit: stop streaming after N matches (default 500)")
    parser.add_argument("--max-candidates", type=int, default=5, metavar="N",
                        help="cap on generated alternative queries (default 5)")
    parser.add_argument("--no-atqe", action="store_true",
                        help="disable alternative query evaluation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smartsearch",
        description="Line-oriented code search with automatic query alternatives.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="ingest a directory tree into a snapshot")
    p_index.add_argument("root", help="directory to ingest")
    p_index.add_argument("--out", "-o", required=True, help="snapshot output path")
    p_index.set_defaults(func=_cmd_index)

    p_search = sub.add_parser("search", help="run one query against a snapshot")
    p_search.add_argument("snapshot", help="snapshot file (or directory to ingest)")
    p_search.add_argument("query", help="query string")
    _add_eval_flags(p_search)
    p_search.add_argument("--parallel", action="store_true",
                          help="evaluate alternative queries concurrently")
    p_search.add_argument("--json", action="store_true",
                          help="emit raw NDJSON wire events instead of human output")
    p_search.set_defaults(func=_cmd_search)

    p_replay = sub.add_parser("replay", help="re-run a query log and report metrics")
    p_replay.add_argument("snapshot", help="snapshot file (or directory to ingest)")
    p_replay.add_argument("queries", help="NDJSON file of {session_id, query} records")
    _add_eval_flags(p_replay)
    p_replay.add_argument("--report", metavar="PATH",
                          help="write the metrics report here instead of stdout")
    p_replay.add_argument("--log", metavar="PATH",
                          help="append replayed search telemetry to this NDJSON file")
    p_replay.set_defaults(func=_cmd_replay)

    p_serve = sub.add_parser("serve", help="run the HTTP search service")
    p_serve.add_argument("source", help="snapshot file or directory to ingest")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    _add_eval_flags(p_serve)
    p_serve.add_argument("--parallel", action="store_true",
                         help="evaluate alternative queries concurrently")
    p_serve.add_argument("--log", metavar="PATH",
                         help="telemetry event log path (default: in-memory)")
    p_serve.add_argument("--static", metavar="DIR",
                         help="serve UI assets from this directory at /")
    p_serve.add_argument("--verbose", action="store_true",
                         help="log requests to stderr")
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"smartsearch: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
