"""HTTP authoring service over the plan/graph engine.

Documents live in memory as sessions (plan + graph sharing one undo stack)
and persist to the state directory as ordinary lesson files plus a session
index, so a restart restores listings and etags. Optimistic concurrency:
every mutation requires ``If-Match`` with the current etag; a stale etag is
refused with 412 and never corrupts state. Errors use one machine-readable
body shape: ``{"code", "message", "locus"?}``.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import uuid
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import urlparse

from .errors import (
    GeneratorFailure,
    LessonForgeError,
    ParseError,
    StateDirUnwritable,
    TransportError,
    UnknownDocument,
)
from .generator import deterministic_generate, llm_generate
from .graph import LessonGraph, chain_from_sequence, validate
from .interchange import (
    LessonFile,
    canonical_json_bytes,
    export_runtime_sequence,
    lesson_bytes,
    parse_lesson_payload,
)
from .library import BUNDLED_LIBRARY_IDS, PhaseCategory, load_library
from .plan import HierarchyLevel, ITEM_LEVELS, Mode, PlanDocument

ENV_STATE_DIR = "LESSONFORGE_STATE_DIR"
ENV_BIND_ADDR = "LESSONFORGE_BIND_ADDR"
DEFAULT_STATE_DIR = "lessonforge-state"
DEFAULT_BIND_ADDR = "127.0.0.1:8737"

_INDEX_FILE = "index.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class DocumentSession:
    """One editable document: plan and graph behind a single lock and stack."""

    def __init__(self, document_id: str, title: str, doc: PlanDocument,
                 graph: LessonGraph):
        self.document_id = document_id
        self.title = title
        self.doc = doc
        self.graph = graph
        graph.history = doc.history  # graph edits share the document undo stack
        self.lock = threading.RLock()
        self.last_modified = _now()

    def touch(self) -> None:
        self.last_modified = _now()

    def lesson(self) -> LessonFile:
        return LessonFile(title=self.title, mode=self.doc.mode,
                          plan=self.doc, graph=self.graph)

    def lesson_bytes(self) -> bytes:
        return lesson_bytes(self.doc, self.graph, self.title)

    @property
    def etag(self) -> str:
        return hashlib.sha256(self.lesson_bytes()).hexdigest()

    def library(self):
        return load_library(self.doc.mode.value)

    def summary_payload(self) -> dict:
        return {
            "documentId": self.document_id,
            "etag": self.etag,
            "lastModified": self.last_modified,
            "mode": self.doc.mode.value,
            "title": self.title,
        }

    def state_payload(self) -> dict:
        payload = self.summary_payload()
        payload.update({
            "canRedo": self.doc.history.can_redo,
            "canUndo": self.doc.history.can_undo,
            "graph": self.graph.to_payload(),
            "plan": self.doc.to_payload(),
        })
        return payload


class SessionStore:
    """Owns all sessions plus their on-disk mirror in the state directory."""

    def __init__(self, state_dir):
        self.state_dir = Path(state_dir)
        try:
            self.state_dir.mkdir(parents=True, exist_ok=True)
            probe = self.state_dir / ".write-probe"
            probe.write_bytes(b"")
            probe.unlink()
        except OSError as exc:
            raise StateDirUnwritable(f"state directory {self.state_dir} is not "
                                     f"writable: {exc}") from None
        self._lock = threading.RLock()
        self._sessions: dict[str, DocumentSession] = {}
        self._order: list[str] = []
        self._restore()

    # ------------------------------------------------------------------
    # persistence

    def _lesson_path(self, document_id: str) -> Path:
        return self.state_dir / f"{document_id}.lesson.json"

    def _restore(self) -> None:
        index_path = self.state_dir / _INDEX_FILE
        if not index_path.exists():
            return
        try:
            index = json.loads(index_path.read_text("utf-8"))
        except (OSError, json.JSONDecodeError):
            return
        for entry in index.get("documents", []):
            document_id = entry.get("documentId")
            path = self.state_dir / str(entry.get("file", ""))
            if not document_id or not path.exists():
                continue
            try:
                lesson = parse_lesson_payload(json.loads(path.read_text("utf-8")))
            except (LessonForgeError, json.JSONDecodeError, OSError):
                continue
            session = DocumentSession(document_id, lesson.title, lesson.plan, lesson.graph)
            self._sessions[document_id] = session
            self._order.append(document_id)

    def _write_index(self) -> None:
        payload = {"documents": [{"documentId": document_id,
                                  "file": f"{document_id}.lesson.json"}
                                 for document_id in self._order]}
        self._atomic_write(self.state_dir / _INDEX_FILE, canonical_json_bytes(payload))

    def _atomic_write(self, path: Path, data: bytes) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_bytes(data)
        os.replace(tmp, path)

    def persist(self, session: DocumentSession) -> None:
        self._atomic_write(self._lesson_path(session.document_id), session.lesson_bytes())

    # ------------------------------------------------------------------
    # session lifecycle

    def create(self, title: str | None = None, mode: Mode = Mode.WELDING,
               lesson: LessonFile | None = None) -> DocumentSession:
        document_id = f"doc-{uuid.uuid4().hex[:12]}"
        if lesson is not None:
            session = DocumentSession(document_id, lesson.title, lesson.plan, lesson.graph)
        else:
            session = DocumentSession(document_id, title or "Untitled lesson",
                                      PlanDocument(mode=mode), LessonGraph())
        with self._lock:
            self._sessions[document_id] = session
            self._order.append(document_id)
            self.persist(session)
            self._write_index()
        return session

    def get(self, document_id: str) -> DocumentSession:
        with self._lock:
            session = self._sessions.get(document_id)
        if session is None:
            raise UnknownDocument(f"no document {document_id!r}", locus=document_id)
        return session

    def delete(self, document_id: str) -> None:
        with self._lock:
            if document_id not in self._sessions:
                raise UnknownDocument(f"no document {document_id!r}", locus=document_id)
            del self._sessions[document_id]
            self._order.remove(document_id)
            path = self._lesson_path(document_id)
            if path.exists():
                path.unlink()
            self._write_index()

    def listing(self) -> list[dict]:
        with self._lock:
            return [self._sessions[document_id].summary_payload()
                    for document_id in self._order]


# ----------------------------------------------------------------------
# HTTP layer


class _HttpError(Exception):
    """Routing/contract failures that already know their HTTP status."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


# Engine errors whose locus arrives in the URL map to 404; everything else
# domain-level is a 400 unless mapped here.
_STATUS_BY_CODE = {
    "UnknownDocument": 404,
    "UnknownItem": 404,
    "UnknownNode": 404,
    "UnknownEdge": 404,
    "UnknownLibrary": 404,
    "GeneratorFailure": 409,
    "TransportError": 502,
    "StateDirUnwritable": 500,
}

_ROUTES: list[tuple[str, re.Pattern, str]] = []


def _route(method: str, pattern: str):
    def register(fn):
        _ROUTES.append((method, re.compile(pattern), fn.__name__))
        return fn
    return register


class LessonServiceHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "lessonforge"

    @property
    def store(self) -> SessionStore:
        return self.server.store

    def log_message(self, fmt, *args):
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    # ------------------------------------------------------------------
    # plumbing

    def _dispatch(self, method: str) -> None:
        path = urlparse(self.path).path.rstrip("/") or "/"
        try:
            for route_method, pattern, handler_name in _ROUTES:
                if route_method != method:
                    continue
                match = pattern.fullmatch(path)
                if match:
                    getattr(self, handler_name)(*match.groups())
                    return
            raise _HttpError(404, "NotFound", f"no route for {method} {path}")
        except _HttpError as exc:
            self._send_json(exc.status, {"code": exc.code, "message": exc.message})
        except LessonForgeError as exc:
            self._send_json(self._status_for(exc), exc.to_payload())
        except Exception as exc:  # pragma: no cover - defensive
            self._send_json(500, {"code": "InternalError", "message": str(exc)})

    @staticmethod
    def _status_for(exc: LessonForgeError) -> int:
        if isinstance(exc, GeneratorFailure) and isinstance(exc.cause, TransportError):
            return 502
        return _STATUS_BY_CODE.get(exc.code, 400)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_PUT(self):
        self._dispatch("PUT")

    def do_PATCH(self):
        self._dispatch("PATCH")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors_headers()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def _cors_headers(self):
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods",
                         "GET, POST, PUT, PATCH, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type, If-Match")
        self.send_header("Access-Control-Expose-Headers", "ETag")

    def _send_bytes(self, status: int, data: bytes, content_type: str,
                    etag: str | None = None, filename: str | None = None):
        self.send_response(status)
        self._cors_headers()
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        if etag:
            self.send_header("ETag", etag)
        if filename:
            self.send_header("Content-Disposition", f'attachment; filename="{filename}"')
        self.end_headers()
        self.wfile.write(data)

    def _send_json(self, status: int, payload, etag: str | None = None):
        self._send_bytes(status, canonical_json_bytes(payload),
                         "application/json; charset=utf-8", etag=etag)

    def _send_no_content(self):
        self.send_response(204)
        self._cors_headers()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def _json_body(self, required: bool = True) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw.strip():
            if required:
                raise _HttpError(400, "MissingBody", "a JSON body is required")
            return {}
        try:
            payload = json.loads(raw)
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ParseError(f"request body is not valid JSON: {exc}") from None
        if not isinstance(payload, dict):
            raise ParseError("request body must be a JSON object")
        return payload

    def _check_if_match(self, session: DocumentSession) -> None:
        provided = self.headers.get("If-Match")
        if provided is None:
            raise _HttpError(400, "MissingIfMatch",
                             "mutations require the If-Match header")
        if provided.strip('"') != session.etag:
            raise _HttpError(412, "StaleEtag",
                             "the document changed since you last fetched it")

    def _mutate(self, document_id: str, op, status: int = 200, extra=None):
        """Run one engine operation under the session lock with etag checking."""
        session = self.store.get(document_id)
        with session.lock:
            self._check_if_match(session)
            result = op(session)
            session.touch()
            self.store.persist(session)
            payload = session.state_payload()
            if extra is not None:
                payload[extra] = result
            self._send_json(status, payload, etag=session.etag)

    @staticmethod
    def _item_level(level_key: str, allow_activities: bool = False) -> HierarchyLevel:
        level = HierarchyLevel.from_key(level_key)
        if level in ITEM_LEVELS or (allow_activities and level is HierarchyLevel.ACTIVITIES):
            return level
        raise _HttpError(400, "InvalidLevel",
                         f"level {level_key!r} has no editable items")

    # ------------------------------------------------------------------
    # documents

    @_route("POST", r"/documents")
    def _create_document(self):
        body = self._json_body(required=False)
        if "schemaVersion" in body:
            session = self.store.create(lesson=parse_lesson_payload(body))
        else:
            mode_value = body.get("mode", Mode.WELDING.value)
            try:
                mode = Mode(mode_value)
            except ValueError:
                raise ParseError(f"unknown mode {mode_value!r}") from None
            session = self.store.create(title=body.get("title"), mode=mode)
        with session.lock:
            self._send_json(201, session.state_payload(), etag=session.etag)

    @_route("GET", r"/documents")
    def _list_documents(self):
        self._send_json(200, {"documents": self.store.listing()})

    @_route("GET", r"/documents/([^/]+)")
    def _get_document(self, document_id):
        session = self.store.get(document_id)
        with session.lock:
            self._send_json(200, session.state_payload(), etag=session.etag)

    @_route("DELETE", r"/documents/([^/]+)")
    def _delete_document(self, document_id):
        session = self.store.get(document_id)
        with session.lock:
            self._check_if_match(session)
            self.store.delete(document_id)
        self._send_no_content()

    @_route("PUT", r"/documents/([^/]+)/outcomes")
    def _put_outcomes(self, document_id):
        body = self._json_body()
        self._mutate(document_id,
                     lambda session: session.doc.set_outcomes(str(body.get("text", ""))))

    @_route("PUT", r"/documents/([^/]+)/mode")
    def _put_mode(self, document_id):
        body = self._json_body()
        try:
            mode = Mode(body.get("mode"))
        except ValueError:
            raise ParseError(f"unknown mode {body.get('mode')!r}") from None
        session = self.store.get(document_id)
        with session.lock:
            self._check_if_match(session)
            if session.doc.set_mode(mode):
                session.touch()
                self.store.persist(session)
            self._send_json(200, session.state_payload(), etag=session.etag)

    @_route("POST", r"/documents/([^/]+)/generate")
    def _generate(self, document_id):
        body = self._json_body()
        level = HierarchyLevel.from_key(body.get("level", "objectives"))
        if level is HierarchyLevel.OUTCOMES:
            raise _HttpError(400, "InvalidLevel", "outcomes are entered, not generated")
        generator_name = body.get("generator", "deterministic")
        if generator_name == "deterministic":
            gen = deterministic_generate
        elif generator_name == "llm":
            gen = llm_generate
        else:
            raise _HttpError(400, "UnknownGenerator",
                             f"unknown generator {generator_name!r}")
        self._mutate(document_id,
                     lambda session: session.doc.global_update(
                         level, gen, library=session.library()))

    # ------------------------------------------------------------------
    # plan items

    @_route("POST", r"/documents/([^/]+)/items/([^/]+)")
    def _add_item(self, document_id, level_key):
        body = self._json_body()
        level = self._item_level(level_key, allow_activities=True)
        self._mutate(document_id,
                     lambda session: session.doc.add_item(
                         level, str(body.get("text", "")), link=body.get("link"),
                         library=session.library()),
                     status=201)

    @_route("PATCH", r"/documents/([^/]+)/items/([^/]+)/([^/]+)")
    def _edit_item(self, document_id, level_key, item_id):
        body = self._json_body()
        level = self._item_level(level_key)
        self._mutate(document_id,
                     lambda session: session.doc.local_edit(
                         level, item_id, str(body.get("text", ""))))

    @_route("DELETE", r"/documents/([^/]+)/items/([^/]+)/([^/]+)")
    def _delete_item(self, document_id, level_key, item_id):
        level = self._item_level(level_key, allow_activities=True)
        self._mutate(document_id,
                     lambda session: session.doc.local_delete(level, item_id))

    @_route("POST", r"/documents/([^/]+)/items/([^/]+)/([^/]+)/undo")
    def _undo_item(self, document_id, level_key, item_id):
        level = self._item_level(level_key)
        self._mutate(document_id,
                     lambda session: session.doc.undo_item(level, item_id))

    @_route("DELETE", r"/documents/([^/]+)/levels/([^/]+)")
    def _delete_level(self, document_id, level_key):
        level = HierarchyLevel.from_key(level_key)
        self._mutate(document_id, lambda session: session.doc.delete_level(level))

    @_route("POST", r"/documents/([^/]+)/undo")
    def _undo(self, document_id):
        self._mutate(document_id, lambda session: session.doc.undo())

    @_route("POST", r"/documents/([^/]+)/redo")
    def _redo(self, document_id):
        self._mutate(document_id, lambda session: session.doc.redo())

    # ------------------------------------------------------------------
    # graph editing

    @_route("POST", r"/documents/([^/]+)/graph/nodes")
    def _add_node(self, document_id):
        body = self._json_body()
        position = body.get("position") or None
        if position is not None:
            position = (position.get("x", 0.0), position.get("y", 0.0))

        def op(session):
            node = session.graph.add_node(
                str(body.get("activityId", "")), session.library(),
                position=position, label=body.get("label"))
            return node.to_payload()

        self._mutate(document_id, op, status=201, extra="node")

    @_route("PATCH", r"/documents/([^/]+)/graph/nodes/([^/]+)")
    def _patch_node(self, document_id, node_id):
        body = self._json_body()
        properties = body.get("properties") or {}
        position = body.get("position")

        def op(session):
            if properties:
                session.graph.set_properties(
                    node_id,
                    timing_seconds=properties.get("timingSeconds"),
                    message=properties.get("message"),
                    hint_audio=properties.get("hintAudio"),
                    hint_visual=properties.get("hintVisual"))
            if position is not None:
                session.graph.set_position(node_id, position.get("x", 0.0),
                                           position.get("y", 0.0))
            return session.graph.node(node_id).to_payload()

        self._mutate(document_id, op, extra="node")

    @_route("DELETE", r"/documents/([^/]+)/graph/nodes/([^/]+)")
    def _remove_node(self, document_id, node_id):
        self._mutate(document_id, lambda session: session.graph.remove_node(node_id))

    @_route("POST", r"/documents/([^/]+)/graph/edges")
    def _add_edge(self, document_id):
        body = self._json_body()

        def op(session):
            edge = session.graph.add_edge(str(body.get("from", "")),
                                          str(body.get("to", "")))
            return edge.to_payload()

        self._mutate(document_id, op, status=201, extra="edge")

    @_route("DELETE", r"/documents/([^/]+)/graph/edges/([^/]+)")
    def _remove_edge(self, document_id, edge_id):
        self._mutate(document_id, lambda session: session.graph.remove_edge(edge_id))

    @_route("POST", r"/documents/([^/]+)/graph/lessongraph")
    def _build_lessongraph(self, document_id):
        def op(session):
            ids = [ref.activity_id for ref in session.doc.activity_sequence]
            chain = chain_from_sequence(ids, session.library())
            session.graph.replace_content(chain)

        self._mutate(document_id, op)

    @_route("DELETE", r"/documents/([^/]+)/graph")
    def _clear_graph(self, document_id):
        self._mutate(document_id,
                     lambda session: session.graph.replace_content(LessonGraph()))

    # ------------------------------------------------------------------
    # read-only document views

    @_route("GET", r"/documents/([^/]+)/validate")
    def _validate(self, document_id):
        session = self.store.get(document_id)
        with session.lock:
            diagnostics = validate(session.graph, session.library(),
                                   stale_levels=session.doc.stale_levels)
            self._send_json(200, {"diagnostics": [d.to_payload() for d in diagnostics]},
                            etag=session.etag)

    @_route("GET", r"/documents/([^/]+)/sequence")
    def _sequence(self, document_id):
        session = self.store.get(document_id)
        with session.lock:
            sequence = export_runtime_sequence(session.graph, session.library())
            self._send_json(200, {
                "entries": [entry.to_payload() for entry in sequence.entries],
                "warnings": [d.to_payload() for d in sequence.warnings],
            }, etag=session.etag)

    @_route("GET", r"/documents/([^/]+)/download")
    def _download(self, document_id):
        session = self.store.get(document_id)
        with session.lock:
            self._send_bytes(200, session.lesson_bytes(),
                             "application/json; charset=utf-8",
                             etag=session.etag,
                             filename=f"{document_id}.lesson.json")

    # ------------------------------------------------------------------
    # libraries

    @_route("GET", r"/libraries")
    def _libraries(self):
        listing = []
        for library_id in BUNDLED_LIBRARY_IDS:
            bundle = load_library(library_id)
            listing.append({
                "descriptorCount": len(bundle),
                "libraryId": bundle.library_id,
                "version": bundle.version,
            })
        self._send_json(200, {"libraries": listing})

    @_route("GET", r"/libraries/([^/]+)")
    def _library(self, library_id):
        bundle = load_library(library_id)
        payload = bundle.to_payload()
        payload["phases"] = [{"color": phase.color, "phase": phase.value}
                             for phase in PhaseCategory]
        self._send_json(200, payload)

    @_route("GET", r"/libraries/([^/]+)/phase/([^/]+)")
    def _library_phase(self, library_id, phase_key):
        bundle = load_library(library_id)
        try:
            phase = PhaseCategory.from_value(phase_key)
        except ParseError:
            raise _HttpError(404, "UnknownPhase", f"unknown phase {phase_key!r}") from None
        descriptors = [d.to_payload() for d in bundle.descriptors if d.phase is phase]
        self._send_json(200, {"descriptors": descriptors, "phase": phase.value})


def create_server(state_dir=None, host: str = "127.0.0.1", port: int = 0,
                  verbose: bool = False) -> ThreadingHTTPServer:
    """Build a ready-to-run service bound to ``host:port`` (0 = ephemeral)."""
    store = SessionStore(state_dir or os.environ.get(ENV_STATE_DIR, DEFAULT_STATE_DIR))
    server = ThreadingHTTPServer((host, port), LessonServiceHandler)
    server.daemon_threads = True
    server.store = store
    server.verbose = verbose
    return server


def serve(state_dir=None, bind_addr: str | None = None) -> None:
    """Run the service until interrupted (CLI ``serve`` entry point)."""
    addr = bind_addr or os.environ.get(ENV_BIND_ADDR, DEFAULT_BIND_ADDR)
    host, _, port_text = addr.partition(":")
    server = create_server(state_dir=state_dir, host=host or "127.0.0.1",
                           port=int(port_text or 0), verbose=True)
    actual_host, actual_port = server.server_address[:2]
    print(f"lessonforge service listening on http://{actual_host}:{actual_port} "
          f"(state dir: {server.store.state_dir})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
