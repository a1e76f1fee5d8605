"""HTTP portal: ontology cache, editing sessions, forms, queries.

Endpoints (JSON unless noted):

    POST /ontologies                    {"name": ..., "hfs": ...} -> summary
    GET  /ontologies/{name}/taxonomy    text listing of the class hierarchy
    POST /ontologies/{name}/query       body = query text -> JSON bindings
    POST /sessions                      {"ontology": ..., "initial_class"?} -> session
    GET  /sessions/{id}/form            form XML
    POST /sessions/{id}/values          {"property": ..., "value": ...} -> form XML
    GET  /sessions/{id}/recommendations JSON groups

Errors are JSON ``{"category", "message", "location"?}`` with 4xx status.
The ontology cache swaps entries atomically, so concurrent readers see
either the old or the new taxonomy during a reload, never a mixture.
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import (
    BadRequestError,
    PortalError,
    SessionLimitError,
    UnknownOntologyError,
    UnknownSessionError,
)
from .model import DecisionConfig
from .query import answer, bindings_to_json, parse_query
from .session import LoadedOntology, Session, restore_session
from .uiconfig import DEFAULT_UI_CONFIG, UiConfig, parse_ui_config, resolve_config

NOT_FOUND_CATEGORIES = {
    "unknown-ontology",
    "unknown-session",
    "unknown-property",
    "unknown-individual",
    "unknown-name",
    "not-recommended",
}


def canonical_json(payload: object) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class ServerConfig:
    port: int = 8080
    ontology_dir: Path | None = None
    ui_config: Path | None = None
    patient_class: str = "Patient"
    treatment_class: str = "Treatment"
    reco_prop: str = "reco"
    journal_dir: Path | None = None
    session_limit: int = 100
    static_dir: Path | None = None

    @classmethod
    def from_file(cls, path: Path) -> "ServerConfig":
        cfg = cls()
        for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise BadRequestError(f"bad config line {line_no}: {raw!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "port":
                cfg.port = int(value)
            elif key == "ontology_dir":
                cfg.ontology_dir = Path(value)
            elif key == "ui_config":
                cfg.ui_config = Path(value)
            elif key == "patient_class":
                cfg.patient_class = value
            elif key == "treatment_class":
                cfg.treatment_class = value
            elif key == "reco_prop":
                cfg.reco_prop = value
            elif key == "journal_dir":
                cfg.journal_dir = Path(value)
            elif key == "session_limit":
                cfg.session_limit = int(value)
            elif key == "static_dir":
                cfg.static_dir = Path(value)
            else:
                raise BadRequestError(f"unknown config key {key!r} on line {line_no}")
        return cfg

    def validate(self) -> None:
        if not (1 <= self.port <= 65535):
            raise BadRequestError(f"port {self.port} out of range")
        if self.ontology_dir is not None and not self.ontology_dir.is_dir():
            raise BadRequestError(f"ontology directory {self.ontology_dir} does not exist")
        if self.ui_config is not None and not self.ui_config.is_file():
            raise BadRequestError(f"ui config {self.ui_config} does not exist")
        if self.static_dir is not None and not self.static_dir.is_dir():
            raise BadRequestError(f"static directory {self.static_dir} does not exist")

    def decision_config(self) -> DecisionConfig:
        return DecisionConfig(
            patient_class=self.patient_class,
            treatment_class=self.treatment_class,
            reco_prop=self.reco_prop,
        )


# ---------------------------------------------------------------------------
# Application core (HTTP-free, used by the handler and by tests)
# ---------------------------------------------------------------------------


class PortalApp:
    def __init__(self, config: ServerConfig):
        config.validate()
        self.config = config
        self.decision_config = config.decision_config()
        if config.ui_config is not None:
            self.ui_config: UiConfig = resolve_config(parse_ui_config(config.ui_config.read_text(encoding="utf-8")))
        else:
            self.ui_config = resolve_config(DEFAULT_UI_CONFIG)
        self.ontologies: dict[str, LoadedOntology] = {}
        self.sessions: dict[str, Session] = {}
        self._ontologies_lock = threading.Lock()
        self._sessions_lock = threading.Lock()

    # -- startup ---------------------------------------------------------------

    def startup(self) -> list[str]:
        """Load the ontology directory and restore journaled sessions.

        Returns human-readable notes (loaded names, skipped journals).
        """
        notes: list[str] = []
        if self.config.ontology_dir is not None:
            for path in sorted(self.config.ontology_dir.glob("*.hfs")):
                if path.name.endswith(".uicfg.hfs"):
                    continue
                loaded = LoadedOntology.from_text(path.stem, path.read_text(encoding="utf-8"))
                with self._ontologies_lock:
                    self.ontologies[loaded.name] = loaded
                notes.append(f"loaded ontology {loaded.name} from {path.name}")
        if self.config.journal_dir is not None:
            self.config.journal_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self.config.journal_dir.glob("*.journal")):
                try:
                    session = restore_session(path, self.ontologies, self.ui_config, self.decision_config)
                except (PortalError, OSError) as exc:
                    notes.append(f"skipped journal {path.name}: {exc}")
                    continue
                with self._sessions_lock:
                    self.sessions[session.id] = session
                notes.append(f"restored session {session.id}")
        return notes

    # -- ontologies --------------------------------------------------------------

    def load_ontology(self, name: str, hfs_text: str) -> dict:
        loaded = LoadedOntology.from_text(name, hfs_text)
        with self._ontologies_lock:
            self.ontologies[name] = loaded
        return loaded.summary

    def get_ontology(self, name: str) -> LoadedOntology:
        with self._ontologies_lock:
            loaded = self.ontologies.get(name)
        if loaded is None:
            raise UnknownOntologyError(f"unknown ontology {name}")
        return loaded

    def query(self, name: str, query_text: str) -> str:
        loaded = self.get_ontology(name)
        solutions = answer(loaded.taxonomy, loaded.ontology, parse_query(query_text))
        return bindings_to_json(solutions)

    # -- sessions -----------------------------------------------------------------

    def create_session(self, ontology_name: str, initial_class: str | None = None) -> Session:
        loaded = self.get_ontology(ontology_name)
        with self._sessions_lock:
            if len(self.sessions) >= self.config.session_limit:
                raise SessionLimitError(f"session limit {self.config.session_limit} reached")
        session_id = uuid.uuid4().hex[:16]
        instance = f"case_{session_id[:8]}"
        while instance in loaded.ontology.abox.individuals:
            instance += "x"
        journal_path = None
        if self.config.journal_dir is not None:
            self.config.journal_dir.mkdir(parents=True, exist_ok=True)
            journal_path = self.config.journal_dir / f"{session_id}.journal"
        session = Session(
            session_id=session_id,
            base=loaded,
            instance=instance,
            initial_class=initial_class or self.decision_config.patient_class,
            ui_config=self.ui_config,
            decision_config=self.decision_config,
            journal_path=journal_path,
        )
        with self._sessions_lock:
            if len(self.sessions) >= self.config.session_limit:
                raise SessionLimitError(f"session limit {self.config.session_limit} reached")
            self.sessions[session.id] = session
        return session

    def get_session(self, session_id: str) -> Session:
        with self._sessions_lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(f"unknown session {session_id}")
        return session

    def set_value(self, session_id: str, prop: str, value) -> str:
        session = self.get_session(session_id)
        base = self.get_ontology(session.ontology_name)
        return session.set_value(prop, value, base=base)


# ---------------------------------------------------------------------------
# HTTP layer
# ---------------------------------------------------------------------------

_ROUTES: list[tuple[str, re.Pattern, str]] = [
    ("POST", re.compile(r"^/ontologies$"), "post_ontologies"),
    ("GET", re.compile(r"^/ontologies/([A-Za-z_][A-Za-z0-9_]*)/taxonomy$"), "get_taxonomy"),
    ("POST", re.compile(r"^/ontologies/([A-Za-z_][A-Za-z0-9_]*)/query$"), "post_query"),
    ("POST", re.compile(r"^/sessions$"), "post_sessions"),
    ("GET", re.compile(r"^/sessions/([A-Za-z0-9_-]+)/form$"), "get_form"),
    ("POST", re.compile(r"^/sessions/([A-Za-z0-9_-]+)/values$"), "post_values"),
    ("GET", re.compile(r"^/sessions/([A-Za-z0-9_-]+)/recommendations$"), "get_recommendations"),
]

_STATIC_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".json": "application/json",
    ".svg": "image/svg+xml",
}


class PortalHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    app: PortalApp  # set by make_server

    # quiet by default; the portal is often run under pytest
    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        pass

    # -- plumbing -------------------------------------------------------------

    def _body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def _json_body(self) -> dict:
        raw = self._body()
        try:
            payload = json.loads(raw.decode("utf-8") or "{}")
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise BadRequestError(f"malformed JSON body: {exc}") from None
        if not isinstance(payload, dict):
            raise BadRequestError("JSON body must be an object")
        return payload

    def _send(self, status: int, content_type: str, body: str | bytes) -> None:
        data = body.encode("utf-8") if isinstance(body, str) else body
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        self.wfile.write(data)

    def _send_error(self, exc: PortalError) -> None:
        payload: dict = {"category": exc.category, "message": exc.message}
        if exc.location is not None:
            payload["location"] = {"line": exc.location.line, "col": exc.location.col}
        status = 404 if exc.category in NOT_FOUND_CATEGORIES else 409 if exc.category == "session-limit" else 400
        self._send(status, "application/json", canonical_json(payload))

    def _dispatch(self, method: str) -> None:
        path = self.path.split("?", 1)[0]
        try:
            if method == "GET" and self.app.config.static_dir is not None and path.startswith("/ui"):
                self._serve_static(path)
                return
            for verb, pattern, handler_name in _ROUTES:
                if verb != method:
                    continue
                match = pattern.match(path)
                if match:
                    getattr(self, handler_name)(*match.groups())
                    return
        except PortalError as exc:
            self._send_error(exc)
            return
        except Exception as exc:  # pragma: no cover - defensive
            self._send(500, "application/json", canonical_json({"category": "internal", "message": str(exc)}))
            return
        self._send(404, "application/json", canonical_json({"category": "not-found", "message": f"no route for {method} {path}"}))

    def do_GET(self):  # noqa: N802 - stdlib naming
        self._dispatch("GET")

    def do_POST(self):  # noqa: N802
        self._dispatch("POST")

    def do_OPTIONS(self):  # noqa: N802
        self._send(204, "text/plain", b"")

    # -- endpoints ---------------------------------------------------------------

    def post_ontologies(self) -> None:
        payload = self._json_body()
        name = payload.get("name")
        hfs_text = payload.get("hfs")
        if not isinstance(name, str) or not isinstance(hfs_text, str):
            raise BadRequestError('body must be {"name": ..., "hfs": ...}')
        summary = self.app.load_ontology(name, hfs_text)
        self._send(200, "application/json", canonical_json(summary))

    def get_taxonomy(self, name: str) -> None:
        loaded = self.app.get_ontology(name)
        self._send(200, "text/plain; charset=utf-8", loaded.hierarchy_text)

    def post_query(self, name: str) -> None:
        query_text = self._body().decode("utf-8")
        self._send(200, "application/json", self.app.query(name, query_text))

    def post_sessions(self) -> None:
        payload = self._json_body()
        ontology = payload.get("ontology")
        if not isinstance(ontology, str):
            raise BadRequestError('body must include "ontology"')
        initial_class = payload.get("initial_class")
        if initial_class is not None and not isinstance(initial_class, str):
            raise BadRequestError('"initial_class" must be a string')
        session = self.app.create_session(ontology, initial_class)
        self._send(200, "application/json", canonical_json(session.summary()))

    def get_form(self, session_id: str) -> None:
        session = self.app.get_session(session_id)
        self._send(200, "application/xml; charset=utf-8", session.form_xml)

    def post_values(self, session_id: str) -> None:
        payload = self._json_body()
        prop = payload.get("property")
        if not isinstance(prop, str) or "value" not in payload:
            raise BadRequestError('body must be {"property": ..., "value": ...}')
        xml = self.app.set_value(session_id, prop, payload["value"])
        self._send(200, "application/xml; charset=utf-8", xml)

    def get_recommendations(self, session_id: str) -> None:
        session = self.app.get_session(session_id)
        self._send(200, "application/json", session.recommendations_json)

    # -- static files (optional, for the browser client) --------------------------

    def _serve_static(self, path: str) -> None:
        root = self.app.config.static_dir
        assert root is not None
        relative = path[len("/ui"):].lstrip("/") or "index.html"
        target = (root / relative).resolve()
        if not str(target).startswith(str(root.resolve())) or not target.is_file():
            self._send(404, "text/plain; charset=utf-8", "not found\n")
            return
        content_type = _STATIC_TYPES.get(target.suffix, "application/octet-stream")
        self._send(200, content_type, target.read_bytes())


def make_server(config: ServerConfig, app: PortalApp | None = None) -> ThreadingHTTPServer:
    app = app or PortalApp(config)
    handler = type("BoundPortalHandler", (PortalHandler,), {"app": app})
    server = ThreadingHTTPServer(("127.0.0.1", config.port), handler)
    server.app = app  # type: ignore[attr-defined]
    return server


def serve(config: ServerConfig) -> None:
    app = PortalApp(config)
    for note in app.startup():
        print(note, flush=True)
    server = make_server(config, app)
    host, port = server.server_address
    print(f"portal listening on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
