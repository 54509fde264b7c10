"""HTTP face of the four protocol steps, for the browser UI and other clients.

JSON bodies in and out, every envelope versioned, errors drawn from a
closed code enum.  Challenge images are not inlined: each session's
inkblots are fetched as separate PNG resources under a URL that embeds the
session token, so they exist exactly as long as the session does and only
for its holder.

    POST /register/begin      {username, password}
    POST /register/complete   {session, labels | reject}
    POST /login/begin         {username, password}
    POST /login/complete      {session, response}
    GET  /inkblot/{session}/{j}   (image/png, j in 1..k)
    GET  /health
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .authcore import AccountStore, AuthEngine, DEFAULT_HASH_COST
from .errors import (
    DuplicateUserError,
    GotchaError,
    LockoutError,
    SessionError,
    ValidationError,
)
from .inkblot import export_png
from .puzzle import PuzzleParams

PROTOCOL_VERSION = "gotcha-v1"

log = logging.getLogger("gotcha.authservice")

# Closed enum: every error envelope uses exactly one of these codes.
ERROR_CODES = (
    "bad_request",
    "validation",
    "duplicate_user",
    "unknown_session",
    "locked_out",
    "not_found",
    "method_not_allowed",
    "internal",
)


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8431
    store_path: str | None = None
    params: PuzzleParams = field(default_factory=PuzzleParams)
    hash_cost: int = DEFAULT_HASH_COST
    ui_origin: str = "*"
    session_ttl: float = 15 * 60
    audit_path: str | None = None


def _envelope(payload: dict) -> bytes:
    return json.dumps({"version": PROTOCOL_VERSION, **payload}).encode("utf-8")


def _error_body(code: str, message: str) -> bytes:
    assert code in ERROR_CODES
    return _envelope({"error": {"code": code, "message": message}})


class _Handler(BaseHTTPRequestHandler):
    server_version = "gotcha/0.1"
    protocol_version = "HTTP/1.1"

    # -- plumbing -----------------------------------------------------------

    def log_message(self, fmt, *args):
        log.debug("%s %s", self.address_string(), fmt % args)

    def _cors(self):
        self.send_header("Access-Control-Allow-Origin", self.server.config.ui_origin)
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _send(self, status: int, body: bytes, content_type: str = "application/json"):
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error_code(self, status: int, code: str, message: str):
        self._send(status, _error_body(code, message))

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b""
        try:
            obj = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise _BadRequest(f"body is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise _BadRequest("body must be a JSON object")
        return obj

    def _field(self, obj: dict, name: str, kind=str):
        value = obj.get(name)
        if not isinstance(value, kind):
            raise _BadRequest(f"missing or mistyped field {name!r}")
        return value

    # -- routes ---------------------------------------------------------------

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        try:
            if self.path == "/health":
                self._send(200, _envelope({"status": "ok", "accounts": len(self.server.engine.store)}))
            elif self.path.startswith("/inkblot/"):
                self._serve_inkblot()
            else:
                self._send_error_code(404, "not_found", f"no route {self.path}")
        except Exception:
            log.exception("GET %s failed", self.path)
            self._send_error_code(500, "internal", "internal error")

    def do_POST(self):
        routes = {
            "/register/begin": self._register_begin,
            "/register/complete": self._register_complete,
            "/login/begin": self._login_begin,
            "/login/complete": self._login_complete,
        }
        handler = routes.get(self.path)
        try:
            if handler is None:
                if self.path in ("/health",) or self.path.startswith("/inkblot/"):
                    self._send_error_code(405, "method_not_allowed", "POST not allowed here")
                else:
                    self._send_error_code(404, "not_found", f"no route {self.path}")
                return
            handler(self._read_json())
        except _BadRequest as exc:
            self._send_error_code(400, "bad_request", str(exc))
        except ValidationError as exc:
            self._send_error_code(400, "validation", str(exc))
        except DuplicateUserError as exc:
            self._send_error_code(409, "duplicate_user", str(exc))
        except SessionError as exc:
            self._send_error_code(410, "unknown_session", str(exc))
        except LockoutError as exc:
            self._send_error_code(423, "locked_out", str(exc))
        except GotchaError as exc:
            log.exception("POST %s failed", self.path)
            self._send_error_code(500, "internal", str(exc))
        except Exception:
            log.exception("POST %s failed", self.path)
            self._send_error_code(500, "internal", "internal error")

    # -- handlers ---------------------------------------------------------------

    def _image_urls(self, token: str, k: int) -> list[str]:
        return [f"/inkblot/{token}/{j}" for j in range(1, k + 1)]

    def _register_begin(self, obj: dict):
        username = self._field(obj, "username")
        password = self._field(obj, "password")
        session, _ = self.server.engine.begin_registration(username, password)
        k = self.server.engine.params.k
        self._send(200, _envelope({
            "session": session.token,
            "k": k,
            "images": self._image_urls(session.token, k),
        }))

    def _register_complete(self, obj: dict):
        token = self._field(obj, "session")
        if obj.get("reject"):
            self.server.engine.complete_registration(token, reject=True)
            self._send(200, _envelope({"created": False, "rejected": True}))
            return
        labels = self._field(obj, "labels", list)
        record = self.server.engine.complete_registration(token, labels)
        self._send(200, _envelope({"created": True, "username": record.username}))

    def _login_begin(self, obj: dict):
        username = self._field(obj, "username")
        password = self._field(obj, "password")
        session, challenge = self.server.engine.begin_login(username, password)
        self._send(200, _envelope({
            "session": session.token,
            "k": challenge.k,
            "labels": list(challenge.labels),
            "images": self._image_urls(session.token, challenge.k),
        }))

    def _login_complete(self, obj: dict):
        token = self._field(obj, "session")
        response = self._field(obj, "response", list)
        result = self.server.engine.complete_login(token, response)
        self._send(200, _envelope({"accepted": result.accepted}))

    def _serve_inkblot(self):
        parts = self.path.strip("/").split("/")
        if len(parts) != 3:
            self._send_error_code(404, "not_found", "expected /inkblot/{session}/{j}")
            return
        _, token, j_text = parts
        try:
            j = int(j_text)
        except ValueError:
            self._send_error_code(404, "not_found", "image index must be an integer")
            return
        engine = self.server.engine
        session = engine.registration_session(token) or engine.login_session(token)
        if session is None:
            self._send_error_code(404, "not_found", "no live session for that token")
            return
        images = session.images()
        if not (1 <= j <= len(images)):
            self._send_error_code(404, "not_found", f"image index out of range 1..{len(images)}")
            return
        self._send(200, export_png(images[j - 1]), content_type="image/png")


class _BadRequest(Exception):
    pass


class GotchaService:
    """Owns the engine and the threading HTTP server."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        store = AccountStore(config.store_path)
        self.engine = AuthEngine(
            store,
            params=config.params,
            hash_cost=config.hash_cost,
            session_ttl=config.session_ttl,
            audit_path=config.audit_path,
        )
        self._httpd = ThreadingHTTPServer((config.host, config.port), _Handler)
        self._httpd.engine = self.engine
        self._httpd.config = config
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def url(self) -> str:
        return f"http://{self.config.host}:{self.port}"

    def start_background(self) -> "GotchaService":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self):
        log.info("serving on %s", self.url)
        self._httpd.serve_forever()

    def stop(self):
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


def serve(config: ServiceConfig) -> GotchaService:
    """Construct a service bound to config; refuses to start on a corrupt store."""
    return GotchaService(config)
