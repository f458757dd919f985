"""HTTP JSON service for the two app functions: classify and predict WQI.

Routes: POST /api/classify, POST /api/predict, GET /api/health. Everything
else is served from the static UI directory (single-page fallback to
index.html). Artifacts load once at startup and are immutable, so request
handling is lock-free and stateless.
"""
from __future__ import annotations

import json
import math
import mimetypes
import os
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .data import Sample
from .models import ModelArtifact, classify_sample, load_artifact, predict_wqi

DEFAULT_ADDR = "127.0.0.1:8080"
REQUIRED_FIELDS = ("temperature", "ph", "ec", "do")
STATIC_ROOT = Path(__file__).parent / "static"


@dataclass
class ServiceConfig:
    classifier_dir: str | None = None
    regressor_dir: str | None = None
    addr: str | None = None
    static_root: Path = STATIC_ROOT

    def resolve_addr(self) -> tuple[str, int]:
        addr = self.addr or os.environ.get("WQNET_ADDR") or DEFAULT_ADDR
        host, _, port = addr.rpartition(":")
        return host or "127.0.0.1", int(port)


class WqiService:
    """Loaded artifacts plus the pure request->response functions."""

    def __init__(self, config: ServiceConfig):
        if not config.classifier_dir and not config.regressor_dir:
            raise ValueError("at least one artifact path is required")
        self.config = config
        self.classifier: ModelArtifact | None = (
            load_artifact(config.classifier_dir) if config.classifier_dir else None
        )
        self.regressor: ModelArtifact | None = (
            load_artifact(config.regressor_dir) if config.regressor_dir else None
        )

    def health(self) -> dict:
        return {
            "status": "ok",
            "classifier_loaded": self.classifier is not None,
            "regressor_loaded": self.regressor is not None,
        }


def parse_sample(body: dict) -> tuple[Sample | None, tuple[int, dict] | None]:
    """Validate the four required numeric fields; unknown fields are ignored.

    Returns (sample, None) on success or (None, (status, error_body)).
    """
    values = {}
    for field in REQUIRED_FIELDS:
        if field not in body:
            return None, (400, {"error": "missing_field", "field": field})
        v = body[field]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            return None, (400, {"error": "not_a_number", "field": field})
        values[field] = float(v)
    return Sample(**values), None


def classify_response(artifact: ModelArtifact, sample: Sample) -> dict:
    cls, probs = classify_sample(artifact, sample)
    return {
        "class_index": cls.code,
        "label": cls.label,
        "probabilities": [float(p) for p in probs],
    }


def predict_response(artifact: ModelArtifact, sample: Sample) -> dict:
    wqi, cls = predict_wqi(artifact, sample)
    return {"wqi": wqi, "label": cls.label}


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def service(self) -> WqiService:
        return self.server.service  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):  # keep stdout deterministic
        pass

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_json(self) -> tuple[dict | None, tuple[int, dict] | None]:
        try:
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length) if length else b""
            body = json.loads(raw.decode("utf-8"))
        except (ValueError, UnicodeDecodeError):
            return None, (400, {"error": "invalid_json"})
        if not isinstance(body, dict):
            return None, (400, {"error": "invalid_json"})
        return body, None

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/api/health":
            self._send_json(200, self.service.health())
            return
        if path.startswith("/api/"):
            self._send_json(404, {"error": "not_found"})
            return
        self._serve_static(path)

    def do_POST(self):
        path = self.path.split("?", 1)[0]
        if path not in ("/api/classify", "/api/predict"):
            status = 405 if path == "/api/health" else 404
            self._send_json(status, {"error": "method_not_allowed" if status == 405 else "not_found"})
            return
        body, err = self._read_json()
        if err:
            self._send_json(*err)
            return
        sample, err = parse_sample(body)
        if err:
            self._send_json(*err)
            return
        if path == "/api/classify":
            if self.service.classifier is None:
                self._send_json(503, {"error": "model_unavailable"})
                return
            self._send_json(200, classify_response(self.service.classifier, sample))
        else:
            if self.service.regressor is None:
                self._send_json(503, {"error": "model_unavailable"})
                return
            self._send_json(200, predict_response(self.service.regressor, sample))

    def _serve_static(self, path: str) -> None:
        root = self.service.config.static_root
        candidate = (root / path.lstrip("/")).resolve() if path != "/" else root / "index.html"
        if path != "/" and (not str(candidate).startswith(str(root.resolve())) or not candidate.is_file()):
            candidate = root / "index.html"  # SPA fallback for client-side routes
        if not candidate.is_file():
            self._send_json(404, {"error": "not_found"})
            return
        data = candidate.read_bytes()
        ctype = mimetypes.guess_type(str(candidate))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


class _Server(ThreadingHTTPServer):
    daemon_threads = False  # join in-flight handlers on close
    block_on_close = True
    request_queue_size = 128  # burst of concurrent clients must not be reset


def make_server(service: WqiService, addr: tuple[str, int] | None = None) -> ThreadingHTTPServer:
    """Bound, ready-to-serve HTTP server; port 0 picks a free port."""
    host, port = addr if addr is not None else service.config.resolve_addr()
    server = _Server((host, port), _Handler)
    server.service = service  # type: ignore[attr-defined]
    return server


def run(config: ServiceConfig) -> None:
    """Serve until interrupted; completes in-flight requests on shutdown."""
    service = WqiService(config)
    server = make_server(service)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}/ "
          f"(classifier={'yes' if service.classifier else 'no'}, "
          f"regressor={'yes' if service.regressor else 'no'})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
