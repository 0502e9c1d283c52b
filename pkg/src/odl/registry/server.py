"""A small registry server over HTTP/1.1 with byte-range support.

Serves datasets laid out as `<root>/<namespace>/<name>/` with a
`datacard.json` plus content files. Endpoints (JSON unless noted):

    GET /api/v1/datasets?q=&task=&type=&sort=name|updated   list/search
    GET /api/v1/datasets/{ns}/{name}                        DataCard
    GET /api/v1/datasets/{ns}/{name}/manifest               FileManifest
    GET /api/v1/files/{ns}/{name}/{path}                    bytes, Range honored
    PUT /api/v1/datasets/{ns}/{name}                        stage {datacard, manifest}
    PUT /api/v1/files/{ns}/{name}/{path}                    upload staged file

Uploads commit atomically once every manifest entry has arrived and verified;
committed datasets are immutable. The server keeps a request log (method,
path, parsed range, bytes served) so tests can audit resume behaviour, and it
can be told to abort file transfers after a byte budget to simulate network
failure.
"""

from __future__ import annotations

import hashlib
import json
import re
import shutil
import socket
import sys
import threading
import urllib.parse
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .. import diagnostics as dc
from ..diagnostics import RegistryError
from .model import (
    FileManifest,
    build_manifest,
    card_from_json,
    card_to_json,
    manifest_from_json,
    manifest_to_json,
    sha256_file,
    validate_manifest,
)

_DATASET_RE = re.compile(r"^/api/v1/datasets/([^/]+)/([^/]+)$")
_MANIFEST_RE = re.compile(r"^/api/v1/datasets/([^/]+)/([^/]+)/manifest$")
_FILE_RE = re.compile(r"^/api/v1/files/([^/]+)/([^/]+)/(.+)$")
_RANGE_RE = re.compile(r"^bytes=(\d*)-(\d*)$")


@dataclass
class RequestRecord:
    method: str
    path: str
    range: tuple[int, int | None] | None
    status: int
    data_bytes: int = 0


def _parse_range(header: str | None, size: int) -> tuple[int, int] | None:
    """(start, end) inclusive, or None to serve the whole file."""
    if not header:
        return None
    m = _RANGE_RE.match(header.strip())
    if not m or (not m.group(1) and not m.group(2)):
        return None  # malformed ranges are ignored per HTTP semantics
    if not m.group(1):  # suffix form: last N bytes
        suffix = int(m.group(2))
        if suffix == 0:
            return None
        return max(size - suffix, 0), size - 1
    start = int(m.group(1))
    end = int(m.group(2)) if m.group(2) else size - 1
    return start, min(end, size - 1)


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: "_RegistryHTTPServer"

    def log_message(self, *args):  # keep test output quiet
        pass

    @property
    def registry(self) -> "RegistryServer":
        return self.server.registry

    def _record(self, status: int, data_bytes: int = 0, rng=None):
        record = RequestRecord(
            method=self.command,
            path=urllib.parse.unquote(urllib.parse.urlsplit(self.path).path),
            range=rng,
            status=status,
            data_bytes=data_bytes,
        )
        with self.registry._lock:
            self.registry.request_log.append(record)

    def _send_json(self, payload, status: int = 200):
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
        self._record(status)

    def _send_error_json(self, status: int, code: str, message: str):
        self._send_json({"error": {"code": code, "message": message}}, status)

    def do_GET(self):
        parts = urllib.parse.urlsplit(self.path)
        path = urllib.parse.unquote(parts.path)
        query = urllib.parse.parse_qs(parts.query)
        try:
            if path == "/api/v1/datasets":
                return self._send_json(self.registry.list_summaries(query))
            m = _MANIFEST_RE.match(path)
            if m:
                manifest = self.registry.manifest_for(m.group(1), m.group(2))
                return self._send_json(manifest_to_json(manifest))
            m = _DATASET_RE.match(path)
            if m:
                card = self.registry.card_for(m.group(1), m.group(2))
                return self._send_json(card_to_json(card))
            m = _FILE_RE.match(path)
            if m:
                return self._send_file(m.group(1), m.group(2), m.group(3))
            self._send_error_json(404, dc.NOT_FOUND, f"no route for {path}")
        except KeyError:
            self._send_error_json(404, dc.NOT_FOUND, f"{path} not found")
        except RegistryError as exc:
            self._send_error_json(400, exc.code, str(exc))

    def _send_file(self, namespace: str, name: str, rel_path: str):
        target = self.registry.file_path(namespace, name, rel_path)
        if target is None:
            return self._send_error_json(404, dc.NOT_FOUND, f"{rel_path} not found")
        size = target.stat().st_size
        rng = _parse_range(self.headers.get("Range"), size)
        if rng is not None and rng[0] >= size:
            self.send_response(416)
            self.send_header("Content-Range", f"bytes */{size}")
            self.send_header("Content-Length", "0")
            self.end_headers()
            return self._record(416, rng=rng)

        if rng is None:
            start, end = 0, size - 1
            status = 200
        else:
            start, end = rng
            status = 206
        length = end - start + 1 if size else 0

        allowed = self.registry._reserve_budget(length)
        self.send_response(status)
        self.send_header("Content-Type", "application/octet-stream")
        self.send_header("Accept-Ranges", "bytes")
        self.send_header("Content-Length", str(length))
        if status == 206:
            self.send_header("Content-Range", f"bytes {start}-{end}/{size}")
        self.end_headers()

        sent = 0
        with target.open("rb") as stream:
            stream.seek(start)
            remaining = min(length, allowed)
            while remaining > 0:
                chunk = stream.read(min(1 << 16, remaining))
                if not chunk:
                    break
                self.wfile.write(chunk)
                sent += len(chunk)
                remaining -= len(chunk)
        self._record(status, sent, (start, end) if rng is not None else None)
        if allowed < length:
            # Simulated transport failure: drop the connection mid-body.
            self.close_connection = True
            try:
                self.wfile.flush()
                self.connection.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass

    def do_PUT(self):
        parts = urllib.parse.urlsplit(self.path)
        path = urllib.parse.unquote(parts.path)
        length = int(self.headers.get("Content-Length", "0"))
        body = self.rfile.read(length)
        try:
            m = _DATASET_RE.match(path)
            if m:
                result = self.registry.stage_dataset(m.group(1), m.group(2), body)
                return self._send_json(result, 202)
            m = _FILE_RE.match(path)
            if m:
                result = self.registry.receive_file(m.group(1), m.group(2), m.group(3), body)
                return self._send_json(result)
            self._send_error_json(404, dc.NOT_FOUND, f"no route for {path}")
        except RegistryError as exc:
            status = 409 if exc.code == "Conflict" else 400
            self._send_error_json(status, exc.code, str(exc))


class _RegistryHTTPServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, bind, handler, registry: "RegistryServer"):
        self.registry = registry
        super().__init__(bind, handler)

    def handle_error(self, request, client_address):
        # Dropped connections are expected during fault injection; stay quiet.
        exc = sys.exc_info()[1]
        if isinstance(exc, (ConnectionError, BrokenPipeError, TimeoutError)):
            return
        super().handle_error(request, client_address)


class RegistryServer:
    """In-process registry service handle with start/stop and a request log."""

    def __init__(self, root: str | Path, bind: tuple[str, int] = ("127.0.0.1", 0)):
        self.root = Path(root)
        self.request_log: list[RequestRecord] = []
        self._lock = threading.Lock()
        self._budget: int | None = None
        self._manifest_cache: dict[tuple[str, str], tuple[tuple, FileManifest]] = {}
        self._thread: threading.Thread | None = None
        try:
            self._http = _RegistryHTTPServer(bind, _Handler, registry=self)
        except OSError as exc:
            raise RegistryError(dc.STARTUP_ERROR, f"cannot bind {bind}: {exc}") from None

    # -- lifecycle ---------------------------------------------------------

    @property
    def endpoint(self) -> str:
        host, port = self._http.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "RegistryServer":
        self._thread = threading.Thread(target=self._http.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self._http.shutdown()
        self._http.server_close()
        if self._thread is not None:
            self._thread.join(timeout=10)

    def __enter__(self) -> "RegistryServer":
        return self.start()

    def __exit__(self, *exc):
        self.stop()

    # -- fault injection and logging ----------------------------------------

    def fail_after_data_bytes(self, budget: int | None):
        """Abort file transfers once `budget` more data bytes have been served."""
        with self._lock:
            self._budget = budget

    def _reserve_budget(self, wanted: int) -> int:
        with self._lock:
            if self._budget is None:
                return wanted
            allowed = min(wanted, self._budget)
            self._budget -= allowed
            return allowed

    def clear_log(self):
        with self._lock:
            self.request_log.clear()

    def data_requests(self):
        with self._lock:
            return [r for r in self.request_log if r.path.startswith("/api/v1/files/")]

    # -- dataset state -------------------------------------------------------

    def _dataset_dir(self, namespace: str, name: str) -> Path:
        root = self.root.resolve()
        base = (self.root / namespace / name).resolve()
        if root not in base.parents:
            raise KeyError(namespace)
        return base

    def dataset_names(self) -> list[tuple[str, str]]:
        found = []
        if not self.root.is_dir():
            return found
        for ns_dir in sorted(p for p in self.root.iterdir() if p.is_dir() and not p.name.startswith(".")):
            for name_dir in sorted(p for p in ns_dir.iterdir() if p.is_dir()):
                if (name_dir / "datacard.json").is_file():
                    found.append((ns_dir.name, name_dir.name))
        return found

    def card_for(self, namespace: str, name: str):
        card_path = self._dataset_dir(namespace, name) / "datacard.json"
        if not card_path.is_file():
            raise KeyError(name)
        return card_from_json(json.loads(card_path.read_text(encoding="utf-8")))

    def manifest_for(self, namespace: str, name: str) -> FileManifest:
        base = self._dataset_dir(namespace, name)
        if not (base / "datacard.json").is_file():
            raise KeyError(name)
        files = sorted(p for p in base.rglob("*") if p.is_file())
        signature = tuple(
            (p.relative_to(base).as_posix(), p.stat().st_size, p.stat().st_mtime_ns) for p in files
        )
        with self._lock:
            cached = self._manifest_cache.get((namespace, name))
            if cached is not None and cached[0] == signature:
                return cached[1]
        manifest = build_manifest(base)
        with self._lock:
            self._manifest_cache[(namespace, name)] = (signature, manifest)
        return manifest

    def file_path(self, namespace: str, name: str, rel_path: str) -> Path | None:
        if rel_path == "datacard.json":
            return None
        base = self._dataset_dir(namespace, name)
        target = (base / rel_path).resolve()
        if base not in target.parents or not target.is_file():
            return None
        return target

    def list_summaries(self, query: dict[str, list[str]]) -> list[dict]:
        text = (query.get("q", [""])[0] or "").lower()
        task = (query.get("task", [""])[0] or "").lower()
        data_type = (query.get("type", [""])[0] or "").lower()
        sort = query.get("sort", ["name"])[0] or "name"

        summaries = []
        for namespace, name in self.dataset_names():
            try:
                card = self.card_for(namespace, name)
            except (RegistryError, KeyError, json.JSONDecodeError):
                continue  # unreadable datasets are not listed
            haystack = f"{card.namespace}/{card.name}\n{card.readme}".lower()
            if text and text not in haystack:
                continue
            if task and task not in (t.lower() for t in card.metafile.task_types):
                continue
            if data_type and data_type not in (t.lower() for t in card.metafile.data_types):
                continue
            summaries.append(
                {
                    "namespace": card.namespace,
                    "name": card.name,
                    "task_types": list(card.metafile.task_types),
                    "data_types": list(card.metafile.data_types),
                    "license": card.metafile.license.spdx_like(),
                    "updated": card.updated,
                }
            )
        if sort == "updated":
            summaries.sort(key=lambda s: f"{s['namespace']}/{s['name']}".lower())
            summaries.sort(key=lambda s: s["updated"], reverse=True)
        else:
            summaries.sort(key=lambda s: f"{s['namespace']}/{s['name']}".lower())
        return summaries

    # -- uploads --------------------------------------------------------------

    def _staging_dir(self, namespace: str, name: str) -> Path:
        return self.root / ".staging" / f"{namespace}___{name}"

    def stage_dataset(self, namespace: str, name: str, body: bytes) -> dict:
        if (self.root / namespace / name / "datacard.json").is_file():
            raise RegistryError("Conflict", f"{namespace}/{name} already exists and is immutable")
        try:
            blob = json.loads(body.decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise RegistryError(dc.INVALID_CARD, f"malformed upload body: {exc}") from None
        card = card_from_json(blob.get("datacard"))
        if card.namespace != namespace or card.name != name:
            raise RegistryError(dc.INVALID_CARD, "datacard namespace/name must match the URL")
        manifest = manifest_from_json(blob.get("manifest") or {})
        validate_manifest(manifest)

        staging = self._staging_dir(namespace, name)
        if staging.exists():
            shutil.rmtree(staging)
        staging.mkdir(parents=True)
        (staging / "datacard.json").write_text(
            json.dumps(card_to_json(card), ensure_ascii=False, indent=2), encoding="utf-8"
        )
        (staging / ".manifest.json").write_text(
            json.dumps(manifest_to_json(manifest)), encoding="utf-8"
        )
        return {"staged": True, "files_expected": len(manifest.entries)}

    def receive_file(self, namespace: str, name: str, rel_path: str, body: bytes) -> dict:
        staging = self._staging_dir(namespace, name)
        manifest_path = staging / ".manifest.json"
        if not manifest_path.is_file():
            raise RegistryError(dc.INVALID_MANIFEST, f"{namespace}/{name} has no staged manifest")
        manifest = manifest_from_json(json.loads(manifest_path.read_text(encoding="utf-8")))
        entry = manifest.entry(rel_path)
        if entry is None:
            raise RegistryError(dc.INVALID_MANIFEST, f"{rel_path!r} is not in the staged manifest")
        digest = hashlib.sha256(body).hexdigest()
        if len(body) != entry.size or digest != entry.sha256:
            raise RegistryError(
                dc.INTEGRITY_ERROR,
                f"{rel_path!r}: got {len(body)} bytes / {digest}, manifest says {entry.size} / {entry.sha256}",
            )
        target = staging / rel_path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(body)

        committed = all(
            (staging / e.path).is_file()
            and (staging / e.path).stat().st_size == e.size
            and sha256_file(staging / e.path) == e.sha256
            for e in manifest.entries
        )
        if committed:
            (staging / ".manifest.json").unlink()
            final = self.root / namespace / name
            final.parent.mkdir(parents=True, exist_ok=True)
            shutil.move(str(staging), str(final))
        return {"committed": committed}


def serve_registry(root: str | Path, bind: tuple[str, int] = ("127.0.0.1", 0)) -> RegistryServer:
    """Start a registry service over `root`; the caller owns the returned handle."""
    return RegistryServer(root, bind).start()
