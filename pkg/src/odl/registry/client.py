"""Registry client: search, verified resumable downloads, and uploads.

Downloads fetch the dataset manifest, then per file:

- an existing complete file whose sha256 matches is skipped;
- an existing ``<path>.part`` resumes from its current length;
- files of 4 MiB or less are fetched whole, larger ones as 4 MiB byte
  ranges over up to ``jobs`` concurrent connections;
- chunks are committed to the ``.part`` file strictly in order, so the
  partial file is always a contiguous prefix;
- the assembled file is re-hashed from disk and atomically renamed into
  place only when its digest matches the manifest.

With ``jobs`` workers an interrupt can waste at most the ``jobs`` chunks in
flight; committed bytes are never refetched.
"""

from __future__ import annotations

import hashlib
import http.client
import json
import os
import urllib.error
import urllib.parse
import urllib.request
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .. import diagnostics as dc
from ..diagnostics import RegistryError
from .model import FileManifest, build_manifest, card_from_json, card_to_json, manifest_from_json, manifest_to_json, sha256_file

CHUNK_SIZE = 4 * 1024 * 1024


@dataclass(frozen=True)
class DatasetSummary:
    namespace: str
    name: str
    task_types: tuple[str, ...]
    data_types: tuple[str, ...]
    license: str
    updated: str

    @property
    def repo(self) -> str:
        return f"{self.namespace}/{self.name}"


@dataclass
class DownloadReport:
    bytes_fetched: int
    files: int
    verified: bool
    failures: tuple[str, ...] = ()


class _Interrupted(Exception):
    pass


class _Budget:
    """Counts data bytes; the downloader stops (resumably) once it runs out."""

    def __init__(self, limit: int | None):
        self.limit = limit
        self.used = 0

    def consume(self, n: int):
        self.used += n

    @property
    def exhausted(self) -> bool:
        return self.limit is not None and self.used >= self.limit


def _api(endpoint: str, *segments: str) -> str:
    quoted = "/".join(urllib.parse.quote(s, safe="/") for s in segments)
    return endpoint.rstrip("/") + "/api/v1/" + quoted


def _get_json(url: str):
    try:
        with urllib.request.urlopen(url, timeout=30) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as exc:
        detail = ""
        try:
            detail = json.loads(exc.read().decode("utf-8"))["error"]["message"]
        except Exception:
            pass
        if exc.code == 404:
            raise RegistryError(dc.NOT_FOUND, detail or f"{url} not found") from None
        raise RegistryError(dc.REMOTE_ERROR, f"GET {url} failed with status {exc.code}: {detail}") from None
    except (urllib.error.URLError, http.client.HTTPException, ConnectionError, TimeoutError) as exc:
        raise RegistryError(dc.REMOTE_ERROR, f"GET {url} failed: {exc}") from None


def search_datasets(
    endpoint: str,
    text: str | None = None,
    task_type: str | None = None,
    data_type: str | None = None,
    sort: str = "name",
) -> list[DatasetSummary]:
    """List/search datasets; filters are conjunctive, matching is case-insensitive."""
    params = {}
    if text:
        params["q"] = text
    if task_type:
        params["task"] = task_type
    if data_type:
        params["type"] = data_type
    params["sort"] = sort
    url = _api(endpoint, "datasets") + "?" + urllib.parse.urlencode(params)
    blob = _get_json(url)
    return [
        DatasetSummary(
            namespace=s["namespace"],
            name=s["name"],
            task_types=tuple(s.get("task_types", ())),
            data_types=tuple(s.get("data_types", ())),
            license=s.get("license", ""),
            updated=s.get("updated", ""),
        )
        for s in blob
    ]


def fetch_card(endpoint: str, namespace: str, name: str):
    return card_from_json(_get_json(_api(endpoint, "datasets", namespace, name)))


def fetch_manifest(endpoint: str, namespace: str, name: str) -> FileManifest:
    return manifest_from_json(_get_json(_api(endpoint, "datasets", namespace, name, "manifest")))


def _fetch_range(url: str, start: int, end: int) -> bytes:
    """Fetch the inclusive byte range [start, end]; raises on short reads."""
    expected = end - start + 1
    request = urllib.request.Request(url, headers={"Range": f"bytes={start}-{end}"})
    try:
        with urllib.request.urlopen(request, timeout=60) as resp:
            if resp.status not in (200, 206):
                raise RegistryError(dc.REMOTE_ERROR, f"GET {url} returned status {resp.status}")
            if resp.status == 200 and start > 0:
                raise RegistryError(dc.REMOTE_ERROR, f"{url}: server ignored the Range header")
            data = resp.read(expected + 1)
    except urllib.error.HTTPError as exc:
        raise RegistryError(dc.REMOTE_ERROR, f"GET {url} failed with status {exc.code}") from None
    except (urllib.error.URLError, http.client.HTTPException, ConnectionError, TimeoutError) as exc:
        raise _Interrupted(f"{url}: {exc}") from None
    if len(data) != expected:
        raise _Interrupted(f"{url}: got {len(data)} of {expected} bytes")
    return data


def _fetch_whole(url: str) -> bytes:
    try:
        with urllib.request.urlopen(url, timeout=60) as resp:
            expected = int(resp.headers.get("Content-Length", "-1"))
            data = resp.read()
    except urllib.error.HTTPError as exc:
        raise RegistryError(dc.REMOTE_ERROR, f"GET {url} failed with status {exc.code}") from None
    except (urllib.error.URLError, http.client.HTTPException, ConnectionError, TimeoutError) as exc:
        raise _Interrupted(f"{url}: {exc}") from None
    if expected >= 0 and len(data) != expected:
        raise _Interrupted(f"{url}: got {len(data)} of {expected} bytes")
    return data


class _FileFetcher:
    """Downloads one manifest entry into `<target>.part`, then verifies and renames."""

    def __init__(self, url: str, entry, target: Path, pool: ThreadPoolExecutor, jobs: int,
                 budget: _Budget):
        self.url = url
        self.entry = entry
        self.target = target
        self.part = target.with_name(target.name + ".part")
        self.pool = pool
        self.jobs = jobs
        self.budget = budget
        self.bytes_fetched = 0

    def already_complete(self) -> bool:
        return (
            self.target.is_file()
            and self.target.stat().st_size == self.entry.size
            and sha256_file(self.target) == self.entry.sha256
        )

    def run(self):
        if self.already_complete():
            return
        self.target.parent.mkdir(parents=True, exist_ok=True)

        start = 0
        if self.part.is_file():
            start = self.part.stat().st_size
            if start > self.entry.size:
                self.part.unlink()
                start = 0
        if start < self.entry.size:
            self._fetch_from(start)
        self._finish()

    def _fetch_from(self, start: int):
        mode = "ab" if start else "wb"
        with self.part.open(mode) as out:
            if start == 0 and self.entry.size <= CHUNK_SIZE:
                data = _fetch_whole(self.url)
                out.write(data)
                self.bytes_fetched += len(data)
                self.budget.consume(len(data))
                return
            ranges = [
                (lo, min(lo + CHUNK_SIZE, self.entry.size) - 1)
                for lo in range(start, self.entry.size, CHUNK_SIZE)
            ]
            # Bounded pipeline: at most `jobs` chunks in flight, committed in
            # order so the .part file stays a contiguous prefix.
            inflight: deque = deque()
            try:
                for rng in ranges:
                    while len(inflight) >= self.jobs:
                        self._commit(out, inflight.popleft())
                    inflight.append(self.pool.submit(_fetch_range, self.url, *rng))
                while inflight:
                    self._commit(out, inflight.popleft())
            finally:
                for future in inflight:
                    future.cancel()

    def _commit(self, out, future):
        data = future.result()
        out.write(data)
        self.bytes_fetched += len(data)
        self.budget.consume(len(data))
        if self.budget.exhausted:
            raise _Interrupted("byte budget exhausted")

    def _finish(self):
        if self.part.stat().st_size != self.entry.size:
            raise _Interrupted(f"{self.entry.path}: partial file")
        digest = sha256_file(self.part)
        if digest != self.entry.sha256:
            # Keep the .part so the mismatch can be inspected.
            raise RegistryError(
                dc.INTEGRITY_ERROR,
                f"{self.entry.path}: sha256 {digest} does not match manifest {self.entry.sha256}",
            )
        os.replace(self.part, self.target)


def download_dataset(
    endpoint: str,
    namespace: str,
    name: str,
    target_dir: str | Path,
    jobs: int = 4,
    max_bytes: int | None = None,
) -> DownloadReport:
    """Fetch a dataset's files into `target_dir`, verified against its manifest.

    Already-complete files are skipped; interrupted files keep a resumable
    `.part`. A digest mismatch raises RegistryError(IntegrityError); network
    interruptions end the run early with `verified=False` and the failure
    listed. `max_bytes` stops fetching (resumably) once that many data bytes
    arrived, which is also how tests stage interrupts.
    """
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    manifest = fetch_manifest(endpoint, namespace, name)
    target = Path(target_dir)

    bytes_fetched = 0
    files_ok = 0
    failures: list[str] = []
    budget = _Budget(max_bytes)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for entry in manifest.entries:
            rel = Path(*entry.path.split("/"))
            fetcher = _FileFetcher(
                _api(endpoint, "files", namespace, name, entry.path),
                entry,
                target / rel,
                pool,
                jobs,
                budget,
            )
            try:
                fetcher.run()
                files_ok += 1
            except _Interrupted as exc:
                failures.append(f"{entry.path}: {exc}")
            finally:
                bytes_fetched += fetcher.bytes_fetched
            if failures or budget.exhausted:
                break

    remaining = len(manifest.entries) - files_ok - len(failures)
    if remaining and budget.exhausted and not failures:
        failures.append("byte budget exhausted")
    return DownloadReport(
        bytes_fetched=bytes_fetched,
        files=files_ok,
        verified=files_ok == len(manifest.entries),
        failures=tuple(failures),
    )


def upload_dataset(endpoint: str, namespace: str, name: str, source_dir: str | Path) -> dict:
    """Create a dataset from a local directory containing datacard.json plus files."""
    source = Path(source_dir)
    card_path = source / "datacard.json"
    if not card_path.is_file():
        raise RegistryError(dc.INVALID_CARD, f"{source} has no datacard.json")
    card = card_from_json(json.loads(card_path.read_text(encoding="utf-8")))
    if card.namespace != namespace or card.name != name:
        raise RegistryError(dc.INVALID_CARD, "datacard namespace/name must match the target repo")
    manifest = build_manifest(source)
    if not manifest.entries:
        raise RegistryError(dc.INVALID_MANIFEST, f"{source} has no content files")

    body = json.dumps({"datacard": card_to_json(card), "manifest": manifest_to_json(manifest)})
    _put(_api(endpoint, "datasets", namespace, name), body.encode("utf-8"))
    committed = False
    for entry in manifest.entries:
        result = _put(
            _api(endpoint, "files", namespace, name, entry.path),
            (source / Path(*entry.path.split("/"))).read_bytes(),
        )
        committed = bool(result.get("committed"))
    return {"files": len(manifest.entries), "total_size": manifest.total_size, "committed": committed}


def _put(url: str, body: bytes) -> dict:
    request = urllib.request.Request(url, data=body, method="PUT")
    try:
        with urllib.request.urlopen(request, timeout=60) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as exc:
        detail = ""
        try:
            detail = json.loads(exc.read().decode("utf-8"))["error"]["message"]
        except Exception:
            pass
        raise RegistryError(dc.REMOTE_ERROR, f"PUT {url} failed with status {exc.code}: {detail}") from None
    except (urllib.error.URLError, http.client.HTTPException, ConnectionError, TimeoutError) as exc:
        raise RegistryError(dc.REMOTE_ERROR, f"PUT {url} failed: {exc}") from None
