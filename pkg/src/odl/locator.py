"""Object locators: one string syntax for local, HTTP, and store-backed data.

Locator syntax:

- ``media/000001.jpg``                relative to the dataset root
- ``file:///abs/path``                local filesystem, absolute
- ``http://host/p`` / ``https://...`` remote over HTTP(S)
- ``store://bucket/key``              bucket mapped to a base URL by the caller
- any form may end in ``#sha256=<64 lowercase hex>`` to pin the content digest

Resolution is strictly read-only and returns a sequential byte stream owned by
the caller. When a digest is pinned, the stream verifies it as the bytes are
consumed and raises at end-of-stream on mismatch.
"""

from __future__ import annotations

import hashlib
import re
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from . import diagnostics as dc
from .diagnostics import LocatorError

_SCHEME_RE = re.compile(r"^([A-Za-z][A-Za-z0-9+.\-]*)://")
_SHA256_RE = re.compile(r"^sha256=([0-9a-f]{64})$")

SUPPORTED_SCHEMES = ("relative", "file", "http", "https", "store")


@dataclass(frozen=True)
class ObjectLocator:
    raw: str
    scheme: str
    authority: str = ""
    path: str = ""
    checksum: str | None = None


@dataclass(frozen=True)
class ResolutionRoots:
    """Where each locator scheme resolves: a local root, bucket endpoints, HTTP policy."""

    local_root: str | Path | None = None
    store_endpoints: Mapping[str, str] = field(default_factory=dict)
    http_allowed: bool = True


def _invalid(raw: str, why: str) -> LocatorError:
    return LocatorError(dc.INVALID_LOCATOR, f"invalid locator {raw!r}: {why}")


def _normalize_relative(raw: str, text: str) -> str:
    if text.startswith("/"):
        raise _invalid(raw, "relative locators must not start with '/'")
    if "\\" in text:
        raise _invalid(raw, "backslashes are not allowed; use '/'")
    segments: list[str] = []
    for segment in text.split("/"):
        if segment in ("", "."):
            continue
        if segment == "..":
            if not segments:
                raise _invalid(raw, "path escapes the dataset root")
            segments.pop()
        else:
            segments.append(segment)
    if not segments:
        raise _invalid(raw, "path is empty")
    return "/".join(segments)


def parse_locator(raw: str) -> ObjectLocator:
    """Classify and normalize a locator string; raises LocatorError when malformed."""
    if not isinstance(raw, str) or not raw:
        raise LocatorError(dc.INVALID_LOCATOR, "locator must be a non-empty string")
    if any(ord(ch) < 32 for ch in raw):
        raise _invalid(raw, "control characters are not allowed")

    base = raw
    checksum = None
    if "#" in raw:
        base, fragment = raw.split("#", 1)
        m = _SHA256_RE.match(fragment)
        if not m:
            raise _invalid(raw, "fragment must be '#sha256=<64 lowercase hex>'")
        checksum = m.group(1)
        if not base:
            raise _invalid(raw, "locator has no path before the fragment")

    m = _SCHEME_RE.match(base)
    if m:
        scheme = m.group(1).lower()
        rest = base[m.end() :]
        if scheme == "file":
            if not rest:
                raise _invalid(raw, "file locator has an empty path")
            return ObjectLocator(raw, "file", "", rest, checksum)
        if scheme in ("http", "https"):
            parts = urllib.parse.urlsplit(base)
            if not parts.netloc:
                raise _invalid(raw, "URL has no host")
            return ObjectLocator(raw, scheme, parts.netloc, parts.path, checksum)
        if scheme == "store":
            bucket, _, key = rest.partition("/")
            if not bucket or not key.strip("/"):
                raise _invalid(raw, "store locators have the form store://bucket/key")
            return ObjectLocator(raw, "store", bucket, _normalize_relative(raw, key), checksum)
        raise LocatorError(dc.UNSUPPORTED_SCHEME, f"unsupported locator scheme {scheme!r}")

    return ObjectLocator(raw, "relative", "", _normalize_relative(raw, base), checksum)


class ChecksumReader:
    """Wraps a stream, verifying a pinned sha256 once the stream is fully read."""

    def __init__(self, stream, expected: str, name: str):
        self._stream = stream
        self._expected = expected
        self._name = name
        self._hash = hashlib.sha256()
        self._verified = False

    def read(self, size: int = -1) -> bytes:
        chunk = self._stream.read(size)
        self._hash.update(chunk)
        if (size == -1 or size is None or chunk == b"") and not self._verified:
            self._verified = True
            digest = self._hash.hexdigest()
            if digest != self._expected:
                raise LocatorError(
                    dc.INTEGRITY_ERROR,
                    f"{self._name}: content digest {digest} does not match pinned {self._expected}",
                )
        return chunk

    def close(self):
        self._stream.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _open_url(url: str) -> object:
    try:
        return urllib.request.urlopen(url, timeout=30)
    except urllib.error.HTTPError as exc:
        raise LocatorError(dc.REMOTE_ERROR, f"GET {url} failed with status {exc.code}") from None
    except urllib.error.URLError as exc:
        raise LocatorError(dc.REMOTE_ERROR, f"GET {url} failed: {exc.reason}") from None


def resolve(loc: ObjectLocator, roots: ResolutionRoots):
    """Open a locator as a readable byte stream. Never writes to any backend."""
    if loc.scheme == "relative":
        if roots.local_root is None:
            raise LocatorError(dc.NO_LOCAL_ROOT, f"no local root configured for {loc.raw!r}")
        target = Path(roots.local_root) / loc.path
        if not target.is_file():
            raise LocatorError(dc.NOT_FOUND, f"{target} does not exist")
        stream = target.open("rb")
    elif loc.scheme == "file":
        target = Path(loc.path)
        if not target.is_file():
            raise LocatorError(dc.NOT_FOUND, f"{target} does not exist")
        stream = target.open("rb")
    elif loc.scheme in ("http", "https"):
        if not roots.http_allowed:
            raise LocatorError(dc.HTTP_DISABLED, f"HTTP resolution is disabled for {loc.raw!r}")
        base = loc.raw.split("#", 1)[0]
        stream = _open_url(base)
    elif loc.scheme == "store":
        endpoint = roots.store_endpoints.get(loc.authority)
        if endpoint is None:
            raise LocatorError(dc.UNKNOWN_BUCKET, f"no endpoint configured for bucket {loc.authority!r}")
        url = endpoint.rstrip("/") + "/" + urllib.parse.quote(loc.path)
        stream = _open_url(url)
    else:  # pragma: no cover - parse_locator never produces other schemes
        raise LocatorError(dc.UNSUPPORTED_SCHEME, f"unsupported scheme {loc.scheme!r}")

    if loc.checksum:
        return ChecksumReader(stream, loc.checksum, loc.raw)
    return stream


def read_bytes(loc: ObjectLocator, roots: ResolutionRoots) -> bytes:
    """Resolve and fully read a locator."""
    stream = resolve(loc, roots)
    try:
        return stream.read()
    finally:
        stream.close()
