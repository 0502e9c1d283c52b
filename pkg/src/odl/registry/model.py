"""Data Cards, open-data license rules, and checksummed file manifests."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path

from .. import diagnostics as dc
from ..diagnostics import Diagnostic, RegistryError

NAME_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")
_SHA256_RE = re.compile(r"^[0-9a-f]{64}$")

FLAG_NAMES = ("BY", "SA", "NC", "ND")

#: CC variants and the flag set each implies.
CC_VARIANT_FLAGS: dict[str, frozenset[str]] = {
    "CC0": frozenset(),
    "BY": frozenset({"BY"}),
    "BY-SA": frozenset({"BY", "SA"}),
    "BY-NC": frozenset({"BY", "NC"}),
    "BY-NC-SA": frozenset({"BY", "NC", "SA"}),
    "BY-ND": frozenset({"BY", "ND"}),
    "BY-NC-ND": frozenset({"BY", "NC", "ND"}),
}
ODC_VARIANTS = ("PDDL", "ODC-BY", "ODbL")
CDLA_VARIANTS = ("Permissive-2.0", "Sharing-1.0")
FAMILIES = ("CC", "ODC", "CDLA")


@dataclass(frozen=True)
class LicenseSpec:
    family: str
    variant: str
    flags: frozenset[str] = frozenset()

    def spdx_like(self) -> str:
        return self.variant if self.family != "CC" or self.variant == "CC0" else f"CC-{self.variant}"


def validate_license(spec: LicenseSpec) -> Diagnostic | None:
    """None when the license is one of the accepted combinations, else the violation.

    CC variants are the seven-license suite with their implied flags; SA and
    ND never co-occur. ODC and CDLA variants carry no flags.
    """
    if spec.family not in FAMILIES:
        return dc.error(dc.INVALID_LICENSE, f"unknown license family {spec.family!r}")
    bad_flags = set(spec.flags) - set(FLAG_NAMES)
    if bad_flags:
        return dc.error(dc.INVALID_LICENSE, f"unknown flags {sorted(bad_flags)}")
    if "SA" in spec.flags and "ND" in spec.flags:
        return dc.error(dc.INVALID_LICENSE, "SA and ND are mutually exclusive")
    if spec.family == "CC":
        implied = CC_VARIANT_FLAGS.get(spec.variant)
        if implied is None:
            return dc.error(dc.INVALID_LICENSE, f"unknown CC variant {spec.variant!r}")
        if frozenset(spec.flags) != implied:
            return dc.error(
                dc.INVALID_LICENSE,
                f"CC {spec.variant} implies flags {sorted(implied)}, got {sorted(spec.flags)}",
            )
        return None
    variants = ODC_VARIANTS if spec.family == "ODC" else CDLA_VARIANTS
    if spec.variant not in variants:
        return dc.error(dc.INVALID_LICENSE, f"unknown {spec.family} variant {spec.variant!r}")
    if spec.flags:
        return dc.error(dc.INVALID_LICENSE, f"{spec.family} licenses carry no flags")
    return None


@dataclass(frozen=True)
class Metafile:
    publisher: str
    license: LicenseSpec
    homepage: str | None = None
    paper_refs: tuple[str, ...] = ()
    task_types: tuple[str, ...] = ()
    data_types: tuple[str, ...] = ()


@dataclass(frozen=True)
class DataCard:
    """Per-dataset metadata: a README plus a Metafile."""

    namespace: str
    name: str
    readme: str
    metafile: Metafile
    updated: str = ""  # ISO-8601 date, optional; drives the `updated` sort

    @property
    def repo(self) -> str:
        return f"{self.namespace}/{self.name}"


def _require(condition: bool, message: str):
    if not condition:
        raise RegistryError(dc.INVALID_CARD, message)


def card_from_json(blob: dict) -> DataCard:
    """Build and validate a DataCard from its JSON form."""
    _require(isinstance(blob, dict), "datacard must be a JSON object")
    for key in ("namespace", "name", "readme", "metafile"):
        _require(key in blob, f"datacard is missing {key!r}")
    _require(isinstance(blob["namespace"], str) and NAME_RE.match(blob["namespace"]),
             "namespace must match [A-Za-z0-9_.-]+")
    _require(isinstance(blob["name"], str) and NAME_RE.match(blob["name"]),
             "name must match [A-Za-z0-9_.-]+")
    _require(isinstance(blob["readme"], str), "readme must be a string")
    meta = blob["metafile"]
    _require(isinstance(meta, dict), "metafile must be a JSON object")
    _require(isinstance(meta.get("publisher"), str) and meta["publisher"],
             "metafile.publisher must be a non-empty string")
    homepage = meta.get("homepage")
    _require(homepage is None or isinstance(homepage, str), "metafile.homepage must be a string")
    for key in ("paper_refs", "task_types", "data_types"):
        value = meta.get(key, [])
        _require(isinstance(value, list) and all(isinstance(v, str) for v in value),
                 f"metafile.{key} must be a list of strings")
    lic = meta.get("license")
    _require(isinstance(lic, dict), "metafile.license must be a JSON object")
    spec = LicenseSpec(
        family=str(lic.get("family", "")),
        variant=str(lic.get("variant", "")),
        flags=frozenset(lic.get("flags", ())),
    )
    finding = validate_license(spec)
    if finding is not None:
        raise RegistryError(dc.INVALID_LICENSE, finding.message)
    updated = blob.get("updated", "")
    _require(isinstance(updated, str), "updated must be an ISO date string")
    return DataCard(
        namespace=blob["namespace"],
        name=blob["name"],
        readme=blob["readme"],
        metafile=Metafile(
            publisher=meta["publisher"],
            license=spec,
            homepage=homepage,
            paper_refs=tuple(meta.get("paper_refs", ())),
            task_types=tuple(meta.get("task_types", ())),
            data_types=tuple(meta.get("data_types", ())),
        ),
        updated=updated,
    )


def card_to_json(card: DataCard) -> dict:
    blob = {
        "namespace": card.namespace,
        "name": card.name,
        "readme": card.readme,
        "metafile": {
            "publisher": card.metafile.publisher,
            "homepage": card.metafile.homepage,
            "paper_refs": list(card.metafile.paper_refs),
            "task_types": list(card.metafile.task_types),
            "data_types": list(card.metafile.data_types),
            "license": {
                "family": card.metafile.license.family,
                "variant": card.metafile.license.variant,
                "flags": sorted(card.metafile.license.flags),
            },
        },
    }
    if card.updated:
        blob["updated"] = card.updated
    return blob


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    size: int
    sha256: str


@dataclass(frozen=True)
class FileManifest:
    entries: tuple[ManifestEntry, ...]
    total_size: int = field(default=-1)

    def __post_init__(self):
        if self.total_size < 0:
            object.__setattr__(self, "total_size", sum(e.size for e in self.entries))

    def entry(self, path: str) -> ManifestEntry | None:
        return next((e for e in self.entries if e.path == path), None)


def _validate_manifest_path(path: str):
    ok = (
        path
        and not path.startswith("/")
        and "\\" not in path
        and all(p not in ("", ".", "..") for p in path.split("/"))
    )
    if not ok:
        raise RegistryError(dc.INVALID_MANIFEST, f"bad manifest path {path!r}")


def validate_manifest(manifest: FileManifest):
    seen = set()
    for entry in manifest.entries:
        _validate_manifest_path(entry.path)
        if entry.path in seen:
            raise RegistryError(dc.INVALID_MANIFEST, f"duplicate manifest path {entry.path!r}")
        seen.add(entry.path)
        if not isinstance(entry.size, int) or entry.size < 0:
            raise RegistryError(dc.INVALID_MANIFEST, f"bad size for {entry.path!r}")
        if not _SHA256_RE.match(entry.sha256):
            raise RegistryError(dc.INVALID_MANIFEST, f"bad sha256 for {entry.path!r}")
    if manifest.total_size != sum(e.size for e in manifest.entries):
        raise RegistryError(dc.INVALID_MANIFEST, "total_size does not match the entry sizes")


def manifest_from_json(blob: dict) -> FileManifest:
    try:
        entries = tuple(
            ManifestEntry(path=e["path"], size=int(e["size"]), sha256=str(e["sha256"]))
            for e in blob["entries"]
        )
        total = int(blob.get("total_size", -1))
    except (KeyError, TypeError, ValueError) as exc:
        raise RegistryError(dc.INVALID_MANIFEST, f"malformed manifest: {exc}") from None
    manifest = FileManifest(entries, total if total >= 0 else -1)
    validate_manifest(manifest)
    return manifest


def manifest_to_json(manifest: FileManifest) -> dict:
    return {
        "entries": [{"path": e.path, "size": e.size, "sha256": e.sha256} for e in manifest.entries],
        "total_size": manifest.total_size,
    }


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as stream:
        for block in iter(lambda: stream.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def build_manifest(directory: str | Path, exclude: tuple[str, ...] = ("datacard.json",)) -> FileManifest:
    """Hash every file under `directory` (sorted relative paths) into a manifest."""
    base = Path(directory)
    entries = []
    for path in sorted(p for p in base.rglob("*") if p.is_file()):
        rel = path.relative_to(base).as_posix()
        if rel in exclude:
            continue
        entries.append(ManifestEntry(path=rel, size=path.stat().st_size, sha256=sha256_file(path)))
    return FileManifest(tuple(entries))
