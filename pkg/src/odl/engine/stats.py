"""Preview statistics: file format, size, resolution, and class frequency."""

from __future__ import annotations

import dataclasses
import posixpath
from dataclasses import dataclass, field

from .. import diagnostics as dc
from ..diagnostics import Diagnostic, EngineError, LocatorError
from ..dsdl.typecheck import LabelValue
from ..locator import ResolutionRoots, parse_locator, read_bytes
from .mediaprobe import probe_dimensions

SIZE_BUCKETS = (
    (64 * 1024, "<64KiB"),
    (1024 * 1024, "<1MiB"),
    (16 * 1024 * 1024, "<16MiB"),
)
SIZE_BUCKET_TOP = "≥16MiB"  # >=16MiB
UNKNOWN_RESOLUTION_KEY = "unknown"


@dataclass
class DatasetStats:
    extension_histogram: dict[str, int]
    size_histogram: dict[str, int]
    resolution_histogram: dict[str, int]
    class_frequency: dict[str, int]
    media_count: int = 0
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False)


def _size_bucket(size: int) -> str:
    for limit, name in SIZE_BUCKETS:
        if size < limit:
            return name
    return SIZE_BUCKET_TOP


def _iter_media(value, ftype, defs):
    kind = ftype.kind
    if kind == "Image" and isinstance(value, str):
        yield value
    elif kind == "List" and isinstance(value, tuple):
        for item in value:
            yield from _iter_media(item, ftype.element, defs)
    elif kind == "Ref" and isinstance(value, dict):
        record = defs[ftype.ref]
        for fname, ft in record.fields.items():
            if fname in value:
                yield from _iter_media(value[fname], ft, defs)


def _iter_media_in_sample(sample, schema, defs):
    for fname, ftype in schema.fields.items():
        if fname in sample.fields:
            yield from _iter_media(sample.fields[fname], ftype, defs)


def _count_labels(value, counter: dict[str, int]):
    if isinstance(value, LabelValue):
        counter[value.name] = counter.get(value.name, 0) + 1
    elif isinstance(value, dict):
        for v in value.values():
            _count_labels(v, counter)
    elif isinstance(value, (list, tuple)):
        for v in value:
            _count_labels(v, counter)


def compute_stats(ds, roots: ResolutionRoots | None = None) -> DatasetStats:
    """Histogram the dataset's media (extension, size, resolution) and labels.

    Media bytes are resolved per sample against that sample's dataset root.
    All unresolvable media are gathered up and raised as one
    EngineError(MediaUnavailable); unparseable headers count under
    resolution "unknown" with a warning.
    """
    extensions: dict[str, int] = {}
    sizes: dict[str, int] = {}
    resolutions: dict[str, int] = {}
    classes: dict[str, int] = {}
    warnings: list[Diagnostic] = []
    missing: list[str] = []
    media_count = 0

    for i in range(len(ds)):
        sample = ds[i]
        _count_labels(sample.fields, classes)
        for raw in _iter_media_in_sample(sample, ds.schema, ds.defs):
            loc = parse_locator(raw)
            base = roots if roots is not None else ResolutionRoots()
            per_item = dataclasses.replace(base, local_root=ds.root_for(i))
            try:
                data = read_bytes(loc, per_item)
            except LocatorError:
                missing.append(raw)
                continue
            media_count += 1
            ext = posixpath.splitext(loc.path)[1].lstrip(".").lower()
            extensions[ext] = extensions.get(ext, 0) + 1
            bucket = _size_bucket(len(data))
            sizes[bucket] = sizes.get(bucket, 0) + 1
            dims = probe_dimensions(data)
            if dims is None:
                key = UNKNOWN_RESOLUTION_KEY
                warnings.append(
                    dc.warning(dc.UNKNOWN_RESOLUTION, f"could not parse media header of {raw!r}")
                )
            else:
                key = f"{dims[0]}×{dims[1]}"
            resolutions[key] = resolutions.get(key, 0) + 1

    if missing:
        raise EngineError(
            dc.MEDIA_UNAVAILABLE,
            "media unavailable: " + ", ".join(repr(m) for m in missing),
        )
    return DatasetStats(
        extension_histogram=extensions,
        size_histogram=sizes,
        resolution_histogram=resolutions,
        class_frequency=classes,
        media_count=media_count,
        warnings=tuple(warnings),
    )
