"""Annotation overlays as standalone SVG 1.1 documents."""

from __future__ import annotations

import base64
import dataclasses
import posixpath
from xml.sax.saxutils import escape, quoteattr

from .. import diagnostics as dc
from ..diagnostics import EngineError, LocatorError
from ..dsdl.model import RecordDef
from ..dsdl.typecheck import LabelValue
from ..locator import ResolutionRoots, parse_locator, read_bytes
from .mediaprobe import probe_dimensions

PALETTE = (
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
    "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080",
)

_MIME_BY_EXT = {"jpg": "image/jpeg", "jpeg": "image/jpeg", "png": "image/png"}


@dataclasses.dataclass(frozen=True)
class _Shape:
    task: str  # detection | segmentation | ocr | classification
    media_field: str
    objects_field: str | None = None
    geometry_field: str | None = None
    text_field: str | None = None  # label or transcription field inside objects
    label_field: str | None = None  # top-level label for classification


def detect_shape(schema: RecordDef, defs) -> _Shape:
    """Map a record schema onto one of the renderable task shapes."""
    media_field = next((f for f, t in schema.fields.items() if t.kind == "Image"), None)
    if media_field is None:
        raise EngineError(dc.UNSUPPORTED_FOR_RENDER, f"record {schema.name!r} has no Image field")

    for fname, ftype in schema.fields.items():
        if ftype.kind != "List" or ftype.element is None or ftype.element.kind != "Ref":
            continue
        inner = defs.get(ftype.element.ref or "")
        if not isinstance(inner, RecordDef):
            continue
        bbox = next((f for f, t in inner.fields.items() if t.kind == "BBox"), None)
        polygon = next((f for f, t in inner.fields.items() if t.kind == "Polygon"), None)
        label = next((f for f, t in inner.fields.items() if t.kind == "Label"), None)
        text = next((f for f, t in inner.fields.items() if t.kind == "Str"), None)
        if bbox and label:
            return _Shape("detection", media_field, fname, bbox, label)
        if polygon and label:
            return _Shape("segmentation", media_field, fname, polygon, label)
        if polygon and text:
            return _Shape("ocr", media_field, fname, polygon, text)

    label_field = next((f for f, t in schema.fields.items() if t.kind == "Label"), None)
    if label_field is not None:
        return _Shape("classification", media_field, label_field=label_field)
    raise EngineError(
        dc.UNSUPPORTED_FOR_RENDER,
        f"record {schema.name!r} matches no renderable task shape",
    )


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _object_text(obj: dict, shape: _Shape) -> str:
    value = obj.get(shape.text_field)
    return value.name if isinstance(value, LabelValue) else str(value)


def _canvas(sample, shape: _Shape, media_bytes: bytes | None) -> tuple[float, float]:
    if media_bytes is not None:
        dims = probe_dimensions(media_bytes)
        if dims is not None:
            return float(dims[0]), float(dims[1])
    # Fall back to the annotation extent, then to a fixed canvas.
    max_x, max_y = 0.0, 0.0
    for obj in sample.fields.get(shape.objects_field or "", ()):
        geometry = obj.get(shape.geometry_field)
        if geometry is None:
            continue
        if shape.task == "detection":
            max_x = max(max_x, geometry[0] + geometry[2])
            max_y = max(max_y, geometry[1] + geometry[3])
        else:
            for x, y in geometry:
                max_x, max_y = max(max_x, x), max(max_y, y)
    if max_x > 0 and max_y > 0:
        return max_x + 10.0, max_y + 10.0
    return 640.0, 480.0


def render_sample(ds, index: int, *, embed_media: bool = False,
                  roots: ResolutionRoots | None = None) -> str:
    """Render one sample as a standalone SVG document string.

    Detection samples get one `rect` plus one label `text` per object;
    segmentation gets one `polygon` per object; OCR gets polygons plus the
    transcription text; classification gets a single text badge. With
    `embed_media` the image is inlined base64, otherwise the locator is linked.
    """
    if not isinstance(index, int) or isinstance(index, bool) or not 0 <= index < len(ds):
        raise EngineError(dc.INDEX_OUT_OF_RANGE, f"index {index} out of range [0, {len(ds)})")
    shape = detect_shape(ds.schema, ds.defs)
    sample = ds[index]

    media_raw = sample.fields.get(shape.media_field)
    media_bytes = None
    if isinstance(media_raw, str):
        base = roots if roots is not None else ResolutionRoots()
        per_item = dataclasses.replace(base, local_root=ds.root_for(index))
        try:
            media_bytes = read_bytes(parse_locator(media_raw), per_item)
        except LocatorError:
            if embed_media:
                raise EngineError(
                    dc.MEDIA_UNAVAILABLE, f"cannot embed media: {media_raw!r} is unavailable"
                ) from None

    width, height = _canvas(sample, shape, media_bytes)
    body: list[str] = []

    if isinstance(media_raw, str):
        if embed_media and media_bytes is not None:
            ext = posixpath.splitext(parse_locator(media_raw).path)[1].lstrip(".").lower()
            mime = _MIME_BY_EXT.get(ext, "application/octet-stream")
            href = f"data:{mime};base64,{base64.b64encode(media_bytes).decode('ascii')}"
        else:
            href = media_raw
        body.append(
            f'  <image x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" '
            f"xlink:href={quoteattr(href)}/>"
        )

    if shape.task == "classification":
        value = sample.fields.get(shape.label_field)
        name = value.name if isinstance(value, LabelValue) else str(value)
        body.append(
            f'  <text x="8" y="20" fill="{PALETTE[0]}" font-size="16">{escape(name)}</text>'
        )
    else:
        for i, obj in enumerate(sample.fields.get(shape.objects_field, ())):
            color = PALETTE[i % len(PALETTE)]
            geometry = obj.get(shape.geometry_field)
            if geometry is None:
                continue
            if shape.task == "detection":
                x, y, w, h = geometry
                body.append(
                    f'  <rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
                    f'fill="none" stroke="{color}" stroke-width="2"/>'
                )
                body.append(
                    f'  <text x="{_fmt(x)}" y="{_fmt(y)}" fill="{color}" font-size="12">'
                    f"{escape(_object_text(obj, shape))}</text>"
                )
            else:
                points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in geometry)
                body.append(
                    f'  <polygon points="{points}" fill="none" stroke="{color}" stroke-width="2"/>'
                )
                if shape.task == "ocr":
                    x0, y0 = geometry[0]
                    body.append(
                        f'  <text x="{_fmt(x0)}" y="{_fmt(y0)}" fill="{color}" font-size="12">'
                        f"{escape(_object_text(obj, shape))}</text>"
                    )

    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" '
        f'version="1.1" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"
