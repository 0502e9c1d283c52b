"""COCO detection JSON to the canonical dataset model.

COCO boxes are already [x, y, w, h] and pass through unchanged. The domain is
category names ordered by ascending category id (ids need not be contiguous);
`iscrowd` is preserved as an optional Bool.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..diagnostics import ConversionError
from ..dsdl.model import DataSection, DsdlDocument
from ..engine.sampleset import SampleSet, from_document
from .voc import detection_defs


@dataclass(frozen=True)
class CocoSource:
    instances_json: str | Path
    images_dir: str | Path


def import_coco(src: CocoSource) -> SampleSet:
    """Convert a COCO-style instances file into a sample set.

    One sample per entry of the images table, ordered by ascending image id;
    images without annotations keep an empty object list. Annotations that
    reference unknown image or category ids are conversion errors.
    """
    instances_path = Path(src.instances_json)
    images_dir = Path(src.images_dir)
    if not instances_path.is_file():
        raise ConversionError(f"instances file {instances_path} does not exist")
    if not images_dir.is_dir():
        raise ConversionError(f"images directory {images_dir} does not exist")

    try:
        blob = json.loads(instances_path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConversionError(f"{instances_path.name}: malformed JSON: {exc}") from None
    for key in ("images", "annotations", "categories"):
        if not isinstance(blob.get(key), list):
            raise ConversionError(f"{instances_path.name}: missing {key!r} array")

    categories: dict[int, str] = {}
    for cat in blob["categories"]:
        try:
            categories[int(cat["id"])] = str(cat["name"])
        except (KeyError, TypeError, ValueError):
            raise ConversionError(f"{instances_path.name}: malformed category entry {cat!r}") from None
    ordered_ids = sorted(categories)
    classes = tuple(categories[i] for i in ordered_ids)
    if len(set(classes)) != len(classes):
        raise ConversionError(f"{instances_path.name}: duplicate category names")

    images: dict[int, str] = {}
    for img in blob["images"]:
        try:
            images[int(img["id"])] = str(img["file_name"])
        except (KeyError, TypeError, ValueError):
            raise ConversionError(f"{instances_path.name}: malformed image entry {img!r}") from None

    objects_by_image: dict[int, list[dict]] = {image_id: [] for image_id in images}
    for ann in blob["annotations"]:
        image_id = ann.get("image_id")
        category_id = ann.get("category_id")
        if image_id not in images:
            raise ConversionError(f"{instances_path.name}: annotation references unknown image id {image_id!r}")
        if category_id not in categories:
            raise ConversionError(
                f"{instances_path.name}: annotation references unknown category id {category_id!r}"
            )
        bbox = ann.get("bbox")
        if not isinstance(bbox, list) or len(bbox) != 4:
            raise ConversionError(f"{instances_path.name}: annotation bbox must be [x, y, w, h]")
        record = {"bbox": list(bbox), "label": categories[category_id]}
        if "iscrowd" in ann:
            record["iscrowd"] = bool(ann["iscrowd"])
        objects_by_image[image_id].append(record)

    media_prefix = images_dir.name
    samples = tuple(
        {"media": f"{media_prefix}/{images[image_id]}", "objects": objects_by_image[image_id]}
        for image_id in sorted(images)
    )

    defs = detection_defs(classes, iscrowd=True)
    origin = f"coco:{instances_path}"
    if not samples and not classes:
        from .. import diagnostics as dc

        return SampleSet(
            defs=defs,
            sample_type="ObjectDetSample",
            samples=(),
            root=images_dir.parent,
            origin=origin,
            warnings=(dc.warning(dc.EMPTY_DATASET, f"{instances_path.name} lists no images"),),
        )
    doc = DsdlDocument(
        version="1.0",
        defs=defs,
        data=DataSection(sample_type="ObjectDetSample", samples=samples),
    )
    return from_document(doc, images_dir.parent, origin)
